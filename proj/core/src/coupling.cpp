// Copyright 2026 The sgkl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "sgkl/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "sgkl/error.hpp"
#include "sgkl/metrics.hpp"
#include "sgkl/special.hpp"

namespace sgkl::coupling {

namespace {

double distance_power(std::span<const double> a, std::span<const double> b,
                      double p) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    d2 += t * t;
  }
  return std::pow(d2, p);  // |a - b|^{2p}
}

}  // namespace

AtomCloud::AtomCloud(std::size_t dim, Vec points)
    : dim_(dim), points_(std::move(points)) {
  if (dim_ == 0 || points_.size() % dim_ != 0) {
    throw ParameterError("point array is not a multiple of the dimension");
  }
  const std::size_t n = points_.size() / dim_;
  if (n == 0 || n % 2 != 0) {
    throw ParameterError(
        fmt::format("atom cloud needs an even, positive count; got {}", n));
  }
  if (!all_finite(points_)) throw ParameterError("non-finite atom");
  Vec sum(dim_, 0.0);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < dim_; ++k) {
      sum[k] += points_[i * dim_ + k];
      scale = std::max(scale, std::abs(points_[i * dim_ + k]));
    }
  }
  if (norm(sum) > kTolerances.atom_sum_tolerance * std::max(1.0, scale * n)) {
    throw ParameterError(
        fmt::format("atom cloud is not centred (|sum| = {})", norm(sum)));
  }
}

double AtomCloud::power_sum(double p) const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    s += std::pow(norm_squared(atom(i)), p);
  }
  return s;
}

AtomCloud center_atoms(std::size_t dim, Vec points) {
  if (dim == 0 || points.size() % dim != 0) {
    throw ParameterError("point array is not a multiple of the dimension");
  }
  const std::size_t n = points.size() / dim;
  if (n == 0 || n % 2 != 0) {
    throw ParameterError(
        fmt::format("centring needs an even, positive atom count; got {}", n));
  }
  Vec mean(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < dim; ++k) mean[k] += points[i * dim + k];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < dim; ++k) points[i * dim + k] -= mean[k];
  }
  return AtomCloud(dim, std::move(points));
}

double matching_energy(
    const AtomCloud& cloud,
    std::span<const std::pair<std::size_t, std::size_t>> pairs, double p) {
  double e = 0.0;
  for (const auto& [i, j] : pairs) {
    e += distance_power(cloud.atom(i), cloud.atom(j), p);
  }
  return e;
}

namespace {

void enumerate(const AtomCloud& cloud, double p, std::vector<bool>& used,
               std::vector<std::pair<std::size_t, std::size_t>>& current,
               double energy, Matching& best) {
  const std::size_t n = cloud.size();
  std::size_t first = 0;
  while (first < n && used[first]) ++first;
  if (first == n) {
    if (energy > best.energy || best.pairs.empty()) {
      best.pairs = current;
      best.energy = energy;
    }
    return;
  }
  used[first] = true;
  for (std::size_t j = first + 1; j < n; ++j) {
    if (used[j]) continue;
    used[j] = true;
    current.emplace_back(first, j);
    enumerate(cloud, p, used, current,
              energy + distance_power(cloud.atom(first), cloud.atom(j), p),
              best);
    current.pop_back();
    used[j] = false;
  }
  used[first] = false;
}

}  // namespace

Matching exhaustive_matching(const AtomCloud& cloud, double p) {
  if (cloud.size() > kTolerances.exhaustive_matching_max_atoms) {
    throw ParameterError(fmt::format(
        "exhaustive matching supports at most {} atoms",
        kTolerances.exhaustive_matching_max_atoms));
  }
  Matching best;
  best.exhaustive = true;
  std::vector<bool> used(cloud.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> current;
  enumerate(cloud, p, used, current, 0.0, best);
  // Recompute from atoms so the stored energy never depends on the
  // accumulation order of the search.
  best.energy = matching_energy(cloud, best.pairs, p);
  return best;
}

Matching random_matching_search(const AtomCloud& cloud, double p,
                                rng::Stream& rng, std::size_t max_draws) {
  const double threshold = 0.5 * cloud.power_sum(p);
  const std::size_t n = cloud.size();
  std::vector<std::size_t> perm(n);
  Matching best;
  std::vector<std::pair<std::size_t, std::size_t>> pairs(n / 2);
  for (std::size_t draw = 1; draw <= max_draws; ++draw) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.below(i + 1)]);
    }
    for (std::size_t k = 0; k < n / 2; ++k) {
      pairs[k] = {perm[2 * k], perm[2 * k + 1]};
    }
    const double e = matching_energy(cloud, pairs, p);
    if (best.pairs.empty() || e > best.energy) {
      best.pairs = pairs;
      best.energy = e;
    }
    best.draws = draw;
    if (best.energy >= threshold) break;
  }
  return best;
}

Matching find_high_energy_matching(const AtomCloud& cloud, double p,
                                   rng::Stream& rng) {
  if (!(p >= 1.0)) throw ParameterError("p must be >= 1");
  Matching m = cloud.size() <= kTolerances.exhaustive_matching_max_atoms
                   ? exhaustive_matching(cloud, p)
                   : random_matching_search(cloud, p, rng);
  const double threshold = 0.5 * cloud.power_sum(p);
  if (m.energy < threshold) {
    throw SearchFailureError(fmt::format(
        "best matching energy {} is below half the power sum {} after {} "
        "draws",
        m.energy, threshold, m.draws));
  }
  return m;
}

AtomCloud midpoint_replace(const AtomCloud& cloud, const Matching& matching,
                           double p) {
  const std::size_t d = cloud.dim();
  if (matching.pairs.size() != cloud.pairs()) {
    throw ParameterError("matching is not perfect");
  }
  std::vector<int> seen(cloud.size(), 0);
  Vec out(cloud.points().begin(), cloud.points().end());
  for (const auto& [i, j] : matching.pairs) {
    if (i >= cloud.size() || j >= cloud.size() || seen[i]++ || seen[j]++) {
      throw ParameterError("matching is not perfect");
    }
    for (std::size_t k = 0; k < d; ++k) {
      const double mid = 0.5 * (cloud.atom(i)[k] + cloud.atom(j)[k]);
      out[i * d + k] = mid;
      out[j * d + k] = mid;
    }
  }
  AtomCloud next(d, std::move(out));
  const double before = cloud.phi(p);
  const double after = next.phi(p);
  const double factor = 1.0 - std::pow(2.0, -2.0 * p);
  if (after > factor * before * (1.0 + 1e-12) + 1e-300) {
    throw InvariantError(fmt::format(
        "midpoint replacement did not contract: Phi {} -> {} (factor {})",
        before, after, factor));
  }
  return next;
}

double one_step_cost(const AtomCloud& cloud, const Matching& matching,
                     double p) {
  const double n = static_cast<double>(matching.pairs.size());
  const double mean = matching_energy(cloud, matching.pairs, p) / n;
  return 0.25 * mixture_constant(p) * std::pow(mean, 1.0 / p);
}

double two_component_exact_wp(double delta, double p,
                              std::size_t n_quadrature) {
  if (!(delta >= 0.0)) throw ParameterError("delta must be >= 0");
  if (delta == 0.0) return 0.0;
  return wp_quantile_1d(
      [](double u) { return normal_quantile(u); },
      mixture_quantile_fn({{0.5, delta, 1.0}, {0.5, -delta, 1.0}}), p,
      n_quadrature);
}

double closed_form_chain_bound(double p, double phi0) {
  return convolution_prefactor(p) * std::pow(phi0, 1.0 / p);
}

ChainCertificate chain_certificate(const AtomCloud& cloud, double p,
                                   rng::Stream& rng,
                                   double phi_relative_tolerance) {
  if (!(p >= 1.0)) throw ParameterError("p must be >= 1");
  ChainCertificate cert;
  cert.p = p;
  cert.phi0 = cloud.phi(p);
  cert.closed_form = closed_form_chain_bound(p, cert.phi0);
  const double stop = phi_relative_tolerance * cert.phi0;
  const double factor = 1.0 - std::pow(2.0, -2.0 * p);
  const double kp = mixture_constant(p);

  AtomCloud current = cloud;
  double phi = cert.phi0;
  double partial = 0.0;
  while (phi > stop) {
    const std::size_t level = cert.levels.size();
    if (level > 100000) {
      throw InvariantError("certificate did not terminate");
    }
    Matching m = find_high_energy_matching(current, p, rng);
    if (m.energy < 0.5 * current.power_sum(p)) {
      throw InvariantError(fmt::format("energy condition fails at level {}",
                                       level));
    }
    const double cost = one_step_cost(current, m, p);
    // Costs decay at least geometrically from the initial moment.
    const double decay_cap =
        kp * std::pow(factor, static_cast<double>(level) / p) *
        std::pow(cert.phi0, 1.0 / p);
    if (cost > decay_cap * (1.0 + 1e-9)) {
      throw InvariantError(fmt::format(
          "cost {} at level {} exceeds the geometric cap {}", cost, level,
          decay_cap));
    }
    AtomCloud next = [&] {
      try {
        return midpoint_replace(current, m, p);
      } catch (const InvariantError& e) {
        throw InvariantError(fmt::format("level {}: {}", level, e.what()));
      }
    }();
    partial += cost;
    cert.levels.push_back({std::move(m), cost, phi});
    current = std::move(next);
    phi = current.phi(p);
  }
  cert.tail = std::pow(phi, 1.0 / (2.0 * p));
  cert.total = partial + cert.tail;
  if (!std::isfinite(cert.total)) throw InvariantError("non-finite total");
  if (cert.total > cert.closed_form * (1.0 + 1e-9) + 1e-300 &&
      cert.phi0 > 0.0) {
    throw InvariantError(fmt::format(
        "certified total {} exceeds the closed form {}", cert.total,
        cert.closed_form));
  }
  return cert;
}

double empirical_convolution_bound(std::size_t dim, Vec sample, double p,
                                   rng::Stream& rng,
                                   double phi_relative_tolerance) {
  const AtomCloud cloud = center_atoms(dim, std::move(sample));
  return chain_certificate(cloud, p, rng, phi_relative_tolerance).total;
}

std::string ChainCertificate::to_json() const {
  nlohmann::json j;
  j["p"] = p;
  j["phi0"] = phi0;
  j["tail"] = tail;
  j["total"] = total;
  j["closed_form"] = closed_form;
  auto& levels_json = j["levels"] = nlohmann::json::array();
  for (const auto& level : levels) {
    nlohmann::json l;
    l["phi"] = level.phi;
    l["cost"] = level.cost;
    l["energy"] = level.matching.energy;
    l["exhaustive"] = level.matching.exhaustive;
    l["draws"] = level.matching.draws;
    auto& pairs = l["pairs"] = nlohmann::json::array();
    for (const auto& [a, b] : level.matching.pairs) pairs.push_back({a, b});
    levels_json.push_back(std::move(l));
  }
  return j.dump(2);
}

}  // namespace sgkl::coupling
