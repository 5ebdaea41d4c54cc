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


#include "sgkl/harness/verify.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

#include "sgkl/bounds.hpp"
#include "sgkl/coupling.hpp"
#include "sgkl/error.hpp"
#include "sgkl/gradients.hpp"
#include "sgkl/harness/experiments.hpp"
#include "sgkl/harness/output.hpp"
#include "sgkl/integrators.hpp"
#include "sgkl/metrics.hpp"
#include "sgkl/model.hpp"
#include "sgkl/special.hpp"

namespace sgkl::harness {

bool VerifyReport::passed() const { return failures() == 0; }

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(std::count_if(
      checks.begin(), checks.end(), [](const auto& c) { return !c.passed; }));
}

std::string VerifyReport::to_json() const {
  nlohmann::json j;
  j["version"] = version_string();
  j["passed"] = passed();
  j["n_checks"] = checks.size();
  j["failures"] = failures();
  auto& arr = j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return j.dump(2) + "\n";
}

namespace {

rng::Stream check_stream(const Config& c, const std::string& name) {
  return rng::Stream(rng::derive_seed(c.run.seed, "verify/" + name), 0);
}

// Random centred 1-D discrete measure with up to `max_atoms` atoms inside
// [-radius, radius].
WeightedAtoms random_centred_atoms(rng::Stream& rng, std::size_t max_atoms,
                                   double radius) {
  const std::size_t k = 2 + rng.below(max_atoms - 1);
  WeightedAtoms mu;
  mu.dim = 1;
  mu.points.resize(k);
  mu.weights.resize(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mu.points[i] = radius * (2.0 * rng.uniform() - 1.0);
    mu.weights[i] = -std::log(rng.uniform());
    total += mu.weights[i];
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mu.weights[i] /= total;
    mean += mu.weights[i] * mu.points[i];
  }
  double extent = 0.0;
  for (double& x : mu.points) {
    x -= mean;
    extent = std::max(extent, std::abs(x));
  }
  if (extent > radius) {
    for (double& x : mu.points) x *= radius / extent;
  }
  return mu;
}

double weighted_moment(const WeightedAtoms& mu, double power) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    s += mu.weights[i] * std::pow(norm(mu.point(i)), power);
  }
  return s;
}

CheckResult coefficient_identity(const Config&) {
  double worst = 0.0;
  for (double h = 1e-10; h <= 1.0; h *= 3.7) {
    for (double gamma = 1e-3; gamma <= 1e3; gamma *= 4.1) {
      const auto c = StepCoefficients::make(h, gamma);
      const double y = gamma * h;
      const double rhs = 2.0 / (gamma * gamma) * (y + std::expm1(-y));
      const double err = std::abs(c.F_full * c.F_full + c.sigma2 - rhs) /
                         std::max(1.0, std::abs(rhs));
      worst = std::max(worst, err);
    }
  }
  return {"step_coefficient_identity", worst <= 1e-12,
          fmt::format("max scaled error {:.3g} (tolerance 1e-12)", worst)};
}

CheckResult block_gaussian_covariance(const Config& config) {
  const std::size_t d = 4;
  const std::size_t n = config.verify.covariance_samples;
  auto rng = check_stream(config, "block_gaussian");
  double worst = 0.0;
  std::string detail;
  for (auto [gamma, h] : {std::pair{2.0, 0.5}, std::pair{std::sqrt(32.0), 0.05}}) {
    auto c = StepCoefficients::make(h, gamma);
    if (config.verify.inject_fault == "sigma2_sign") c.sigma2 = -c.sigma2;
    std::vector<double> cov(4 * d * d, 0.0);
    Vec z(2 * d);
    for (std::size_t s = 0; s < n; ++s) {
      const auto draw = block_gaussian_sample(c, d, rng);
      std::copy(draw.x1.begin(), draw.x1.end(), z.begin());
      std::copy(draw.x2.begin(), draw.x2.end(), z.begin() + d);
      for (std::size_t a = 0; a < 2 * d; ++a) {
        for (std::size_t b = 0; b < 2 * d; ++b) cov[a * 2 * d + b] += z[a] * z[b];
      }
    }
    for (std::size_t a = 0; a < 2 * d; ++a) {
      for (std::size_t b = 0; b < 2 * d; ++b) {
        double expected = 0.0;
        if (a % d == b % d) {
          if (a < d && b < d) {
            expected = 1.0;
          } else if (a >= d && b >= d) {
            expected = c.position_noise_variance();
          } else {
            expected = c.F_full;
          }
        }
        worst = std::max(worst, std::abs(cov[a * 2 * d + b] / double(n) - expected));
      }
    }
    detail += fmt::format("gamma={:.4g},h={}: Cov(X2)={:.6f} ", gamma, h,
                          c.position_noise_variance());
  }
  return {"block_gaussian_covariance", worst <= 5e-3,
          detail + fmt::format("max entry error {:.3g} (tolerance 5e-3)", worst)};
}

CheckResult ubu_contraction(const Config& config) {
  const std::size_t d = 10;
  Vec precisions(d);
  for (std::size_t i = 0; i < d; ++i) precisions[i] = 1.0 + 3.0 * double(i) / double(d - 1);
  const QuadraticPotential target(precisions, Vec(d, 0.0));
  const ExactGradient grad(target);
  const double m = 1.0, L = 4.0, gamma = std::sqrt(8.0 * L), h = 1.0 / (4.0 * gamma);
  const auto c = StepCoefficients::make(h, gamma);
  const WeightedNorm wn(1.0 / L, 1.0 / gamma);
  const std::vector<std::size_t> checkpoints{100, 500, 2000};
  std::vector<double> sums(checkpoints.size(), 0.0);
  double initial = 0.0;
  auto rng = check_stream(config, "ubu_contraction");
  const int reps = config.verify.contraction_replicas;
  Vec scratch(kScratchPerDim * d), dx(d), dv(d);
  for (int r = 0; r < reps; ++r) {
    KineticState a{Vec(d), Vec(d)}, b{Vec(d), Vec(d)};
    rng.fill_normal(a.x);
    rng.fill_normal(a.v);
    rng.fill_normal(b.x);
    rng.fill_normal(b.v);
    const rng::Stream root = rng.substream(static_cast<std::uint64_t>(r) + 1);
    ChainStreams sa = ChainStreams::from(root), sb = ChainStreams::from(root);
    auto diff = [&] {
      for (std::size_t i = 0; i < d; ++i) {
        dx[i] = a.x[i] - b.x[i];
        dv[i] = a.v[i] - b.v[i];
      }
      return wn.squared(dx, dv);
    };
    initial += diff();
    std::size_t next = 0;
    for (std::size_t n = 1; n <= checkpoints.back(); ++n) {
      ubu_step(a, c, grad, sa, scratch);
      ubu_step(b, c, grad, sb, scratch);
      if (n == checkpoints[next]) sums[next++] += diff();
    }
  }
  bool ok = true;
  std::string detail;
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    const double rate = std::pow(1.0 - m * h / (4.0 * gamma), double(checkpoints[k]));
    const double ratio = sums[k] / initial;
    ok = ok && ratio <= rate * 1.05;
    detail += fmt::format("n={}: ratio {:.3g} vs bound {:.3g}; ", checkpoints[k],
                          ratio, rate * 1.05);
  }
  return {"ubu_contraction", ok, detail};
}

CheckResult sg_ubu_contraction(const Config& config) {
  const auto toy = QuadraticMixturePotential::toy();
  const MinibatchGradient mb(toy, 1);
  const double m = toy.strong_convexity(), L = toy.smoothness();
  const double c_g = *mb.jacobian_variance();
  const double gamma = 8.25;
  const double h = 0.005;
  const auto c = StepCoefficients::make(h, gamma);
  const WeightedNorm wn(1.0 / L, 1.0 / gamma);
  const double factor = 1.0 - m * h / (4.0 * gamma) + 5.0 * h * h * c_g / L;
  auto rng = check_stream(config, "sg_ubu_contraction");
  double worst = 0.0;
  Vec scratch(kScratchPerDim);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec x0{rng.normal(), rng.normal()}, v0{rng.normal(), rng.normal()};
    const double before = wn.squared(std::array{x0[0] - x0[1]},
                                     std::array{v0[0] - v0[1]});
    double after = 0.0;
    const int draws = 2000;
    for (int k = 0; k < draws; ++k) {
      const rng::Stream root = rng.substream(static_cast<std::uint64_t>(trial * draws + k) + 1);
      KineticState a{{x0[0]}, {v0[0]}}, b{{x0[1]}, {v0[1]}};
      ChainStreams sa = ChainStreams::from(root), sb = ChainStreams::from(root);
      ubu_step(a, c, mb, sa, scratch);
      ubu_step(b, c, mb, sb, scratch);
      after += wn.squared(std::array{a.x[0] - b.x[0]}, std::array{a.v[0] - b.v[0]});
    }
    worst = std::max(worst, after / draws / before);
  }
  return {"sg_ubu_contraction", worst <= factor * 1.05,
          fmt::format("max empirical ratio {:.6f} vs factor {:.6f} (x1.05)", worst,
                      factor)};
}

CheckResult convolution_dominance(const Config& config) {
  auto rng = check_stream(config, "convolution_dominance");
  int violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < config.verify.random_instances; ++i) {
    const WeightedAtoms mu = random_centred_atoms(rng, 8, 3.0);
    const auto tail = tail_and_truncated_cov(mu);
    for (int p : {1, 2}) {
      const double exact = convolved_wp_1d(mu, p);
      const double general = general_convolution_bound(p, weighted_moment(mu, 2.0 * p));
      const double refined = refined_bound(tail.tau(p), tail.frobenius);
      const double corollary = moment_corollary_bound(
          p, weighted_moment(mu, 2.0), weighted_moment(mu, 4.0));
      for (double b : {general, refined, corollary}) {
        if (exact > b) ++violations;
        min_margin = std::min(min_margin, b - exact);
      }
    }
  }
  return {"convolution_dominance", violations == 0,
          fmt::format("{} violations, min margin {:.3g}", violations, min_margin)};
}

CheckResult chi2_chain(const Config& config) {
  auto rng = check_stream(config, "chi2_chain");
  int violations = 0;
  for (int i = 0; i < config.verify.random_instances; ++i) {
    const WeightedAtoms mu = random_centred_atoms(rng, 8, 2.0);
    const auto chi = chi2_convolution(mu);
    const double w2 = convolved_wp_1d(mu, 2.0);
    if (chi.chi2 > chi.bound || chi.transport_bound() < w2) ++violations;
  }
  return {"chi2_chain", violations == 0, fmt::format("{} violations", violations)};
}

CheckResult lemma_two_component(const Config&) {
  int violations = 0;
  double worst_ratio = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double delta = 0.1 * k;
    for (double p : {1.0, 2.0}) {
      const double exact = coupling::two_component_exact_wp(delta, p);
      const double bound = mixture_constant(p) * delta * delta;
      if (exact > bound) ++violations;
      worst_ratio = std::max(worst_ratio, exact / bound);
    }
  }
  return {"two_component_oracle", violations == 0,
          fmt::format("{} violations, max exact/bound {:.4f}", violations,
                      worst_ratio)};
}

CheckResult coupling_sandwich(const Config& config) {
  auto rng = check_stream(config, "coupling_sandwich");
  int violations = 0;
  const int instances = std::min(config.verify.random_instances, 50);
  for (int i = 0; i < instances; ++i) {
    Vec pts(8);
    for (double& x : pts) x = 1.5 * rng.normal();
    const auto cloud = coupling::center_atoms(1, pts);
    const auto mu = WeightedAtoms::uniform(1, Vec(cloud.points().begin(), cloud.points().end()));
    for (double p : {1.0, 2.0}) {
      const auto cert = coupling::chain_certificate(cloud, p, rng);
      const double exact = convolved_wp_1d(mu, p);
      if (!(exact <= cert.total && cert.total <= cert.closed_form)) ++violations;
    }
  }
  return {"coupling_sandwich", violations == 0,
          fmt::format("{} violations over {} clouds", violations, instances)};
}

CheckResult matching_consistency(const Config& config) {
  auto rng = check_stream(config, "matching");
  int violations = 0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n_atoms = 2 * (1 + rng.below(5));
    const std::size_t d = 1 + rng.below(3);
    Vec pts(n_atoms * d);
    rng.fill_normal(pts);
    const auto cloud = coupling::center_atoms(d, pts);
    for (double p : {1.0, 2.0}) {
      const auto best = coupling::exhaustive_matching(cloud, p);
      const auto rnd = coupling::random_matching_search(cloud, p, rng, 1000);
      const double n = double(cloud.pairs());
      if (rnd.energy > best.energy * (1.0 + 1e-12)) ++violations;
      if (best.energy < n / (2.0 * n - 1.0) * cloud.power_sum(p) * (1.0 - 1e-12)) {
        ++violations;
      }
    }
  }
  return {"matching_consistency", violations == 0,
          fmt::format("{} violations", violations)};
}

// 3-SE zero-mean test of G - grad V along a random direction at 20 points.
int unbiasedness_failures(const GradientEstimator& est, rng::Stream& rng,
                          std::size_t draws, double spread) {
  const std::size_t d = est.dim();
  int failures = 0;
  Vec x(d), u(d), g(d), exact(d);
  for (int point = 0; point < 20; ++point) {
    rng.fill_normal(x);
    for (double& v : x) v *= spread;
    rng.fill_normal(u);
    const double un = norm(u);
    for (double& v : u) v /= un;
    est.potential().gradient(x, exact);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < draws; ++k) {
      est.sample(x, rng, g);
      const double r = dot(u, g) - dot(u, exact);
      const double delta = r - mean;
      mean += delta / double(k + 1);
      m2 += delta * (r - mean);
    }
    const double se = std::sqrt(m2 / double(draws - 1) / double(draws));
    if (std::abs(mean) > 3.0 * se + 1e-12 * (1.0 + norm(exact))) ++failures;
  }
  return failures;
}

CheckResult gradient_unbiasedness(const Config& config) {
  auto rng = check_stream(config, "unbiasedness");
  const auto toy = QuadraticMixturePotential::toy();
  const auto quad = QuadraticPotential::isotropic(16, 1.0);
  const auto blr = make_synthetic_logistic(5, 200, 1.0, 11);
  const Vec q_min = find_mode(blr, Vec(5, 0.0));
  const MinibatchGradient mb1(toy, 1), mb2(toy, 2), mb_blr(blr, 10);
  const NoiseInjectedGradient spike(quad, SpikeNoise{10.0, 16, 0.3});
  const NoiseInjectedGradient gauss(quad, GaussianNoise{2.0});
  const ControlVariateGradient cv(blr, q_min, 10);
  std::string detail;
  int total = 0;
  for (const GradientEstimator* est :
       std::initializer_list<const GradientEstimator*>{&mb1, &mb2, &mb_blr, &spike, &gauss, &cv}) {
    const int f = unbiasedness_failures(*est, rng, 20000, 1.0);
    total += f;
    detail += fmt::format("{}: {} ", est->name(), f);
  }
  return {"gradient_unbiasedness", total == 0, detail + "failing points"};
}

CheckResult control_variate_exactness(const Config& config) {
  auto rng = check_stream(config, "control_variate");
  const auto blr = make_synthetic_logistic(5, 200, 1.0, 11);
  const Vec q_min = find_mode(blr, Vec(5, 0.0));
  const ControlVariateGradient cv(blr, q_min, 10);
  Vec first(5), g(5);
  cv.sample(q_min, rng, first);
  std::size_t differing = 0;
  for (int k = 0; k < 10000; ++k) {
    cv.sample(q_min, rng, g);
    if (g != first) ++differing;
  }
  return {"control_variate_exactness", differing == 0,
          fmt::format("{} of 10000 batches differ at q_min", differing)};
}

CheckResult determinism(const Config& config) {
  Config small = config;
  small.sweep.methods = {Method::kSgUbu, Method::kSgEm};
  small.sweep.h = {0.05, 0.025};
  small.sweep.gamma = {5.0};
  small.sweep.samples = 2000;
  small.sweep.burn_in = 100;
  small.sweep.replicas = 3;
  small.run.allow_out_of_regime = false;
  small.run.threads = 1;
  const std::string one = format_csv(run_bias_sweep(small).rows);
  small.run.threads = 3;
  const std::string three = format_csv(run_bias_sweep(small).rows);
  return {"determinism", one == three,
          one == three ? "CSV identical for 1 and 3 threads"
                       : "CSV differs between 1 and 3 threads"};
}

}  // namespace

const std::vector<VerifyCheck>& verify_checks() {
  static const std::vector<VerifyCheck> checks{
      {"step_coefficient_identity", coefficient_identity},
      {"block_gaussian_covariance", block_gaussian_covariance},
      {"ubu_contraction", ubu_contraction},
      {"sg_ubu_contraction", sg_ubu_contraction},
      {"convolution_dominance", convolution_dominance},
      {"chi2_chain", chi2_chain},
      {"two_component_oracle", lemma_two_component},
      {"coupling_sandwich", coupling_sandwich},
      {"matching_consistency", matching_consistency},
      {"gradient_unbiasedness", gradient_unbiasedness},
      {"control_variate_exactness", control_variate_exactness},
      {"determinism", determinism},
  };
  return checks;
}

VerifyReport run_verify(const Config& config) {
  VerifyReport report;
  for (const auto& check : verify_checks()) {
    try {
      CheckResult r = check.run(config);
      r.name = check.name;
      report.checks.push_back(std::move(r));
    } catch (const std::exception& e) {
      report.checks.push_back({check.name, false, e.what()});
    }
  }
  return report;
}

}  // namespace sgkl::harness
