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


#include "sgkl/bounds.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sgkl/error.hpp"
#include "sgkl/special.hpp"

namespace sgkl {

namespace {

void require_nonnegative(double x, const char* name) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw ParameterError(fmt::format("{} must be finite and >= 0, got {}",
                                     name, x));
  }
}

double truncated_term(double frobenius) {
  return std::sqrt(
      2.0 * std::log1p(exp_quadratic_constant() * frobenius * frobenius));
}

}  // namespace

double general_convolution_bound(double p, double moment_2p, double s) {
  if (!(p >= 1.0)) throw ParameterError("p must be >= 1");
  require_nonnegative(moment_2p, "moment_2p");
  if (!(s > 0.0)) throw ParameterError("scale s must be positive");
  return convolution_prefactor(p) * std::pow(moment_2p, 1.0 / p) /
         std::sqrt(s);
}

double refined_bound(double tau, double frobenius_truncated) {
  require_nonnegative(tau, "tau");
  require_nonnegative(frobenius_truncated, "frobenius norm");
  return tau + std::min(1.0, tau) + truncated_term(frobenius_truncated);
}

double refined_bound_crude(double tau, double frobenius_truncated) {
  require_nonnegative(tau, "tau");
  require_nonnegative(frobenius_truncated, "frobenius norm");
  return 2.0 * tau + truncated_term(frobenius_truncated);
}

double poincare_bound(double poincare_constant, double trace_covariance) {
  require_nonnegative(poincare_constant, "Poincare constant");
  require_nonnegative(trace_covariance, "covariance trace");
  return std::sqrt(poincare_constant * trace_covariance);
}

double poincare_dimension_bound(double poincare_constant, std::size_t dim) {
  require_nonnegative(poincare_constant, "Poincare constant");
  return poincare_constant * std::sqrt(static_cast<double>(dim));
}

double moment_corollary_constant() {
  return 2.0 + std::sqrt(2.0 * exp_quadratic_constant());
}

double moment_corollary_bound(int p, double second_moment,
                              double fourth_moment) {
  require_nonnegative(second_moment, "second moment");
  require_nonnegative(fourth_moment, "fourth moment");
  if (p == 1) return moment_corollary_constant() * second_moment;
  if (p == 2) return moment_corollary_constant() * std::sqrt(fourth_moment);
  throw ParameterError(fmt::format("moment corollary needs p in {{1,2}}, got {}", p));
}

// ---------------------------------------------------------------------------
// Tail statistics.

namespace {

TailStatistics tail_from_weighted(std::span<const double> points,
                                  std::span<const double> weights,
                                  std::size_t dim) {
  const std::size_t n = weights.size();
  TailStatistics t;
  t.dim = dim;
  double total = 0.0;
  for (double w : weights) total += w;
  Vec trunc_mean(dim, 0.0);
  double tail1 = 0.0, tail2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = points.subspan(i * dim, dim);
    const double r2 = norm_squared(x);
    const double w = weights[i] / total;
    if (r2 > 1.0) {
      tail1 += w * std::sqrt(r2);
      tail2 += w * r2;
    } else {
      for (std::size_t k = 0; k < dim; ++k) trunc_mean[k] += w * x[k];
    }
  }
  t.tau1 = tail1;
  t.tau2 = std::sqrt(tail2);
  t.truncated_covariance.assign(dim * dim, 0.0);
  Vec y(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = points.subspan(i * dim, dim);
    const double w = weights[i] / total;
    const bool inside = norm_squared(x) <= 1.0;
    for (std::size_t k = 0; k < dim; ++k) {
      y[k] = (inside ? x[k] : 0.0) - trunc_mean[k];
    }
    for (std::size_t a = 0; a < dim; ++a) {
      if (y[a] == 0.0) continue;
      double* row = &t.truncated_covariance[a * dim];
      const double wa = w * y[a];
      for (std::size_t b = 0; b < dim; ++b) row[b] += wa * y[b];
    }
  }
  double f2 = 0.0;
  for (double c : t.truncated_covariance) f2 += c * c;
  t.frobenius = std::sqrt(f2);
  return t;
}

}  // namespace

TailStatistics tail_and_truncated_cov(const WeightedAtoms& mu) {
  if (mu.size() == 0 || mu.points.size() != mu.size() * mu.dim) {
    throw ParameterError("malformed atom set");
  }
  double total = 0.0;
  Vec mean(mu.dim, 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(mu.weights[i] >= 0.0)) throw ParameterError("negative atom weight");
    total += mu.weights[i];
    const auto x = mu.point(i);
    for (std::size_t k = 0; k < mu.dim; ++k) mean[k] += mu.weights[i] * x[k];
  }
  if (!(total > 0.0)) throw ParameterError("atom set has zero mass");
  for (double& m : mean) m /= total;
  if (norm(mean) > kTolerances.discrete_mean_tolerance) {
    throw ParameterError(
        fmt::format("measure is not centred (|mean| = {})", norm(mean)));
  }
  return tail_from_weighted(mu.points, mu.weights, mu.dim);
}

TailStatistics tail_and_truncated_cov(std::span<const double> samples,
                                      std::size_t dim) {
  if (dim == 0 || samples.empty() || samples.size() % dim != 0) {
    throw ParameterError("sample array is not a multiple of the dimension");
  }
  const std::size_t n = samples.size() / dim;
  if (n < 2) throw ParameterError("need at least two samples");
  Vec mean(dim, 0.0), sq(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < dim; ++k) {
      const double x = samples[i * dim + k];
      mean[k] += x;
      sq[k] += x * x;
    }
  }
  const double nd = static_cast<double>(n);
  for (std::size_t k = 0; k < dim; ++k) {
    const double m = mean[k] / nd;
    const double var = std::max(sq[k] / nd - m * m, 0.0) * nd / (nd - 1.0);
    const double se = std::sqrt(var / nd);
    if (std::abs(m) > 3.0 * se + 1e-300) {
      throw ParameterError(fmt::format(
          "sample is not centred: coordinate {} has mean {} (SE {})", k, m,
          se));
    }
  }
  const Vec weights(n, 1.0);
  return tail_from_weighted(samples, weights, dim);
}

// ---------------------------------------------------------------------------
// chi^2 chain.

double Chi2Result::transport_bound() const {
  return std::sqrt(2.0 * std::log1p(chi2));
}

Chi2Result chi2_convolution(const WeightedAtoms& mu) {
  if (mu.size() == 0 || mu.points.size() != mu.size() * mu.dim) {
    throw ParameterError("malformed atom set");
  }
  double total = 0.0;
  Vec mean(mu.dim, 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto x = mu.point(i);
    if (norm(x) > 2.0) {
      throw ParameterError(fmt::format(
          "atom {} has norm {} > 2; the chi^2 bound does not apply", i,
          norm(x)));
    }
    total += mu.weights[i];
    for (std::size_t k = 0; k < mu.dim; ++k) mean[k] += mu.weights[i] * x[k];
  }
  for (double& m : mean) m /= total;
  if (norm(mean) > kTolerances.discrete_mean_tolerance) {
    throw ParameterError("measure is not centred");
  }
  // E exp(<X', X''>) - 1 = sum_ij w_i w_j (exp(<x_i,x_j>) - 1), and
  // |Cov|_F^2 = sum_ij w_i w_j <x_i,x_j>^2.
  double chi2 = 0.0, frob2 = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double wi = mu.weights[i] / total;
    for (std::size_t j = 0; j < mu.size(); ++j) {
      const double wj = mu.weights[j] / total;
      const double ip = dot(mu.point(i), mu.point(j));
      chi2 += wi * wj * std::expm1(ip);
      frob2 += wi * wj * ip * ip;
    }
  }
  Chi2Result out{std::max(chi2, 0.0), exp_quadratic_constant() * frob2};
  if (out.chi2 > out.bound * (1.0 + 1e-12) + 1e-15) {
    throw InvariantError(fmt::format(
        "chi^2 = {} exceeds c4 |Sigma|_F^2 = {}", out.chi2, out.bound));
  }
  return out;
}

double convolved_wp_1d(const WeightedAtoms& mu, double p,
                       std::size_t n_quadrature) {
  if (mu.dim != 1) throw ParameterError("convolved_wp_1d needs 1-D atoms");
  double total = 0.0;
  for (double w : mu.weights) total += w;
  std::vector<MixtureComponent> comps;
  comps.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu.weights[i] > 0.0) {
      comps.push_back({mu.weights[i] / total, mu.points[i], 1.0});
    }
  }
  // Renormalize exactly to protect the weight-sum check.
  double s = 0.0;
  for (const auto& c : comps) s += c.weight;
  for (auto& c : comps) c.weight /= s;
  return wp_quantile_1d(mixture_quantile_fn(std::move(comps)),
                        [](double u) { return normal_quantile(u); }, p,
                        n_quadrature);
}

// ---------------------------------------------------------------------------
// Bias bound.

void check_bias_regime(const BiasBoundInputs& in) {
  if (!(in.h > 0.0)) throw ParameterError("stepsize h must be positive");
  if (!(in.gamma > 0.0)) throw ParameterError("friction must be positive");
  if (!(in.m > 0.0) || !(in.L >= in.m)) {
    throw ParameterError("need 0 < m <= L");
  }
  require_nonnegative(in.c_g, "C_G");
  require_nonnegative(in.sigma_p, "sigma_p");
  require_nonnegative(in.convolution_term, "convolution term");
  if (in.p != 1 && in.p != 2) throw ParameterError("p must be 1 or 2");
  if (in.gamma * in.gamma < 8.0 * in.L * (1.0 - 1e-12)) {
    throw ParameterError(fmt::format(
        "friction constraint gamma >= sqrt(8L) violated (gamma={}, "
        "sqrt(8L)={})",
        in.gamma, std::sqrt(8.0 * in.L)));
  }
  if (!(in.h < 1.0 / (2.0 * in.gamma))) {
    throw ParameterError(fmt::format(
        "stepsize constraint h < 1/(2 gamma) violated (h={}, 1/(2 gamma)={})",
        in.h, 1.0 / (2.0 * in.gamma)));
  }
  if (in.c_g > 0.0) {
    const double limit = in.m * in.L / (20.0 * in.c_g * in.gamma);
    if (!(in.h < limit)) {
      throw ParameterError(fmt::format(
          "stepsize constraint h < mL/(20 C_G gamma) violated (h={}, "
          "mL/(20 C_G gamma)={})",
          in.h, limit));
    }
  }
}

double sg_ubu_bias_bound(const BiasBoundInputs& in) {
  check_bias_regime(in);
  const double sd = std::sqrt(static_cast<double>(in.d));
  const double sl = std::sqrt(in.L);
  const double pre =
      in.gamma * in.L * in.h / (in.m * in.L - 20.0 * in.h * in.c_g * in.gamma);
  const double bracket =
      33.0 * sd * (sl + in.gamma) +
      5.0 * (3.0 * std::sqrt(in.c_g) * sd / sl + 3.0 * in.sigma_p +
             in.convolution_term);
  return pre * bracket;
}

std::string_view to_string(PlugInVariant v) {
  switch (v) {
    case PlugInVariant::kMoment:
      return "moment";
    case PlugInVariant::kPoincare:
      return "poincare";
    case PlugInVariant::kSecondMoment:
      return "second_moment";
  }
  return "?";
}

namespace {

template <class T>
T need(const std::optional<T>& v, const char* name, PlugInVariant variant) {
  if (!v) {
    throw ParameterError(fmt::format("plug-in variant '{}' needs {}",
                                     to_string(variant), name));
  }
  return *v;
}

}  // namespace

double plug_in_term(PlugInVariant variant, const PlugInParams& p) {
  if (!(p.L > 0.0)) throw ParameterError("plug-in term needs L > 0");
  const double sl = std::sqrt(p.L);
  switch (variant) {
    case PlugInVariant::kMoment: {
      const double s = need(p.sigma_2p, "sigma_2p", variant);
      require_nonnegative(s, "sigma_2p");
      return 126.0 * s * s / sl;
    }
    case PlugInVariant::kPoincare: {
      const double integral =
          need(p.poincare_trace_integral, "poincare_trace_integral", variant);
      require_nonnegative(integral, "Poincare trace integral");
      return 4.0 * std::sqrt(integral) / sl;
    }
    case PlugInVariant::kSecondMoment: {
      const double tau = need(p.tau_y, "tau_y", variant);
      const double lam2 =
          need(p.lambda_max_sq_mean, "lambda_max_sq_mean", variant);
      const double h = need(p.h, "h", variant);
      const double gamma = need(p.gamma, "gamma", variant);
      const std::size_t d = need(p.d, "d", variant);
      require_nonnegative(tau, "tau_y");
      require_nonnegative(lam2, "lambda_max_sq_mean");
      if (!(h > 0.0) || !(gamma > 0.0)) {
        throw ParameterError("h and gamma must be positive");
      }
      return 8.0 * tau / (h * h * sl) +
             10.0 * std::exp(-h * gamma) * std::sqrt(static_cast<double>(d)) *
                 std::sqrt(lam2) / sl;
    }
  }
  throw ParameterError("unknown plug-in variant");
}

// ---------------------------------------------------------------------------

double contraction_factor(double h, double gamma, double m, double L,
                          double c_g, std::size_t n) {
  if (!(h > 0.0) || !(gamma > 0.0) || !(m > 0.0) || !(L >= m)) {
    throw ParameterError("contraction factor needs h, gamma, m > 0, L >= m");
  }
  require_nonnegative(c_g, "C_G");
  if (gamma * gamma < 8.0 * L * (1.0 - 1e-12)) {
    throw ParameterError("friction constraint gamma >= sqrt(8L) violated");
  }
  if (!(h < 1.0 / (2.0 * gamma))) {
    throw ParameterError("stepsize constraint h < 1/(2 gamma) violated");
  }
  if (c_g > 0.0 && !(h < m * L / (20.0 * c_g * gamma))) {
    throw ParameterError("stepsize constraint h < mL/(20 C_G gamma) violated");
  }
  const double base = 1.0 - m * h / (4.0 * gamma) + 5.0 * h * h * c_g / L;
  if (!(base <= 1.0)) {
    throw ParameterError(
        fmt::format("contraction base {} exceeds 1", base));
  }
  return std::pow(base, 0.5 * static_cast<double>(n));
}

SpikeLowerBound spike_lower_bound(double s, std::size_t d) {
  if (d < 2) throw ParameterError("spike bound needs d >= 2");
  if (!(s > 0.0)) throw ParameterError("spike scale must be positive");
  const double r = std::sqrt(2.0 * std::log(static_cast<double>(d)));
  return {std::max(0.0, 0.5 * s - r), s >= 4.0 * r * (1.0 - 1e-15)};
}

}  // namespace sgkl
