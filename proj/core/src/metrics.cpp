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


#include "sgkl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "sgkl/error.hpp"
#include "sgkl/special.hpp"

namespace sgkl {

SortedSample::SortedSample(Vec values) : values_(std::move(values)) {
  if (values_.empty()) throw ParameterError("empty sample");
  if (!all_finite(values_)) throw ParameterError("non-finite sample value");
  std::sort(values_.begin(), values_.end());
}

namespace {

void check_sizes(const SortedSample& xs, const SortedSample& ys) {
  if (xs.size() != ys.size()) {
    throw ParameterError(fmt::format("sample sizes differ: {} vs {}",
                                     xs.size(), ys.size()));
  }
}

}  // namespace

double w1_sorted(const SortedSample& xs, const SortedSample& ys) {
  check_sizes(xs, ys);
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) s += std::abs(xs[i] - ys[i]);
  return s / static_cast<double>(xs.size());
}

double w2_sorted(const SortedSample& xs, const SortedSample& ys) {
  check_sizes(xs, ys);
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - ys[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(xs.size()));
}

double wp_sorted(const SortedSample& xs, const SortedSample& ys, double p) {
  if (!(p >= 1.0)) throw ParameterError("p must be >= 1");
  if (p == 1.0) return w1_sorted(xs, ys);
  if (p == 2.0) return w2_sorted(xs, ys);
  check_sizes(xs, ys);
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    s += std::pow(std::abs(xs[i] - ys[i]), p);
  }
  return std::pow(s / static_cast<double>(xs.size()), 1.0 / p);
}

double w1_to_normal(const SortedSample& xs, double mean, double sd) {
  if (!(sd > 0.0) || !std::isfinite(mean)) {
    throw ParameterError("w1_to_normal needs finite mean and sd > 0");
  }
  const std::size_t n = xs.size();
  const double dn = static_cast<double>(n);
  // P(u) = -phi(Phi^{-1}(u)) is an antiderivative of Phi^{-1}.
  auto antiderivative = [](double u) {
    return (u <= 0.0 || u >= 1.0) ? 0.0 : -normal_pdf(normal_quantile(u));
  };
  double total = 0.0;
  double p_lo = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = double(i) / dn, b = double(i + 1) / dn;
    const double p_hi = antiderivative(b);
    const double z = (xs[i] - mean) / sd;
    const double c = normal_cdf(z);
    double m, p_m;
    if (c <= a) {
      m = a;
      p_m = p_lo;
    } else if (c >= b) {
      m = b;
      p_m = p_hi;
    } else {
      m = c;
      p_m = -normal_pdf(z);
    }
    total += z * (m - a) - (p_m - p_lo) + (p_hi - p_m) - z * (b - m);
    p_lo = p_hi;
  }
  return sd * total;
}

double wp_quantile_1d(const QuantileFn& quantile_p, const QuantileFn& quantile_q,
                      double p, std::size_t n_quadrature) {
  if (!(p >= 1.0)) throw ParameterError("p must be >= 1");
  if (n_quadrature == 0) throw ParameterError("need at least one node");
  const double n = static_cast<double>(n_quadrature);
  double s = 0.0;
  for (std::size_t i = 0; i < n_quadrature; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / n;
    const double a = quantile_p(u);
    const double b = quantile_q(u);
    if (!std::isfinite(a) || !std::isfinite(b)) {
      throw NumericError(fmt::format("non-finite quantile at u = {}", u));
    }
    s += std::pow(std::abs(a - b), p);
  }
  return std::pow(s / n, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Gaussian mixtures.

double mixture_cdf(std::span<const MixtureComponent> components, double x) {
  double s = 0.0;
  for (const auto& c : components) {
    s += c.weight * normal_cdf((x - c.mean) / c.stdev);
  }
  return s;
}

double mixture_pdf(std::span<const MixtureComponent> components, double x) {
  double s = 0.0;
  for (const auto& c : components) {
    s += c.weight * normal_pdf((x - c.mean) / c.stdev) / c.stdev;
  }
  return s;
}

namespace {

void validate_mixture(std::span<const MixtureComponent> components) {
  if (components.empty()) throw ParameterError("empty mixture");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight >= 0.0) || !(c.stdev > 0.0) || !std::isfinite(c.mean)) {
      throw ParameterError("invalid mixture component");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > kTolerances.atom_sum_tolerance) {
    throw ParameterError(
        fmt::format("mixture weights sum to {}, expected 1", total));
  }
}

}  // namespace

double mixture_quantile(std::span<const MixtureComponent> components,
                        double u) {
  validate_mixture(components);
  if (!(u > 0.0 && u < 1.0)) {
    throw ParameterError(fmt::format("quantile level {} outside (0,1)", u));
  }
  double mean = 0.0, max_sd = 0.0;
  for (const auto& c : components) {
    mean += c.weight * c.mean;
    max_sd = std::max(max_sd, c.stdev);
  }
  const double width0 = kTolerances.bracket_width_stdevs * max_sd;
  double lo = mean - width0, hi = mean + width0;
  double step = width0;
  std::size_t expansions = 0;
  while (mixture_cdf(components, lo) > u) {
    if (++expansions > kTolerances.bracket_expansions) {
      throw NumericError("quantile bracket expansion failed");
    }
    lo -= step;
    step *= 2.0;
  }
  step = width0;
  while (mixture_cdf(components, hi) < u) {
    if (++expansions > kTolerances.bracket_expansions) {
      throw NumericError("quantile bracket expansion failed");
    }
    hi += step;
    step *= 2.0;
  }

  const double tol = kTolerances.quantile_tolerance;
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400 && hi - lo > tol; ++iter) {
    const double r = mixture_cdf(components, x) - u;
    if (r == 0.0) return x;
    if (r > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double f = mixture_pdf(components, x);
    double next = f > 0.0 ? x - r / f : lo - 1.0;
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    } else if (std::abs(next - x) < 0.25 * tol) {
      return next;
    }
    x = next;
  }
  return x;
}

QuantileFn mixture_quantile_fn(std::vector<MixtureComponent> components) {
  validate_mixture(components);
  return [c = std::move(components)](double u) {
    return mixture_quantile(c, u);
  };
}

// ---------------------------------------------------------------------------
// Twisted norm.

WeightedNorm::WeightedNorm(double a_in, double b_in) : a(a_in), b(b_in) {
  if (!(a > 0.0) || !(b >= 0.0) || !(b * b < a)) {
    throw ParameterError(fmt::format(
        "weighted norm needs a > 0, b >= 0, b^2 < a; got a={}, b={}", a, b));
  }
}

WeightedNorm WeightedNorm::for_target(double smoothness, double gamma) {
  if (!(smoothness > 0.0) || !(gamma > 0.0)) {
    throw ParameterError("smoothness and friction must be positive");
  }
  return WeightedNorm(1.0 / smoothness, 1.0 / gamma);
}

double WeightedNorm::squared(std::span<const double> x,
                             std::span<const double> v) const {
  if (x.size() != v.size()) throw ParameterError("x and v differ in size");
  double xx = 0.0, xv = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx += x[i] * x[i];
    xv += x[i] * v[i];
    vv += v[i] * v[i];
  }
  return xx + 2.0 * b * xv + a * vv;
}

double WeightedNorm::operator()(std::span<const double> x,
                                std::span<const double> v) const {
  return std::sqrt(squared(x, v));
}

double weighted_norm_squared(std::span<const double> x,
                             std::span<const double> v, double a, double b) {
  return WeightedNorm(a, b).squared(x, v);
}

double weighted_norm(std::span<const double> x, std::span<const double> v,
                     double a, double b) {
  return WeightedNorm(a, b)(x, v);
}

// ---------------------------------------------------------------------------
// Test functions.

double f_k(std::span<const double> x, std::size_t k) {
  if (k < 1 || k > x.size()) {
    throw ParameterError(
        fmt::format("f_k needs 1 <= k <= d, got k={}, d={}", k, x.size()));
  }
  Vec sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = x[i] * x[i];
  std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   sq.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += sq[i];
  return std::sqrt(s);
}

double max_coordinate(std::span<const double> x) {
  if (x.empty()) throw ParameterError("max_coordinate of empty vector");
  return *std::max_element(x.begin(), x.end());
}

WeightedAtoms WeightedAtoms::uniform(std::size_t dim, Vec points) {
  if (dim == 0 || points.size() % dim != 0) {
    throw ParameterError("point array is not a multiple of the dimension");
  }
  const std::size_t n = points.size() / dim;
  WeightedAtoms out{dim, std::move(points), Vec(n, 1.0 / static_cast<double>(n))};
  return out;
}

}  // namespace sgkl
