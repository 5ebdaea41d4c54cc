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

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sgkl/tolerances.hpp"
#include "sgkl/vector_ops.hpp"

namespace sgkl {

// Nondecreasing scalar sample, n >= 1.
class SortedSample {
 public:
  // Sorts `values`. Throws ParameterError when empty or non-finite.
  explicit SortedSample(Vec values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  Vec values_;
};

// Order-statistic distances between two empirical measures of equal size.
double w1_sorted(const SortedSample& xs, const SortedSample& ys);
double w2_sorted(const SortedSample& xs, const SortedSample& ys);
double wp_sorted(const SortedSample& xs, const SortedSample& ys, double p);

// Quantile function u -> F^{-1}(u) on (0, 1).
// Exact W1 between the empirical measure of xs and N(mean, sd^2), integrating
// |Q_n(u) - Q(u)| over each 1/n block in closed form.
double w1_to_normal(const SortedSample& xs, double mean, double sd);

using QuantileFn = std::function<double(double)>;

// (int_0^1 |F_P^{-1}(u) - F_Q^{-1}(u)|^p du)^{1/p}, midpoint rule.
double wp_quantile_1d(const QuantileFn& quantile_p, const QuantileFn& quantile_q,
                      double p,
                      std::size_t n_quadrature = kTolerances.quadrature_nodes);

struct MixtureComponent {
  double weight = 1.0;
  double mean = 0.0;
  double stdev = 1.0;
};

double mixture_cdf(std::span<const MixtureComponent> components, double x);
double mixture_pdf(std::span<const MixtureComponent> components, double x);

// Inverse CDF of a finite Gaussian mixture to absolute tolerance
// kTolerances.quantile_tolerance. Safeguarded Newton inside a bisection
// bracket; the bracket is mean +- 10 max-stdev, expanded geometrically.
double mixture_quantile(std::span<const MixtureComponent> components, double u);

QuantileFn mixture_quantile_fn(std::vector<MixtureComponent> components);

// ||z||_{a,b}^2 = |x|^2 + 2b <x,v> + a |v|^2, requires a > 0, 0 <= b, b^2 < a.
struct WeightedNorm {
  double a = 1.0;
  double b = 0.0;

  WeightedNorm(double a, double b);
  // a = 1/L, b = 1/gamma.
  static WeightedNorm for_target(double smoothness, double gamma);

  double squared(std::span<const double> x, std::span<const double> v) const;
  double operator()(std::span<const double> x, std::span<const double> v) const;
  // b^2 < a/4, the range in which the norm-equivalence sandwich holds.
  bool equivalence_regime() const { return 4.0 * b * b < a; }
};

double weighted_norm_squared(std::span<const double> x,
                             std::span<const double> v, double a, double b);
double weighted_norm(std::span<const double> x, std::span<const double> v,
                     double a, double b);

// Euclidean norm of the k largest-magnitude coordinates, 1 <= k <= d.
double f_k(std::span<const double> x, std::size_t k);

// max_i x_i (signed).
double max_coordinate(std::span<const double> x);

// Weighted atoms in R^dim, points stored row-major.
struct WeightedAtoms {
  std::size_t dim = 1;
  Vec points;
  Vec weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    return std::span<const double>(points).subspan(i * dim, dim);
  }
  static WeightedAtoms uniform(std::size_t dim, Vec points);
};

// Exact W_p between two discrete measures (at most
// kTolerances.exact_transport_max_atoms atoms each) of equal total mass,
// solved as a min-cost flow. The cost is normalized by the total mass.
double exact_wp_small(const WeightedAtoms& xs, const WeightedAtoms& ys,
                      double p);

}  // namespace sgkl
