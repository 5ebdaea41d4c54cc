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
#include <cstdint>
#include <span>
#include <vector>

#include "sgkl/tolerances.hpp"
#include "sgkl/vector_ops.hpp"

namespace sgkl {

// Target potential V with pi(dx) ∝ exp(-V(x)) dx, plus the curvature bounds
// m I <= Hess V <= L I that the bound evaluators consume. Potentials are
// immutable after construction and may be shared by concurrent chains.
class Potential {
 public:
  virtual ~Potential() = default;

  virtual std::size_t dim() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x,
                        std::span<double> out) const = 0;

  Vec gradient(std::span<const double> x) const {
    Vec g(dim());
    gradient(x, g);
    return g;
  }

  double strong_convexity() const { return m_; }
  double smoothness() const { return L_; }
  double condition_number() const { return L_ / m_; }

 protected:
  Potential(double m, double L);

 private:
  double m_;
  double L_;
};

// V(x) = base(x) + sum_i U_i(x). Minibatch estimators subsample the U_i.
class SumPotential : public Potential {
 public:
  virtual std::size_t component_count() const = 0;
  // Writes grad U_i(x) into out.
  virtual void component_gradient(std::size_t i, std::span<const double> x,
                                  std::span<double> out) const = 0;
  // Writes the gradient of the part that is never subsampled.
  virtual void base_gradient(std::span<const double> x,
                             std::span<double> out) const = 0;

  void gradient(std::span<const double> x,
                std::span<double> out) const override;
  using Potential::gradient;

 protected:
  using Potential::Potential;
};

// V(x) = 1/2 sum_j lambda_j (x_j - c_j)^2, m = min lambda, L = max lambda.
class QuadraticPotential final : public Potential {
 public:
  QuadraticPotential(Vec precisions, Vec center);
  // Isotropic lambda I centred at zero.
  static QuadraticPotential isotropic(std::size_t dim, double precision = 1.0);

  std::size_t dim() const override { return precisions_.size(); }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x,
                std::span<double> out) const override;
  using Potential::gradient;

  const Vec& precisions() const { return precisions_; }
  const Vec& center() const { return center_; }

 private:
  Vec precisions_;
  Vec center_;
};

// One-dimensional sum of U_i(x) = (x - x_i)^2 / sigma_i^2. No factor 1/2.
class QuadraticMixturePotential final : public SumPotential {
 public:
  QuadraticMixturePotential(Vec centers, Vec widths);

  // x = (-1, 1), sigma = (0.5, 2).
  static QuadraticMixturePotential toy();

  std::size_t dim() const override { return 1; }
  double value(std::span<const double> x) const override;
  std::size_t component_count() const override { return centers_.size(); }
  void component_gradient(std::size_t i, std::span<const double> x,
                          std::span<double> out) const override;
  void base_gradient(std::span<const double> x,
                     std::span<double> out) const override;

  // Second derivative of U_i (constant).
  double component_curvature(std::size_t i) const;

  const Vec& centers() const { return centers_; }
  const Vec& widths() const { return widths_; }

 private:
  Vec centers_;
  Vec widths_;
};

struct GaussianMoments {
  double mean;
  double variance;
};

// Mean and variance of the Gaussian ∝ exp(-sum U_i), by completing the square.
GaussianMoments toy_target_moments(const QuadraticMixturePotential& toy);

// U(q) = |q|^2/(2 s^2) + sum_i [log(1 + exp(x_i.q)) - y_i x_i.q].
// Components are the per-observation losses l_i; the prior is the base.
class LogisticRegressionPotential final : public SumPotential {
 public:
  // features: row-major, rows.size() == labels.size() * dim.
  LogisticRegressionPotential(std::size_t dim, Vec features,
                              std::vector<std::uint8_t> labels,
                              double prior_variance);

  std::size_t dim() const override { return dim_; }
  double value(std::span<const double> q) const override;
  std::size_t component_count() const override { return labels_.size(); }
  void component_gradient(std::size_t i, std::span<const double> q,
                          std::span<double> out) const override;
  void base_gradient(std::span<const double> q,
                     std::span<double> out) const override;

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  std::uint8_t label(std::size_t i) const { return labels_[i]; }
  double prior_variance() const { return prior_variance_; }
  std::size_t observations() const { return labels_.size(); }

  // Largest eigenvalue of Hess U(q), by power iteration.
  double hessian_max_eigenvalue(std::span<const double> q) const;

 private:
  std::size_t dim_;
  Vec features_;
  std::vector<std::uint8_t> labels_;
  double prior_variance_;
};

// Synthetic design: x_ij ~ N(0,1), q* ~ N(0, I/d), y ~ Bernoulli(sigmoid(x.q*)).
LogisticRegressionPotential make_synthetic_logistic(std::size_t dim,
                                                    std::size_t observations,
                                                    double prior_variance,
                                                    std::uint64_t seed);

struct ModeOptions {
  double tolerance = kTolerances.mode_tolerance;
  std::size_t max_iterations = kTolerances.mode_max_iterations;
};

// Gradient descent with Armijo backtracking (halving). Returns q with
// |grad V(q)| <= tolerance, or throws NonConvergenceError with the last
// iterate.
Vec find_mode(const Potential& potential, std::span<const double> x0,
              const ModeOptions& options = {});

// Power iteration for the top eigenvalue of a symmetric PSD operator.
template <typename Apply>
double power_iteration(std::size_t dim, Apply&& apply,
                       std::size_t iterations = 500, double rel_tol = 1e-12);

}  // namespace sgkl

#include "sgkl/detail/power_iteration.hpp"
