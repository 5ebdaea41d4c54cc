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
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sgkl/model.hpp"
#include "sgkl/rng.hpp"

namespace sgkl {

// Unbiased stochastic gradient G(x, omega) with E_omega G(x, omega) =
// grad V(x). Each call to sample() draws a fresh omega from the supplied
// stream; copying the stream beforehand replays the same omega.
//
// Estimators keep a reference to their potential, which must outlive them.
class GradientEstimator {
 public:
  virtual ~GradientEstimator() = default;

  virtual const Potential& potential() const = 0;
  virtual void sample(std::span<const double> x, rng::Stream& rng,
                      std::span<double> out) const = 0;
  virtual std::string name() const = 0;

  // sup_x E |D_x G(x, omega) - Hess V(x)|_op^2, when known in closed form.
  virtual std::optional<double> jacobian_variance() const {
    return std::nullopt;
  }
  // c such that Cov(G(x, .) - grad V(x)) = c I for every x, when known.
  virtual std::optional<double> isotropic_noise_variance() const {
    return std::nullopt;
  }

  std::size_t dim() const { return potential().dim(); }
};

// G(x, omega) = grad V(x).
class ExactGradient final : public GradientEstimator {
 public:
  explicit ExactGradient(const Potential& potential) : potential_(potential) {}

  const Potential& potential() const override { return potential_; }
  void sample(std::span<const double> x, rng::Stream&,
              std::span<double> out) const override {
    potential_.gradient(x, out);
  }
  std::string name() const override { return "exact"; }
  std::optional<double> jacobian_variance() const override { return 0.0; }
  std::optional<double> isotropic_noise_variance() const override {
    return 0.0;
  }

 private:
  const Potential& potential_;
};

// Robbins-Monro minibatching with replacement:
//   G(x, B) = grad base(x) + (K / b) sum_{i in B} grad U_i(x).
class MinibatchGradient final : public GradientEstimator {
 public:
  MinibatchGradient(const SumPotential& potential, std::size_t batch_size);

  const Potential& potential() const override { return potential_; }
  void sample(std::span<const double> x, rng::Stream& rng,
              std::span<double> out) const override;
  std::string name() const override;
  std::optional<double> jacobian_variance() const override {
    return jacobian_variance_;
  }

  // Deterministic evaluation for a given batch (indices may repeat).
  void evaluate(std::span<const double> x, std::span<const std::size_t> batch,
                std::span<double> out) const;

  std::size_t batch_size() const { return batch_size_; }

 private:
  const SumPotential& potential_;
  std::size_t batch_size_;
  std::optional<double> jacobian_variance_;
};

// One-shot form of MinibatchGradient::sample.
Vec minibatch_gradient(const SumPotential& potential,
                       std::span<const double> x, std::size_t batch_size,
                       rng::Stream& rng);

// Exact C_G for a minibatched quadratic mixture, by enumerating all K^b
// ordered batches.
double quadratic_mixture_jacobian_variance(
    const QuadraticMixturePotential& potential, std::size_t batch_size);

// ---------------------------------------------------------------------------
// Additive noise laws.

struct ZeroNoise {};

// N(0, c^2 I).
struct GaussianNoise {
  double scale = 0.0;
};

// mu_{s,d,p} = (1 - p) delta_0 + p * uniform{+-s e_i}.
struct SpikeNoise {
  double scale = 1.0;
  std::size_t dim = 2;
  double probability = 1.0;
};

using NoiseLaw = std::variant<ZeroNoise, GaussianNoise, SpikeNoise>;

// Per-coordinate variance c of the isotropic covariance c I of the law.
double noise_variance(const NoiseLaw& law);
void sample_noise(const NoiseLaw& law, rng::Stream& rng, std::span<double> out);
std::string describe(const NoiseLaw& law);

// Draws from mu_{s,d,p}. Requires d >= 2, s > 0, 0 <= p <= 1.
void sample_spike(double s, std::size_t d, double p, rng::Stream& rng,
                  std::span<double> out);

// G(x, xi) = grad V(x) + xi, xi ~ law, independent of x. D_x G = Hess V, so
// the Jacobian-variance constant is recorded as 0.
class NoiseInjectedGradient final : public GradientEstimator {
 public:
  NoiseInjectedGradient(const Potential& potential, NoiseLaw law);

  const Potential& potential() const override { return potential_; }
  void sample(std::span<const double> x, rng::Stream& rng,
              std::span<double> out) const override;
  std::string name() const override;
  std::optional<double> jacobian_variance() const override { return 0.0; }
  std::optional<double> isotropic_noise_variance() const override {
    return noise_variance(law_);
  }
  const NoiseLaw& law() const { return law_; }

 private:
  const Potential& potential_;
  NoiseLaw law_;
};

Vec noise_injected_gradient(const Potential& potential, const NoiseLaw& law,
                            std::span<const double> x, rng::Stream& rng);

// ---------------------------------------------------------------------------
// Control variates for logistic regression, recentred at q_min:
//   G(q) = q / s^2 + grad l(q_min) + (N / b) sum_{i in B} (grad l_i(q) -
//   grad l_i(q_min)),
// where grad l(q_min) = sum_i grad l_i(q_min).

// Sum over all observations of grad l_i(q_min).
Vec full_likelihood_gradient(const LogisticRegressionPotential& blr,
                             std::span<const double> q);

void control_variate_gradient(const LogisticRegressionPotential& blr,
                              std::span<const double> q,
                              std::span<const double> q_min,
                              std::span<const double> full_grad_at_min,
                              std::span<const std::size_t> batch,
                              std::span<double> out);

class ControlVariateGradient final : public GradientEstimator {
 public:
  ControlVariateGradient(const LogisticRegressionPotential& blr, Vec q_min,
                         std::size_t batch_size);

  const Potential& potential() const override { return blr_; }
  void sample(std::span<const double> x, rng::Stream& rng,
              std::span<double> out) const override;
  std::string name() const override;

  const Vec& anchor() const { return q_min_; }
  const Vec& anchor_gradient() const { return full_grad_at_min_; }
  std::size_t batch_size() const { return batch_size_; }

 private:
  const LogisticRegressionPotential& blr_;
  Vec q_min_;
  Vec full_grad_at_min_;
  std::size_t batch_size_;
};

// ---------------------------------------------------------------------------
// Noise statistics.

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

using TargetSampler = std::function<void(rng::Stream&, std::span<double>)>;

// sigma_p = (E_{X~pi, omega} |G(X, omega) - grad V(X)|^p)^{1/p}, by Monte
// Carlo; the standard error comes from the delta method.
Estimate estimate_sigma_p(const GradientEstimator& estimator,
                          const TargetSampler& target, double p,
                          std::size_t n_samples, rng::Stream& rng);

// Monte Carlo C_G: for each probe x, average |D_x G(x, omega) - Hess V(x)|^2_op
// over n_omega draws; return the maximum over probes. Jacobians come from
// central differences with omega held fixed.
double estimate_jacobian_variance(const GradientEstimator& estimator,
                                  std::span<const Vec> probes,
                                  std::size_t n_omega, rng::Stream& rng,
                                  double fd_step = 1e-5);

}  // namespace sgkl
