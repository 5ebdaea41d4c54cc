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

#include "sgkl/gradients.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sgkl/error.hpp"

namespace sgkl {

// ---------------------------------------------------------------------------
// Minibatching.

MinibatchGradient::MinibatchGradient(const SumPotential& potential,
                                     std::size_t batch_size)
    : potential_(potential), batch_size_(batch_size) {
  if (batch_size < 1 || batch_size > potential.component_count()) {
    throw ParameterError(fmt::format(
        "minibatch size must lie in [1, {}], got {}",
        potential.component_count(), batch_size));
  }
  if (const auto* toy =
          dynamic_cast<const QuadraticMixturePotential*>(&potential)) {
    jacobian_variance_ = quadratic_mixture_jacobian_variance(*toy, batch_size);
  }
}

void MinibatchGradient::evaluate(std::span<const double> x,
                                 std::span<const std::size_t> batch,
                                 std::span<double> out) const {
  if (batch.empty()) throw ParameterError("minibatch: empty batch");
  const std::size_t d = potential_.dim();
  const double scale = static_cast<double>(potential_.component_count()) /
                       static_cast<double>(batch.size());
  Vec acc(d, 0.0), g(d);
  for (std::size_t i : batch) {
    potential_.component_gradient(i, x, g);
    for (std::size_t j = 0; j < d; ++j) acc[j] += g[j];
  }
  potential_.base_gradient(x, out);
  for (std::size_t j = 0; j < d; ++j) out[j] += scale * acc[j];
}

void MinibatchGradient::sample(std::span<const double> x, rng::Stream& rng,
                               std::span<double> out) const {
  const std::size_t K = potential_.component_count();
  if (batch_size_ == K && K == 1) {
    potential_.gradient(x, out);
    return;
  }
  std::vector<std::size_t> batch(batch_size_);
  for (auto& i : batch) i = static_cast<std::size_t>(rng.below(K));
  evaluate(x, batch, out);
}

std::string MinibatchGradient::name() const {
  return fmt::format("minibatch(b={})", batch_size_);
}

Vec minibatch_gradient(const SumPotential& potential,
                       std::span<const double> x, std::size_t batch_size,
                       rng::Stream& rng) {
  MinibatchGradient est(potential, batch_size);
  Vec out(potential.dim());
  est.sample(x, rng, out);
  return out;
}

double quadratic_mixture_jacobian_variance(
    const QuadraticMixturePotential& potential, std::size_t batch_size) {
  const std::size_t K = potential.component_count();
  if (batch_size < 1) throw ParameterError("batch size must be >= 1");
  double total_curvature = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    total_curvature += potential.component_curvature(i);
  }
  const double count = std::pow(static_cast<double>(K), double(batch_size));
  if (count > 1e7) {
    throw ParameterError("quadratic_mixture_jacobian_variance: K^b too large "
                         "to enumerate");
  }
  // Odometer over all ordered batches.
  std::vector<std::size_t> idx(batch_size, 0);
  const double scale = double(K) / double(batch_size);
  double sum = 0.0;
  std::size_t n = 0;
  while (true) {
    double jac = 0.0;
    for (std::size_t i : idx) jac += potential.component_curvature(i);
    const double diff = scale * jac - total_curvature;
    sum += diff * diff;
    ++n;
    std::size_t pos = 0;
    while (pos < batch_size && ++idx[pos] == K) idx[pos++] = 0;
    if (pos == batch_size) break;
  }
  return sum / double(n);
}

// ---------------------------------------------------------------------------
// Noise laws.

void sample_spike(double s, std::size_t d, double p, rng::Stream& rng,
                  std::span<double> out) {
  if (d < 2 || !(s > 0.0) || !(p >= 0.0 && p <= 1.0) || out.size() != d) {
    throw ParameterError(fmt::format(
        "spike law requires d >= 2, s > 0, p in [0,1] (d={}, s={}, p={})", d,
        s, p));
  }
  std::fill(out.begin(), out.end(), 0.0);
  if (p < 1.0 && !(rng.uniform() < p)) return;
  const auto i = static_cast<std::size_t>(rng.below(d));
  out[i] = rng.coin() ? s : -s;
}

double noise_variance(const NoiseLaw& law) {
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ZeroNoise>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, GaussianNoise>) {
          return l.scale * l.scale;
        } else {
          return l.probability * l.scale * l.scale / double(l.dim);
        }
      },
      law);
}

void sample_noise(const NoiseLaw& law, rng::Stream& rng,
                  std::span<double> out) {
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ZeroNoise>) {
          std::fill(out.begin(), out.end(), 0.0);
        } else if constexpr (std::is_same_v<T, GaussianNoise>) {
          for (double& x : out) x = l.scale * rng.normal();
        } else {
          sample_spike(l.scale, l.dim, l.probability, rng, out);
        }
      },
      law);
}

std::string describe(const NoiseLaw& law) {
  return std::visit(
      [](const auto& l) -> std::string {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ZeroNoise>) {
          return "zero";
        } else if constexpr (std::is_same_v<T, GaussianNoise>) {
          return fmt::format("gaussian(c={})", l.scale);
        } else {
          return fmt::format("spike(s={},d={},p={})", l.scale, l.dim,
                             l.probability);
        }
      },
      law);
}

NoiseInjectedGradient::NoiseInjectedGradient(const Potential& potential,
                                             NoiseLaw law)
    : potential_(potential), law_(std::move(law)) {
  if (const auto* spike = std::get_if<SpikeNoise>(&law_)) {
    if (spike->dim != potential.dim()) {
      throw ParameterError("spike noise dimension differs from potential");
    }
  }
  if (const auto* g = std::get_if<GaussianNoise>(&law_)) {
    if (!(g->scale >= 0.0)) throw ParameterError("gaussian noise scale < 0");
  }
}

void NoiseInjectedGradient::sample(std::span<const double> x,
                                   rng::Stream& rng,
                                   std::span<double> out) const {
  potential_.gradient(x, out);
  if (std::holds_alternative<ZeroNoise>(law_)) return;
  if (const auto* spike = std::get_if<SpikeNoise>(&law_)) {
    // Sparse draw: at most one coordinate moves.
    if (spike->probability < 1.0 && !(rng.uniform() < spike->probability)) {
      return;
    }
    const auto i = static_cast<std::size_t>(rng.below(spike->dim));
    out[i] += rng.coin() ? spike->scale : -spike->scale;
    return;
  }
  const double c = std::get<GaussianNoise>(law_).scale;
  for (double& g : out) g += c * rng.normal();
}

std::string NoiseInjectedGradient::name() const {
  return "injected:" + describe(law_);
}

Vec noise_injected_gradient(const Potential& potential, const NoiseLaw& law,
                            std::span<const double> x, rng::Stream& rng) {
  NoiseInjectedGradient est(potential, law);
  Vec out(potential.dim());
  est.sample(x, rng, out);
  return out;
}

// ---------------------------------------------------------------------------
// Control variates.

Vec full_likelihood_gradient(const LogisticRegressionPotential& blr,
                             std::span<const double> q) {
  const std::size_t d = blr.dim();
  Vec total(d, 0.0), g(d);
  for (std::size_t i = 0; i < blr.observations(); ++i) {
    blr.component_gradient(i, q, g);
    for (std::size_t j = 0; j < d; ++j) total[j] += g[j];
  }
  return total;
}

void control_variate_gradient(const LogisticRegressionPotential& blr,
                              std::span<const double> q,
                              std::span<const double> q_min,
                              std::span<const double> full_grad_at_min,
                              std::span<const std::size_t> batch,
                              std::span<double> out) {
  if (batch.empty()) throw ParameterError("control variate: empty batch");
  const std::size_t d = blr.dim();
  const double scale =
      static_cast<double>(blr.observations()) / static_cast<double>(batch.size());
  const double inv_prior = 1.0 / blr.prior_variance();
  for (std::size_t j = 0; j < d; ++j) {
    out[j] = q[j] * inv_prior + full_grad_at_min[j];
  }
  // grad l_i(q) - grad l_i(q_min) = x_i (sigmoid(x_i.q) - sigmoid(x_i.q_min)).
  for (std::size_t i : batch) {
    const auto xi = blr.row(i);
    const double a = dot(xi, q);
    const double b = dot(xi, q_min);
    const double sa = 1.0 / (1.0 + std::exp(-a));
    const double sb = 1.0 / (1.0 + std::exp(-b));
    const double r = scale * (sa - sb);
    for (std::size_t j = 0; j < d; ++j) out[j] += r * xi[j];
  }
}

ControlVariateGradient::ControlVariateGradient(
    const LogisticRegressionPotential& blr, Vec q_min, std::size_t batch_size)
    : blr_(blr),
      q_min_(std::move(q_min)),
      full_grad_at_min_(full_likelihood_gradient(blr, q_min_)),
      batch_size_(batch_size) {
  if (q_min_.size() != blr.dim()) {
    throw ParameterError("control variate: anchor has wrong dimension");
  }
  if (batch_size < 1 || batch_size > blr.observations()) {
    throw ParameterError("control variate: batch size out of range");
  }
}

void ControlVariateGradient::sample(std::span<const double> x,
                                    rng::Stream& rng,
                                    std::span<double> out) const {
  std::vector<std::size_t> batch(batch_size_);
  for (auto& i : batch) {
    i = static_cast<std::size_t>(rng.below(blr_.observations()));
  }
  control_variate_gradient(blr_, x, q_min_, full_grad_at_min_, batch, out);
}

std::string ControlVariateGradient::name() const {
  return fmt::format("control-variate(b={})", batch_size_);
}

// ---------------------------------------------------------------------------
// Statistics.

Estimate estimate_sigma_p(const GradientEstimator& estimator,
                          const TargetSampler& target, double p,
                          std::size_t n_samples, rng::Stream& rng) {
  if (n_samples < kTolerances.min_sigma_samples) {
    throw ParameterError(fmt::format("estimate_sigma_p: need >= {} samples",
                                     kTolerances.min_sigma_samples));
  }
  if (!(p >= 1.0)) throw ParameterError("estimate_sigma_p: p < 1");
  const std::size_t d = estimator.dim();
  rng::Stream target_rng = rng.substream(0x7A);
  Vec x(d), g(d), exact(d);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < n_samples; ++k) {
    target(target_rng, x);
    estimator.sample(x, rng, g);
    estimator.potential().gradient(x, exact);
    double r2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double r = g[j] - exact[j];
      r2 += r * r;
    }
    const double val = std::pow(r2, 0.5 * p);
    const double delta = val - mean;
    mean += delta / double(k + 1);
    m2 += delta * (val - mean);
  }
  const double var = n_samples > 1 ? m2 / double(n_samples - 1) : 0.0;
  const double se_mean = std::sqrt(var / double(n_samples));
  Estimate out;
  out.value = std::pow(mean, 1.0 / p);
  out.std_error =
      mean > 0.0 ? (1.0 / p) * std::pow(mean, 1.0 / p - 1.0) * se_mean : 0.0;
  return out;
}

double estimate_jacobian_variance(const GradientEstimator& estimator,
                                  std::span<const Vec> probes,
                                  std::size_t n_omega, rng::Stream& rng,
                                  double fd_step) {
  const std::size_t d = estimator.dim();
  const Potential& V = estimator.potential();
  Vec xp(d), xm(d), gp(d), gm(d), hp(d), hm(d);
  // A = D_x G - Hess V, column-major d x d.
  std::vector<double> A(d * d);
  double worst = 0.0;
  for (const Vec& x : probes) {
    if (x.size() != d) throw ParameterError("probe has wrong dimension");
    double acc = 0.0;
    for (std::size_t k = 0; k < n_omega; ++k) {
      const rng::Stream omega = rng;
      for (std::size_t j = 0; j < d; ++j) {
        xp = x;
        xm = x;
        xp[j] += fd_step;
        xm[j] -= fd_step;
        rng::Stream a = omega, b = omega;
        estimator.sample(xp, a, gp);
        estimator.sample(xm, b, gm);
        V.gradient(xp, hp);
        V.gradient(xm, hm);
        for (std::size_t i = 0; i < d; ++i) {
          A[j * d + i] = ((gp[i] - gm[i]) - (hp[i] - hm[i])) / (2.0 * fd_step);
        }
      }
      // Advance past this omega.
      estimator.sample(x, rng, gp);
      const double top = power_iteration(d, [&](const Vec& v, Vec& w) {
        Vec av(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
          for (std::size_t i = 0; i < d; ++i) av[i] += A[j * d + i] * v[j];
        }
        for (std::size_t j = 0; j < d; ++j) {
          double s = 0.0;
          for (std::size_t i = 0; i < d; ++i) s += A[j * d + i] * av[i];
          w[j] = s;
        }
      });
      acc += top;  // |A|_op^2 = lambda_max(A^T A)
    }
    worst = std::max(worst, acc / double(n_omega));
  }
  return worst;
}

}  // namespace sgkl
