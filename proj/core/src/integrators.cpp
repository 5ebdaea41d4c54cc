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


#include "sgkl/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "sgkl/error.hpp"
#include "sgkl/tolerances.hpp"

namespace sgkl {

namespace {

// gamma^2 sigma^2 as a function of y = gamma h, summed as
// sum_{k>=3} (-1)^k (4 - 2^k) y^k / k! for y < 1.
double scaled_sigma2(double y) {
  if (y >= 1.0) {
    return 2.0 * y - 3.0 + 4.0 * std::exp(-y) - std::exp(-2.0 * y);
  }
  double sum = 0.0;
  double pow_y = y * y * y / 6.0;  // y^k / k!
  double two_k = 8.0;
  double sign = -1.0;
  for (int k = 3; k < 80; ++k) {
    const double term = sign * (4.0 - two_k) * pow_y;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    pow_y *= y / (k + 1);
    two_k *= 2.0;
    sign = -sign;
  }
  return sum;
}

// 1 - tanh(u)/u.
double one_minus_tanhc(double u) {
  if (u < 0.05) {
    const double u2 = u * u;
    return u2 * (1.0 / 3.0 -
                 u2 * (2.0 / 15.0 - u2 * (17.0 / 315.0 - u2 * 62.0 / 2835.0)));
  }
  return 1.0 - std::tanh(u) / u;
}

void check_finite(const KineticState& s, std::size_t step) {
  if (!all_finite(s.x) || !all_finite(s.v)) {
    throw NumericError(fmt::format("non-finite state at step {}", step),
                       static_cast<std::int64_t>(step));
  }
}

}  // namespace

StepCoefficients StepCoefficients::make(double h, double gamma) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ParameterError(fmt::format("stepsize must be positive, got {}", h));
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ParameterError(
        fmt::format("friction must be positive, got {}", gamma));
  }
  StepCoefficients c;
  c.h = h;
  c.gamma = gamma;
  const double y = gamma * h;
  c.eta = std::exp(-0.5 * y);
  c.E_full = std::exp(-y);
  c.F_full = -std::expm1(-y) / gamma;
  c.F_half = -std::expm1(-0.5 * y) / gamma;
  c.sigma2 = scaled_sigma2(y) / (gamma * gamma);

  // (1 - eta^2) / (2 gamma) and the mixing weights of Z2.
  const double z2_var = -std::expm1(-y) / (2.0 * gamma);
  // ratio = (1-eta)/(1+eta) * 4/(gamma h) = tanh(y/4) / (y/4).
  double rest = one_minus_tanhc(0.25 * y);
  const double ratio = 1.0 - rest;
  if (rest < 0.0) {
    if (rest < -kTolerances.radicand_clamp) {
      throw NumericError(fmt::format(
          "negative radicand {} in U half-step (gamma h = {})", rest, y));
    }
    rest = 0.0;
  }
  c.z1_scale = std::sqrt(0.5 * h);
  c.z2_from_xi1 = std::sqrt(z2_var) * std::sqrt(std::min(ratio, 1.0));
  c.z2_from_xi2 = std::sqrt(z2_var) * std::sqrt(rest);
  return c;
}

double StepCoefficients::position_noise_variance() const {
  return F_full * F_full + sigma2;
}

void u_half_step(KineticState& state, const StepCoefficients& c,
                 std::span<const double> xi1, std::span<const double> xi2) {
  const double x_noise = std::sqrt(2.0 / c.gamma);
  const double v_noise = std::sqrt(2.0 * c.gamma);
  for (std::size_t i = 0; i < state.x.size(); ++i) {
    const double z1 = c.z1_scale * xi1[i];
    const double z2 = c.z2_from_xi1 * xi1[i] + c.z2_from_xi2 * xi2[i];
    state.x[i] += c.F_half * state.v[i] + x_noise * (z1 - z2);
    state.v[i] = c.eta * state.v[i] + v_noise * z2;
  }
}

void u_half_step(KineticState& state, const StepCoefficients& c,
                 rng::Stream& noise1, rng::Stream& noise2) {
  Vec xi1(state.dim()), xi2(state.dim());
  noise1.fill_normal(xi1);
  noise2.fill_normal(xi2);
  u_half_step(state, c, xi1, xi2);
}

void b_step(KineticState& state, double h, std::span<const double> grad) {
  for (std::size_t i = 0; i < state.v.size(); ++i) state.v[i] -= h * grad[i];
}

ChainStreams ChainStreams::from(const rng::Stream& root) {
  return {rng::channel(root, rng::Channel::kBatch),
          rng::channel(root, rng::Channel::kNoise1),
          rng::channel(root, rng::Channel::kNoise2)};
}

namespace {

void require_scratch(std::span<double> scratch, std::size_t dim) {
  if (scratch.size() < kScratchPerDim * dim) {
    throw ParameterError("scratch buffer too small");
  }
}

// Standardised Brownian increment over one step: the normalised sum of the
// two half-step draws a UBU step takes from the same stream.
void brownian_increment(rng::Stream& noise, std::span<double> xi,
                        std::span<double> second_half) {
  noise.fill_normal(xi);
  noise.fill_normal(second_half);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    xi[i] = (xi[i] + second_half[i]) * std::numbers::sqrt2 * 0.5;
  }
}

}  // namespace

void ubu_step(KineticState& state, const StepCoefficients& c,
              const GradientEstimator& gradient, ChainStreams& streams,
              std::span<double> scratch) {
  const std::size_t d = state.dim();
  require_scratch(scratch, d);
  auto grad = scratch.subspan(0, d);
  auto xi1 = scratch.subspan(d, d);
  auto xi2 = scratch.subspan(2 * d, d);

  streams.noise1.fill_normal(xi1);
  streams.noise2.fill_normal(xi2);
  u_half_step(state, c, xi1, xi2);
  gradient.sample(state.x, streams.batch, grad);
  b_step(state, c.h, grad);
  streams.noise1.fill_normal(xi1);
  streams.noise2.fill_normal(xi2);
  u_half_step(state, c, xi1, xi2);
}

void em_kinetic_step(KineticState& state, double h, double gamma,
                     const GradientEstimator& gradient, ChainStreams& streams,
                     std::span<double> scratch) {
  const std::size_t d = state.dim();
  require_scratch(scratch, d);
  auto grad = scratch.subspan(0, d);
  auto xi = scratch.subspan(d, d);
  for (std::size_t i = 0; i < d; ++i) state.x[i] += h * state.v[i];
  gradient.sample(state.x, streams.batch, grad);
  brownian_increment(streams.noise1, xi, scratch.subspan(2 * d, d));
  const double scale = std::sqrt(2.0 * gamma * h);
  const double damp = 1.0 - h * gamma;
  for (std::size_t i = 0; i < d; ++i) {
    state.v[i] = damp * state.v[i] - h * grad[i] + scale * xi[i];
  }
}

void sgld_step(Vec& x, double h, const GradientEstimator& gradient,
               ChainStreams& streams, std::span<double> scratch) {
  const std::size_t d = x.size();
  require_scratch(scratch, d);
  auto grad = scratch.subspan(0, d);
  auto xi = scratch.subspan(d, d);
  gradient.sample(x, streams.batch, grad);
  brownian_increment(streams.noise1, xi, scratch.subspan(2 * d, d));
  const double scale = std::sqrt(2.0 * h);
  for (std::size_t i = 0; i < d; ++i) x[i] += -h * grad[i] + scale * xi[i];
}

BlockGaussianDraw block_gaussian_sample(const StepCoefficients& c,
                                        std::size_t dim, rng::Stream& rng) {
  double s2 = c.sigma2;
  if (s2 < 0.0) {
    if (s2 < -kTolerances.radicand_clamp) {
      throw NumericError(fmt::format("negative sigma^2 = {}", s2));
    }
    s2 = 0.0;
  }
  const double sigma = std::sqrt(s2);
  BlockGaussianDraw out{Vec(dim), Vec(dim)};
  rng.fill_normal(out.x1);
  rng.fill_normal(out.x2);
  for (std::size_t i = 0; i < dim; ++i) {
    out.x2[i] = c.F_full * out.x1[i] + sigma * out.x2[i];
  }
  return out;
}

std::string_view to_string(Integrator kind) {
  switch (kind) {
    case Integrator::kUbu:
      return "ubu";
    case Integrator::kEulerKinetic:
      return "em";
    case Integrator::kSgld:
      return "sgld";
  }
  return "?";
}

Integrator integrator_from_string(std::string_view name) {
  if (name == "ubu") return Integrator::kUbu;
  if (name == "em") return Integrator::kEulerKinetic;
  if (name == "sgld") return Integrator::kSgld;
  throw ParameterError(fmt::format("unknown integrator '{}'", name));
}

std::size_t retained_count(const ChainSpec& spec) {
  if (spec.thin == 0) throw ParameterError("thin must be >= 1");
  if (spec.n_steps < spec.burn_in) {
    throw ParameterError("n_steps must be at least burn_in");
  }
  return (spec.n_steps - spec.burn_in) / spec.thin;
}

void run_chain(const ChainSpec& spec, const GradientEstimator& gradient,
               KineticState initial, const rng::Stream& root,
               const SampleSink& sink) {
  retained_count(spec);
  const std::size_t d = gradient.dim();
  if (initial.x.size() != d) {
    throw ParameterError(fmt::format(
        "initial position has dimension {}, expected {}", initial.x.size(), d));
  }
  const bool kinetic = spec.integrator != Integrator::kSgld;
  StepCoefficients coeffs;
  if (kinetic) {
    coeffs = StepCoefficients::make(spec.h, spec.gamma);
    if (initial.v.empty()) {
      initial.v.resize(d);
      auto init = rng::channel(root, rng::Channel::kInit);
      init.fill_normal(initial.v);
    } else if (initial.v.size() != d) {
      throw ParameterError("initial velocity has the wrong dimension");
    }
  } else {
    if (!(spec.h > 0.0)) throw ParameterError("stepsize must be positive");
    initial.v.clear();
  }

  ChainStreams streams = ChainStreams::from(root);
  Vec scratch(kScratchPerDim * d);
  KineticState& s = initial;
  std::size_t emitted = 0;
  for (std::size_t k = 1; k <= spec.n_steps; ++k) {
    switch (spec.integrator) {
      case Integrator::kUbu:
        ubu_step(s, coeffs, gradient, streams, scratch);
        break;
      case Integrator::kEulerKinetic:
        em_kinetic_step(s, spec.h, spec.gamma, gradient, streams, scratch);
        break;
      case Integrator::kSgld:
        sgld_step(s.x, spec.h, gradient, streams, scratch);
        break;
    }
    check_finite(s, k);
    if (k > spec.burn_in && (k - spec.burn_in) % spec.thin == 0) {
      sink(emitted++, s);
    }
  }
}

Vec run_chain(const ChainSpec& spec, const GradientEstimator& gradient,
              KineticState initial, const rng::Stream& root) {
  const std::size_t d = gradient.dim();
  Vec out;
  out.reserve(retained_count(spec) * d);
  run_chain(spec, gradient, std::move(initial), root,
            [&](std::size_t, const KineticState& s) {
              out.insert(out.end(), s.x.begin(), s.x.end());
            });
  return out;
}

}  // namespace sgkl
