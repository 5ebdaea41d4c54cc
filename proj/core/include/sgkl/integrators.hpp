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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "sgkl/gradients.hpp"
#include "sgkl/rng.hpp"
#include "sgkl/vector_ops.hpp"

namespace sgkl {

// Position-velocity pair advanced by the kinetic integrators.
struct KineticState {
  Vec x;
  Vec v;

  static KineticState zeros(std::size_t dim) {
    return {Vec(dim, 0.0), Vec(dim, 0.0)};
  }
  std::size_t dim() const { return x.size(); }
};

// Coefficients of the exact Ornstein-Uhlenbeck flow for one step of size h:
//   E(t) = exp(-gamma t), F(t) = (1 - exp(-gamma t)) / gamma,
//   sigma^2 = 2 gamma int_0^h F(u)^2 du
//           = 2h/gamma - 3/gamma^2 + 4 e^{-gamma h}/gamma^2 - e^{-2 gamma h}/gamma^2.
// All quantities are evaluated without cancellation for small gamma h.
struct StepCoefficients {
  double h = 0.0;
  double gamma = 0.0;
  double eta = 0.0;        // E(h/2)
  double E_full = 0.0;     // E(h)
  double F_full = 0.0;     // F(h)
  double F_half = 0.0;     // F(h/2)
  double sigma2 = 0.0;     // sigma(h, gamma)^2

  // U(h/2) noise mixing: Z2 = z2_from_xi1 * xi1 + z2_from_xi2 * xi2.
  double z1_scale = 0.0;    // sqrt(h/2)
  double z2_from_xi1 = 0.0;
  double z2_from_xi2 = 0.0;

  static StepCoefficients make(double h, double gamma);

  // 2h/gamma - 2(1 - e^{-gamma h})/gamma^2, the position-noise variance of
  // the block-Gaussian vector.
  double position_noise_variance() const;
};

// ---------------------------------------------------------------------------
// Elementary maps. Gaussian draws are passed in explicitly so the maps are
// pure functions of (state, coefficients, draws).

// Exact U flow over h/2 driven by the two standard normal vectors xi1, xi2.
void u_half_step(KineticState& state, const StepCoefficients& c,
                 std::span<const double> xi1, std::span<const double> xi2);
void u_half_step(KineticState& state, const StepCoefficients& c,
                 rng::Stream& noise1, rng::Stream& noise2);

// v <- v - h * grad.
void b_step(KineticState& state, double h, std::span<const double> grad);

// ---------------------------------------------------------------------------
// Random streams of one chain. Synchronously coupled chains copy the noise
// streams; `batch` may be shared or not.
struct ChainStreams {
  rng::Stream batch;
  rng::Stream noise1;
  rng::Stream noise2;

  static ChainStreams from(const rng::Stream& root);
};

// Scratch buffers passed to the step functions hold at least
// kScratchPerDim * dim doubles.
inline constexpr std::size_t kScratchPerDim = 3;

// U(h/2) B(h) U(h/2), gradient (exact or stochastic) at the midpoint.
void ubu_step(KineticState& state, const StepCoefficients& c,
              const GradientEstimator& gradient, ChainStreams& streams,
              std::span<double> scratch);

// Euler-Maruyama for kinetic Langevin (SG-HMC form), x updated first:
//   x' = x + h v
//   v' = v - h G(x') - h gamma v + sqrt(2 gamma h) xi.
void em_kinetic_step(KineticState& state, double h, double gamma,
                     const GradientEstimator& gradient, ChainStreams& streams,
                     std::span<double> scratch);

// x' = x - h G(x) + sqrt(2h) xi.
void sgld_step(Vec& x, double h, const GradientEstimator& gradient,
               ChainStreams& streams, std::span<double> scratch);

// (X1, X2) = (Z, F(h) Z + sigma(h,gamma) Z'), a draw from the centred
// block-Gaussian with covariance [[I, F I], [F I, (F^2 + sigma^2) I]].
struct BlockGaussianDraw {
  Vec x1;
  Vec x2;
};
BlockGaussianDraw block_gaussian_sample(const StepCoefficients& c,
                                        std::size_t dim, rng::Stream& rng);

// ---------------------------------------------------------------------------
// Chains.

enum class Integrator { kUbu, kEulerKinetic, kSgld };

std::string_view to_string(Integrator kind);
Integrator integrator_from_string(std::string_view name);

struct ChainSpec {
  Integrator integrator = Integrator::kUbu;
  double h = 0.1;
  double gamma = 1.0;
  std::size_t n_steps = 0;  // total steps including burn-in
  std::size_t burn_in = 0;
  std::size_t thin = 1;
};

// Observer for retained samples: (sample index, state). For SGLD the
// velocity is empty.
using SampleSink =
    std::function<void(std::size_t, const KineticState&)>;

// Runs one chain. Deterministic given `root`. Initial position is
// `initial.x`; an empty initial velocity is drawn from N(0, I) on a
// dedicated substream. Throws NumericError (with the step index) when the
// state becomes non-finite.
void run_chain(const ChainSpec& spec, const GradientEstimator& gradient,
               KineticState initial, const rng::Stream& root,
               const SampleSink& sink);

// Convenience: retained positions, flattened (samples x dim).
Vec run_chain(const ChainSpec& spec, const GradientEstimator& gradient,
              KineticState initial, const rng::Stream& root);

std::size_t retained_count(const ChainSpec& spec);

}  // namespace sgkl
