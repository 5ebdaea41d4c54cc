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

namespace sgkl {

// Every numerical tolerance and search budget used by the library lives
// here so that tests and drivers agree on one set of numbers.
struct Tolerances {
  // Negative radicands above this magnitude are errors, smaller ones are
  // clamped to zero (U half-step, block-Gaussian sigma^2).
  double radicand_clamp = 1e-12;
  // Below this value of gamma*h the step coefficients use series forms.
  double small_gamma_h = 1e-8;

  // Mode finding.
  std::size_t mode_max_iterations = 100000;
  double mode_tolerance = 1e-8;

  // Quantile machinery.
  std::size_t quadrature_nodes = std::size_t{1} << 16;
  double quantile_tolerance = 1e-12;
  std::size_t bracket_expansions = 200;
  double bracket_width_stdevs = 10.0;

  // Centering checks.
  double discrete_mean_tolerance = 1e-8;
  double atom_sum_tolerance = 1e-10;
  double mass_balance_tolerance = 1e-12;

  // Coupling pipeline.
  std::size_t exhaustive_matching_max_atoms = 10;
  std::size_t random_matching_draws = 10000;
  double phi_relative_tolerance = 1e-12;

  // Exact small-instance transport.
  std::size_t exact_transport_max_atoms = 64;

  // Monte Carlo sample floors.
  std::size_t min_sigma_samples = 100;
  std::size_t c_g_logistic_samples = 10000;
};

inline constexpr Tolerances kTolerances{};

}  // namespace sgkl
