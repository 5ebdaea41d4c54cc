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
#include <span>
#include <string>
#include <vector>

#include "sgkl/harness/config.hpp"
#include "sgkl/harness/output.hpp"

namespace sgkl::harness {

// Runs fn(i) for every i in [0, n) on `threads` workers. Every index runs;
// the exception of the lowest failing index is rethrown afterwards.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

struct MeanSe {
  double mean = 0.0;
  double std_error = 0.0;
};
// Mean and between-replica standard error.
MeanSe mean_and_se(std::span<const double> values);

struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
};
// Least-squares slope of log(value) on log(h); the error propagates the
// per-point standard errors through the linear estimator.
SlopeFit log_log_slope(std::span<const double> h, std::span<const double> value,
                       std::span<const double> std_error);

// max(1, ceil(thin_time / h)), or 1 when thin_time is 0.
std::size_t thin_steps(double h, double thin_time);

// Kinetic methods need h < 1/(2 gamma).
bool in_regime(Method m, double h, double gamma);

struct SpikeParameters {
  std::size_t d = 0;
  double alpha = 0.5;
  double h = 0.0;
  double p = 0.0;  // spike probability per step
  double s = 0.0;  // spike size
  std::size_t k = 0;
  double noise_variance = 0.0;  // p s^2 / d per coordinate
};
// h = d^{-alpha}, p = h d^{1-alpha}/log d, s = (8/h) sqrt(log d),
// k = ceil(d^{1-alpha}/log d).
SpikeParameters spike_parameters(std::size_t d, double alpha);

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  std::vector<std::string> notes;
};

// Wasserstein-1 bias of each method on the one-dimensional toy target.
ExperimentOutput run_bias_sweep(const Config& config);

// f_k bias of SG-UBU on a standard Gaussian target under spike, Gaussian
// and zero gradient noise.
ExperimentOutput run_spike_table(const Config& config);

// |E_h[U] - E_ref[U]| for Bayesian logistic regression.
ExperimentOutput run_blr(const Config& config);

}  // namespace sgkl::harness
