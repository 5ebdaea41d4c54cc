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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sgkl::harness {

enum class Method { kSgld, kSgEm, kSgUbu, kUbu, kEm };

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);
bool is_kinetic(Method m);
bool is_stochastic(Method m);

struct RunConfig {
  std::uint64_t seed = 20260611;
  int threads = 1;
  std::string out_dir = "results";
  bool allow_out_of_regime = false;
};

// Bias-vs-stepsize sweep on the one-dimensional toy target.
struct SweepConfig {
  std::vector<Method> methods{Method::kSgld, Method::kSgEm, Method::kSgUbu};
  std::vector<double> h{0.25, 0.125, 0.0625, 0.03125};
  std::vector<double> gamma{5.0};
  std::uint64_t samples = 1000000;  // retained samples per replica
  std::uint64_t burn_in = 100000;   // steps
  int replicas = 8;
  // Retained samples are spaced by max(1, ceil(thin_time / h)) steps.
  double thin_time = 0.5;
  int batch_size = 1;
};

enum class SpikeNoiseKind { kSpike, kGaussian, kZero };
std::string_view to_string(SpikeNoiseKind k);
SpikeNoiseKind spike_noise_from_string(std::string_view name);

// f_k bias of SG-UBU on a standard Gaussian target under spike noise.
struct SpikeConfig {
  std::vector<std::int64_t> dims{64, 256};
  double alpha = 0.5;
  double gamma = 2.0;
  std::vector<SpikeNoiseKind> noise{SpikeNoiseKind::kSpike,
                                    SpikeNoiseKind::kGaussian};
  double horizon = 4000.0;      // simulated time after burn-in
  double burn_in_time = 50.0;
  int replicas = 4;
  std::uint64_t reference_samples = 400000;
};

struct BlrConfig {
  std::string source = "synthetic";  // or "idx"
  int dim = 20;
  int observations = 1000;
  double prior_variance = 0.1;
  std::uint64_t data_seed = 7;
  std::string images_path;
  std::string labels_path;
  int batch_size = 10;
  std::vector<Method> methods{Method::kSgUbu, Method::kSgEm};
  std::vector<double> h_multipliers{2.0, 1.0, 0.5, 0.25};  // h = c / sqrt(L)
  double reference_divisor = 16.0;
  double horizon = 2000.0;  // simulated time after burn-in
  double burn_in_time = 20.0;
  double reference_horizon = 4000.0;
  int replicas = 4;
};

struct BoundsConfig {
  std::vector<double> h{0.001, 0.002, 0.004};
  std::vector<double> gamma{9.0};
  std::vector<std::int64_t> spike_dims{64, 256, 1024};
  std::uint64_t moment_samples = 100000;
  std::string format = "text";  // or "json"
};

struct VerifyConfig {
  std::string inject_fault;  // "" or "sigma2_sign"
  std::uint64_t covariance_samples = 1000000;
  int contraction_replicas = 200;
  int random_instances = 100;
};

struct Config {
  RunConfig run;
  SweepConfig sweep;
  SpikeConfig spike;
  BlrConfig blr;
  BoundsConfig bounds;
  VerifyConfig verify;
  std::string source;  // config path, empty for defaults
};

// Throws ConfigError on syntax errors, unknown keys, wrong types or values
// outside their documented ranges.
Config load_config(const std::string& path);
Config parse_config(std::string_view toml_text);
void validate(const Config& config);

// Full resolved configuration as JSON.
std::string to_json(const Config& config);

}  // namespace sgkl::harness
