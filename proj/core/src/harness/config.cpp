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


#include "sgkl/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "sgkl/error.hpp"
#include "sgkl/harness/toml.hpp"

namespace sgkl::harness {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kSgld:
      return "SGLD";
    case Method::kSgEm:
      return "SG-EM";
    case Method::kSgUbu:
      return "SG-UBU";
    case Method::kUbu:
      return "UBU";
    case Method::kEm:
      return "EM";
  }
  return "?";
}

Method method_from_string(std::string_view name) {
  for (Method m : {Method::kSgld, Method::kSgEm, Method::kSgUbu, Method::kUbu,
                   Method::kEm}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError(fmt::format(
      "unknown method '{}' (expected SGLD, SG-EM, SG-UBU, UBU or EM)", name));
}

bool is_kinetic(Method m) { return m != Method::kSgld; }

bool is_stochastic(Method m) {
  return m == Method::kSgld || m == Method::kSgEm || m == Method::kSgUbu;
}

std::string_view to_string(SpikeNoiseKind k) {
  switch (k) {
    case SpikeNoiseKind::kSpike:
      return "spike";
    case SpikeNoiseKind::kGaussian:
      return "gaussian";
    case SpikeNoiseKind::kZero:
      return "zero";
  }
  return "?";
}

SpikeNoiseKind spike_noise_from_string(std::string_view name) {
  if (name == "spike") return SpikeNoiseKind::kSpike;
  if (name == "gaussian") return SpikeNoiseKind::kGaussian;
  if (name == "zero") return SpikeNoiseKind::kZero;
  throw ConfigError(fmt::format(
      "unknown spike noise '{}' (expected spike, gaussian or zero)", name));
}

namespace {

const std::set<std::string, std::less<>> kKnownKeys = {
    "run.seed",
    "run.threads",
    "run.out",
    "run.allow_out_of_regime",
    "sweep.methods",
    "sweep.h",
    "sweep.gamma",
    "sweep.samples",
    "sweep.burn_in",
    "sweep.replicas",
    "sweep.thin_time",
    "sweep.batch_size",
    "spike.dims",
    "spike.alpha",
    "spike.gamma",
    "spike.noise",
    "spike.horizon",
    "spike.burn_in_time",
    "spike.replicas",
    "spike.reference_samples",
    "blr.source",
    "blr.dim",
    "blr.observations",
    "blr.prior_variance",
    "blr.data_seed",
    "blr.images",
    "blr.labels",
    "blr.batch_size",
    "blr.methods",
    "blr.h_multipliers",
    "blr.reference_divisor",
    "blr.horizon",
    "blr.burn_in_time",
    "blr.reference_horizon",
    "blr.replicas",
    "bounds.h",
    "bounds.gamma",
    "bounds.spike_dims",
    "bounds.moment_samples",
    "bounds.format",
    "verify.inject_fault",
    "verify.covariance_samples",
    "verify.contraction_replicas",
    "verify.random_instances",
};

std::uint64_t to_u64(std::int64_t v, std::string_view key) {
  if (v < 0) throw ConfigError(fmt::format("'{}' must be >= 0", key));
  return static_cast<std::uint64_t>(v);
}

int to_int(std::int64_t v, std::string_view key) {
  if (v < 0 || v > 1'000'000'000) {
    throw ConfigError(fmt::format("'{}' is out of range", key));
  }
  return static_cast<int>(v);
}

std::vector<Method> methods_from(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& n : names) out.push_back(method_from_string(n));
  return out;
}

template <class T>
void set_if(T& field, std::optional<T> v) {
  if (v) field = std::move(*v);
}

Config from_table(const toml::Table& t) {
  for (const auto& key : toml::leaf_keys(t)) {
    if (!kKnownKeys.count(key)) {
      throw ConfigError(fmt::format("unknown config key '{}'", key));
    }
  }
  Config c;
  if (auto v = toml::get_int(t, "run.seed")) c.run.seed = to_u64(*v, "run.seed");
  if (auto v = toml::get_int(t, "run.threads")) {
    c.run.threads = to_int(*v, "run.threads");
  }
  set_if(c.run.out_dir, toml::get_string(t, "run.out"));
  set_if(c.run.allow_out_of_regime, toml::get_bool(t, "run.allow_out_of_regime"));

  if (auto v = toml::get_string_array(t, "sweep.methods")) {
    c.sweep.methods = methods_from(*v);
  }
  set_if(c.sweep.h, toml::get_double_array(t, "sweep.h"));
  set_if(c.sweep.gamma, toml::get_double_array(t, "sweep.gamma"));
  if (auto v = toml::get_int(t, "sweep.samples")) {
    c.sweep.samples = to_u64(*v, "sweep.samples");
  }
  if (auto v = toml::get_int(t, "sweep.burn_in")) {
    c.sweep.burn_in = to_u64(*v, "sweep.burn_in");
  }
  if (auto v = toml::get_int(t, "sweep.replicas")) {
    c.sweep.replicas = to_int(*v, "sweep.replicas");
  }
  set_if(c.sweep.thin_time, toml::get_double(t, "sweep.thin_time"));
  if (auto v = toml::get_int(t, "sweep.batch_size")) {
    c.sweep.batch_size = to_int(*v, "sweep.batch_size");
  }

  set_if(c.spike.dims, toml::get_int_array(t, "spike.dims"));
  set_if(c.spike.alpha, toml::get_double(t, "spike.alpha"));
  set_if(c.spike.gamma, toml::get_double(t, "spike.gamma"));
  if (auto v = toml::get_string_array(t, "spike.noise")) {
    c.spike.noise.clear();
    for (const auto& n : *v) c.spike.noise.push_back(spike_noise_from_string(n));
  }
  set_if(c.spike.horizon, toml::get_double(t, "spike.horizon"));
  set_if(c.spike.burn_in_time, toml::get_double(t, "spike.burn_in_time"));
  if (auto v = toml::get_int(t, "spike.replicas")) {
    c.spike.replicas = to_int(*v, "spike.replicas");
  }
  if (auto v = toml::get_int(t, "spike.reference_samples")) {
    c.spike.reference_samples = to_u64(*v, "spike.reference_samples");
  }

  set_if(c.blr.source, toml::get_string(t, "blr.source"));
  if (auto v = toml::get_int(t, "blr.dim")) c.blr.dim = to_int(*v, "blr.dim");
  if (auto v = toml::get_int(t, "blr.observations")) {
    c.blr.observations = to_int(*v, "blr.observations");
  }
  set_if(c.blr.prior_variance, toml::get_double(t, "blr.prior_variance"));
  if (auto v = toml::get_int(t, "blr.data_seed")) {
    c.blr.data_seed = to_u64(*v, "blr.data_seed");
  }
  set_if(c.blr.images_path, toml::get_string(t, "blr.images"));
  set_if(c.blr.labels_path, toml::get_string(t, "blr.labels"));
  if (auto v = toml::get_int(t, "blr.batch_size")) {
    c.blr.batch_size = to_int(*v, "blr.batch_size");
  }
  if (auto v = toml::get_string_array(t, "blr.methods")) {
    c.blr.methods = methods_from(*v);
  }
  set_if(c.blr.h_multipliers, toml::get_double_array(t, "blr.h_multipliers"));
  set_if(c.blr.reference_divisor, toml::get_double(t, "blr.reference_divisor"));
  set_if(c.blr.horizon, toml::get_double(t, "blr.horizon"));
  set_if(c.blr.burn_in_time, toml::get_double(t, "blr.burn_in_time"));
  set_if(c.blr.reference_horizon, toml::get_double(t, "blr.reference_horizon"));
  if (auto v = toml::get_int(t, "blr.replicas")) {
    c.blr.replicas = to_int(*v, "blr.replicas");
  }

  set_if(c.bounds.h, toml::get_double_array(t, "bounds.h"));
  set_if(c.bounds.gamma, toml::get_double_array(t, "bounds.gamma"));
  set_if(c.bounds.spike_dims, toml::get_int_array(t, "bounds.spike_dims"));
  if (auto v = toml::get_int(t, "bounds.moment_samples")) {
    c.bounds.moment_samples = to_u64(*v, "bounds.moment_samples");
  }
  set_if(c.bounds.format, toml::get_string(t, "bounds.format"));

  set_if(c.verify.inject_fault, toml::get_string(t, "verify.inject_fault"));
  if (auto v = toml::get_int(t, "verify.covariance_samples")) {
    c.verify.covariance_samples = to_u64(*v, "verify.covariance_samples");
  }
  if (auto v = toml::get_int(t, "verify.contraction_replicas")) {
    c.verify.contraction_replicas = to_int(*v, "verify.contraction_replicas");
  }
  if (auto v = toml::get_int(t, "verify.random_instances")) {
    c.verify.random_instances = to_int(*v, "verify.random_instances");
  }
  return c;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

bool all_positive(const std::vector<double>& v) {
  return !v.empty() && std::all_of(v.begin(), v.end(), [](double x) {
    return x > 0.0 && std::isfinite(x);
  });
}

}  // namespace

void validate(const Config& c) {
  require(c.run.threads >= 1, "run.threads must be >= 1");
  require(!c.sweep.methods.empty(), "sweep.methods must not be empty");
  require(all_positive(c.sweep.h), "sweep.h must be a non-empty list of positive stepsizes");
  require(all_positive(c.sweep.gamma), "sweep.gamma must be a non-empty list of positive values");
  require(c.sweep.samples >= 2, "sweep.samples must be >= 2");
  require(c.sweep.replicas >= 2, "sweep.replicas must be >= 2 for standard errors");
  require(c.sweep.thin_time >= 0.0, "sweep.thin_time must be >= 0");
  require(c.sweep.batch_size == 1 || c.sweep.batch_size == 2,
          "sweep.batch_size must be 1 or 2 for the two-component toy target");

  require(!c.spike.dims.empty(), "spike.dims must not be empty");
  for (auto d : c.spike.dims) require(d >= 3, "spike.dims entries must be >= 3");
  require(c.spike.alpha >= 0.5 && c.spike.alpha < 1.0, "spike.alpha must lie in [0.5, 1)");
  require(c.spike.gamma > 0.0, "spike.gamma must be positive");
  require(!c.spike.noise.empty(), "spike.noise must not be empty");
  require(c.spike.horizon > 0.0 && c.spike.burn_in_time >= 0.0,
          "spike.horizon must be positive and spike.burn_in_time >= 0");
  require(c.spike.replicas >= 2, "spike.replicas must be >= 2");
  require(c.spike.reference_samples >= 2, "spike.reference_samples must be >= 2");

  require(c.blr.source == "synthetic" || c.blr.source == "idx",
          "blr.source must be 'synthetic' or 'idx'");
  if (c.blr.source == "idx") {
    require(!c.blr.images_path.empty() && !c.blr.labels_path.empty(),
            "blr.images and blr.labels are required when blr.source = 'idx'");
  }
  require(c.blr.dim >= 1 && c.blr.observations >= 1, "blr.dim and blr.observations must be >= 1");
  require(c.blr.prior_variance > 0.0, "blr.prior_variance must be positive");
  require(c.blr.batch_size >= 1, "blr.batch_size must be >= 1");
  require(!c.blr.methods.empty(), "blr.methods must not be empty");
  require(all_positive(c.blr.h_multipliers), "blr.h_multipliers must be positive");
  require(c.blr.reference_divisor > 0.0, "blr.reference_divisor must be positive");
  require(c.blr.horizon > 0.0 && c.blr.reference_horizon > 0.0 && c.blr.burn_in_time >= 0.0,
          "blr horizons must be positive");
  require(c.blr.replicas >= 2, "blr.replicas must be >= 2");

  require(all_positive(c.bounds.h), "bounds.h must be positive");
  require(all_positive(c.bounds.gamma), "bounds.gamma must be positive");
  for (auto d : c.bounds.spike_dims) require(d >= 2, "bounds.spike_dims entries must be >= 2");
  require(c.bounds.moment_samples >= 100, "bounds.moment_samples must be >= 100");
  require(c.bounds.format == "text" || c.bounds.format == "json",
          "bounds.format must be 'text' or 'json'");

  require(c.verify.inject_fault.empty() || c.verify.inject_fault == "sigma2_sign",
          "verify.inject_fault must be empty or 'sigma2_sign'");
  require(c.verify.covariance_samples >= 1000, "verify.covariance_samples must be >= 1000");
  require(c.verify.contraction_replicas >= 2, "verify.contraction_replicas must be >= 2");
  require(c.verify.random_instances >= 1, "verify.random_instances must be >= 1");
}

Config parse_config(std::string_view toml_text) {
  Config c = from_table(toml::parse(toml_text));
  validate(c);
  return c;
}

Config load_config(const std::string& path) {
  Config c = from_table(toml::parse_file(path));
  c.source = path;
  validate(c);
  return c;
}

std::string to_json(const Config& c) {
  using nlohmann::json;
  auto names = [](const std::vector<Method>& ms) {
    json a = json::array();
    for (Method m : ms) a.push_back(std::string(to_string(m)));
    return a;
  };
  json j;
  j["source"] = c.source;
  j["run"] = {{"seed", c.run.seed},
              {"threads", c.run.threads},
              {"out", c.run.out_dir},
              {"allow_out_of_regime", c.run.allow_out_of_regime}};
  j["sweep"] = {{"methods", names(c.sweep.methods)},
                {"h", c.sweep.h},
                {"gamma", c.sweep.gamma},
                {"samples", c.sweep.samples},
                {"burn_in", c.sweep.burn_in},
                {"replicas", c.sweep.replicas},
                {"thin_time", c.sweep.thin_time},
                {"batch_size", c.sweep.batch_size}};
  json noise = json::array();
  for (auto k : c.spike.noise) noise.push_back(std::string(to_string(k)));
  j["spike"] = {{"dims", c.spike.dims},
                {"alpha", c.spike.alpha},
                {"gamma", c.spike.gamma},
                {"noise", noise},
                {"horizon", c.spike.horizon},
                {"burn_in_time", c.spike.burn_in_time},
                {"replicas", c.spike.replicas},
                {"reference_samples", c.spike.reference_samples}};
  j["blr"] = {{"source", c.blr.source},
              {"dim", c.blr.dim},
              {"observations", c.blr.observations},
              {"prior_variance", c.blr.prior_variance},
              {"data_seed", c.blr.data_seed},
              {"images", c.blr.images_path},
              {"labels", c.blr.labels_path},
              {"batch_size", c.blr.batch_size},
              {"methods", names(c.blr.methods)},
              {"h_multipliers", c.blr.h_multipliers},
              {"reference_divisor", c.blr.reference_divisor},
              {"horizon", c.blr.horizon},
              {"burn_in_time", c.blr.burn_in_time},
              {"reference_horizon", c.blr.reference_horizon},
              {"replicas", c.blr.replicas}};
  j["bounds"] = {{"h", c.bounds.h},
                 {"gamma", c.bounds.gamma},
                 {"spike_dims", c.bounds.spike_dims},
                 {"moment_samples", c.bounds.moment_samples},
                 {"format", c.bounds.format}};
  j["verify"] = {{"inject_fault", c.verify.inject_fault},
                 {"covariance_samples", c.verify.covariance_samples},
                 {"contraction_replicas", c.verify.contraction_replicas},
                 {"random_instances", c.verify.random_instances}};
  return j.dump(2);
}

}  // namespace sgkl::harness
