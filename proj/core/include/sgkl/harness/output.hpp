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
#include <vector>

namespace sgkl::harness {

// One CSV row. Rows are keyed by (method, h, gamma, metric, seed).
struct ResultRow {
  std::string experiment;
  std::string method;
  std::optional<double> h;
  std::optional<double> gamma;
  std::string metric;
  double value = 0.0;
  std::optional<double> std_error;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kCsvHeader =
    "experiment,method,h,gamma,metric,value,stderr,n,seed";

// Shortest round-trip formatting; missing optionals are empty fields.
std::string format_csv(const std::vector<ResultRow>& rows);
void write_text_file(const std::string& path, const std::string& contents);
void write_csv(const std::string& path, const std::vector<ResultRow>& rows);

// Version string, git-describe style when built from a checkout.
std::string version_string();

// manifest.json: version, subcommand, resolved config, wall time.
std::string manifest_json(const std::string& subcommand,
                          const std::string& config_json,
                          double wall_seconds, std::size_t row_count);

}  // namespace sgkl::harness
