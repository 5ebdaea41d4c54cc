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


#include "sgkl/harness/output.hpp"

#include <filesystem>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "sgkl/error.hpp"

#ifndef SGKL_VERSION_STRING
#define SGKL_VERSION_STRING "0.3.0"
#endif

namespace sgkl::harness {

namespace {

std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string number(double v) { return fmt::format("{}", v); }

std::string number(const std::optional<double>& v) {
  return v ? number(*v) : std::string();
}

}  // namespace

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = kCsvHeader;
  out.push_back('\n');
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", field(r.experiment),
                       field(r.method), number(r.h), number(r.gamma),
                       field(r.metric), number(r.value), number(r.std_error),
                       r.n, r.seed);
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& contents) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) {
      throw Error(fmt::format("cannot create directory '{}': {}",
                              p.parent_path().string(), ec.message()));
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  out << contents;
  if (!out) throw Error(fmt::format("write to '{}' failed", path));
}

void write_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  write_text_file(path, format_csv(rows));
}

std::string version_string() { return SGKL_VERSION_STRING; }

std::string manifest_json(const std::string& subcommand,
                          const std::string& config_json,
                          double wall_seconds, std::size_t row_count) {
  nlohmann::json j;
  j["version"] = version_string();
  j["subcommand"] = subcommand;
  j["config"] = nlohmann::json::parse(config_json);
  j["wall_seconds"] = wall_seconds;
  j["rows"] = row_count;
  j["csv_header"] = kCsvHeader;
  return j.dump(2) + "\n";
}

}  // namespace sgkl::harness
