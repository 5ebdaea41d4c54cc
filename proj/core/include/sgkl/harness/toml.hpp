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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sgkl::toml {

// Subset of TOML 1.0 used by the configuration files: [table] and
// [dotted.table] headers, bare and quoted keys, basic and literal strings,
// integers (with _ separators), floats (including inf/nan), booleans,
// arrays of scalars (may span lines) and comments. Inline tables, dates and
// multi-line strings are rejected.
struct Value;
using Array = std::vector<Value>;
using Table = std::map<std::string, Value, std::less<>>;

struct Value {
  using Storage = std::variant<bool, std::int64_t, double, std::string, Array,
                               std::shared_ptr<Table>>;
  Storage data;

  bool is_table() const {
    return std::holds_alternative<std::shared_ptr<Table>>(data);
  }
  const Table& table() const { return *std::get<std::shared_ptr<Table>>(data); }
  Table& table() { return *std::get<std::shared_ptr<Table>>(data); }
  std::string type_name() const;
};

// Throws ConfigError with the offending line number.
Table parse(std::string_view text);
Table parse_file(const std::string& path);

// Lookup helpers; `path` is dotted ("sweep.h"). Missing keys yield nullopt;
// a present key of the wrong type throws ConfigError.
const Value* find(const Table& root, std::string_view path);
std::optional<double> get_double(const Table& root, std::string_view path);
std::optional<std::int64_t> get_int(const Table& root, std::string_view path);
std::optional<bool> get_bool(const Table& root, std::string_view path);
std::optional<std::string> get_string(const Table& root, std::string_view path);
std::optional<std::vector<double>> get_double_array(const Table& root,
                                                    std::string_view path);
std::optional<std::vector<std::int64_t>> get_int_array(const Table& root,
                                                       std::string_view path);
std::optional<std::vector<std::string>> get_string_array(
    const Table& root, std::string_view path);

// Dotted paths of every leaf key, for unknown-key detection.
std::vector<std::string> leaf_keys(const Table& root);

}  // namespace sgkl::toml
