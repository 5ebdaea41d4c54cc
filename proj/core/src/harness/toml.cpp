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


#include "sgkl/harness/toml.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "sgkl/error.hpp"

namespace sgkl::toml {

std::string Value::type_name() const {
  switch (data.index()) {
    case 0:
      return "boolean";
    case 1:
      return "integer";
    case 2:
      return "float";
    case 3:
      return "string";
    case 4:
      return "array";
    default:
      return "table";
  }
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Table run() {
    Table root;
    Table* current = &root;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        if (!at_end() && peek() == '[') fail("arrays of tables are not supported");
        skip_ws();
        std::vector<std::string> path = parse_key_path();
        skip_ws();
        expect(']');
        current = &open_table(root, path, true);
        end_of_line();
        continue;
      }
      std::vector<std::string> path = parse_key_path();
      skip_ws();
      expect('=');
      skip_ws();
      Value v = parse_value();
      Table* t = current;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        std::vector<std::string> one{path[i]};
        t = &open_table(*t, one, false);
      }
      if (t->count(path.back())) {
        fail(fmt::format("duplicate key '{}'", path.back()));
      }
      t->emplace(path.back(), std::move(v));
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(fmt::format("TOML line {}: {}", line_, msg));
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void expect(char c) {
    if (at_end() || peek() != c) fail(fmt::format("expected '{}'", c));
    ++pos_;
  }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (!at_end() && peek() == '#') {
      while (!at_end() && peek() != '\n') ++pos_;
    }
  }

  void newline() {
    if (!at_end() && peek() == '\r') ++pos_;
    if (!at_end() && peek() == '\n') {
      ++pos_;
      ++line_;
    }
  }

  void skip_blank_lines() {
    while (!at_end()) {
      skip_ws();
      skip_comment();
      if (at_end()) return;
      if (peek() == '\n' || peek() == '\r') {
        newline();
      } else {
        return;
      }
    }
  }

  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() {
    while (!at_end()) {
      skip_ws();
      skip_comment();
      if (!at_end() && (peek() == '\n' || peek() == '\r')) {
        newline();
      } else {
        return;
      }
    }
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (at_end()) return;
    if (peek() != '\n' && peek() != '\r') fail("unexpected trailing characters");
    newline();
  }

  std::string parse_key() {
    if (at_end()) fail("expected a key");
    if (peek() == '"') return parse_basic_string();
    if (peek() == '\'') return parse_literal_string();
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                         peek() == '_' || peek() == '-')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path{parse_key()};
    skip_ws();
    while (!at_end() && peek() == '.') {
      ++pos_;
      skip_ws();
      path.push_back(parse_key());
      skip_ws();
    }
    return path;
  }

  Table& open_table(Table& root, const std::vector<std::string>& path,
                    bool header) {
    Table* t = &root;
    for (const auto& key : path) {
      auto it = t->find(key);
      if (it == t->end()) {
        it = t->emplace(key, Value{std::make_shared<Table>()}).first;
      } else if (!it->second.is_table()) {
        fail(fmt::format("key '{}' is not a table", key));
      }
      t = &it->second.table();
    }
    if (header) {
      std::string joined;
      for (const auto& k : path) joined += (joined.empty() ? "" : ".") + k;
      if (!headers_.insert(joined).second) {
        fail(fmt::format("table [{}] defined twice", joined));
      }
    }
    return *t;
  }

  std::string parse_basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (at_end()) fail("unterminated escape");
      const char e = text_[pos_++];
      switch (e) {
        case 'n':
          out.push_back('\n');
          break;
        case 't':
          out.push_back('\t');
          break;
        case 'r':
          out.push_back('\r');
          break;
        case '"':
          out.push_back('"');
          break;
        case '\\':
          out.push_back('\\');
          break;
        default:
          fail(fmt::format("unsupported escape '\\{}'", e));
      }
    }
    return out;
  }

  std::string parse_literal_string() {
    expect('\'');
    const std::size_t start = pos_;
    while (!at_end() && peek() != '\'' && peek() != '\n') ++pos_;
    if (at_end() || peek() != '\'') fail("unterminated string");
    std::string out(text_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  Value parse_value() {
    if (at_end()) fail("expected a value");
    const char c = peek();
    if (c == '"') {
      if (text_.substr(pos_, 3) == "\"\"\"") fail("multi-line strings are not supported");
      return Value{parse_basic_string()};
    }
    if (c == '\'') return Value{parse_literal_string()};
    if (c == '[') return parse_array();
    if (c == '{') fail("inline tables are not supported");
    return parse_scalar();
  }

  Value parse_array() {
    expect('[');
    Array out;
    while (true) {
      skip_array_space();
      if (at_end()) fail("unterminated array");
      if (peek() == ']') {
        ++pos_;
        break;
      }
      Value v = parse_value();
      if (v.is_table() || std::holds_alternative<Array>(v.data)) {
        fail("nested arrays are not supported");
      }
      out.push_back(std::move(v));
      skip_array_space();
      if (!at_end() && peek() == ',') {
        ++pos_;
        continue;
      }
      skip_array_space();
      if (at_end() || peek() != ']') fail("expected ',' or ']' in array");
    }
    return Value{std::move(out)};
  }

  Value parse_scalar() {
    const std::size_t start = pos_;
    while (!at_end() && peek() != ',' && peek() != ']' && peek() != '#' &&
           peek() != '\n' && peek() != '\r' && peek() != ' ' &&
           peek() != '\t') {
      ++pos_;
    }
    const std::string token(text_.substr(start, pos_ - start));
    if (token.empty()) fail("expected a value");
    if (token == "true") return Value{true};
    if (token == "false") return Value{false};
    std::string digits;
    for (char ch : token) {
      if (ch != '_') digits.push_back(ch);
    }
    std::string body = digits;
    bool negative = false;
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
      negative = body[0] == '-';
      body.erase(0, 1);
    }
    if (body == "inf") {
      return Value{negative ? -std::numeric_limits<double>::infinity()
                            : std::numeric_limits<double>::infinity()};
    }
    if (body == "nan") return Value{std::numeric_limits<double>::quiet_NaN()};
    const bool is_float =
        body.find_first_of(".eE") != std::string::npos;
    if (!is_float) {
      std::int64_t v = 0;
      const char* first = digits.data() + (digits[0] == '+' ? 1 : 0);
      const char* last = digits.data() + digits.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) {
        fail(fmt::format("invalid value '{}'", token));
      }
      return Value{v};
    }
    double v = 0.0;
    const char* first = digits.data() + (digits[0] == '+' ? 1 : 0);
    const char* last = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      fail(fmt::format("invalid value '{}'", token));
    }
    return Value{v};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::set<std::string> headers_;
};

}  // namespace

Table parse(std::string_view text) { return Parser(text).run(); }

Table parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

const Value* find(const Table& root, std::string_view path) {
  const Table* t = &root;
  while (true) {
    const auto dot = path.find('.');
    const std::string_view key = path.substr(0, dot);
    auto it = t->find(key);
    if (it == t->end()) return nullptr;
    if (dot == std::string_view::npos) return &it->second;
    if (!it->second.is_table()) return nullptr;
    t = &it->second.table();
    path.remove_prefix(dot + 1);
  }
}

namespace {

[[noreturn]] void wrong_type(std::string_view path, const Value& v,
                             const char* wanted) {
  throw ConfigError(fmt::format("config key '{}' must be {}, found {}", path,
                                wanted, v.type_name()));
}

double as_double(std::string_view path, const Value& v) {
  if (const auto* d = std::get_if<double>(&v.data)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v.data)) {
    return static_cast<double>(*i);
  }
  wrong_type(path, v, "a number");
}

}  // namespace

std::optional<double> get_double(const Table& root, std::string_view path) {
  const Value* v = find(root, path);
  if (!v) return std::nullopt;
  return as_double(path, *v);
}

std::optional<std::int64_t> get_int(const Table& root, std::string_view path) {
  const Value* v = find(root, path);
  if (!v) return std::nullopt;
  if (const auto* i = std::get_if<std::int64_t>(&v->data)) return *i;
  wrong_type(path, *v, "an integer");
}

std::optional<bool> get_bool(const Table& root, std::string_view path) {
  const Value* v = find(root, path);
  if (!v) return std::nullopt;
  if (const auto* b = std::get_if<bool>(&v->data)) return *b;
  wrong_type(path, *v, "a boolean");
}

std::optional<std::string> get_string(const Table& root,
                                      std::string_view path) {
  const Value* v = find(root, path);
  if (!v) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(&v->data)) return *s;
  wrong_type(path, *v, "a string");
}

namespace {

const Array* get_array(const Table& root, std::string_view path) {
  const Value* v = find(root, path);
  if (!v) return nullptr;
  if (const auto* a = std::get_if<Array>(&v->data)) return a;
  wrong_type(path, *v, "an array");
}

}  // namespace

std::optional<std::vector<double>> get_double_array(const Table& root,
                                                    std::string_view path) {
  const Array* a = get_array(root, path);
  if (!a) return std::nullopt;
  std::vector<double> out;
  for (const auto& v : *a) out.push_back(as_double(path, v));
  return out;
}

std::optional<std::vector<std::int64_t>> get_int_array(const Table& root,
                                                       std::string_view path) {
  const Array* a = get_array(root, path);
  if (!a) return std::nullopt;
  std::vector<std::int64_t> out;
  for (const auto& v : *a) {
    if (const auto* i = std::get_if<std::int64_t>(&v.data)) {
      out.push_back(*i);
    } else {
      wrong_type(path, v, "an array of integers");
    }
  }
  return out;
}

std::optional<std::vector<std::string>> get_string_array(
    const Table& root, std::string_view path) {
  const Array* a = get_array(root, path);
  if (!a) return std::nullopt;
  std::vector<std::string> out;
  for (const auto& v : *a) {
    if (const auto* s = std::get_if<std::string>(&v.data)) {
      out.push_back(*s);
    } else {
      wrong_type(path, v, "an array of strings");
    }
  }
  return out;
}

namespace {

void collect(const Table& t, const std::string& prefix,
             std::vector<std::string>& out) {
  for (const auto& [key, value] : t) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (value.is_table()) {
      collect(value.table(), path, out);
    } else {
      out.push_back(path);
    }
  }
}

}  // namespace

std::vector<std::string> leaf_keys(const Table& root) {
  std::vector<std::string> out;
  collect(root, "", out);
  return out;
}

}  // namespace sgkl::toml
