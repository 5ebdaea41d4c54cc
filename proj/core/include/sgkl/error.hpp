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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sgkl {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid caller-supplied arguments (bad sizes, out-of-range constants,
// violated stepsize regimes).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Floating-point trouble: NaN/Inf states, negative variances beyond
// tolerance, failed brackets.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what,
                        std::optional<std::int64_t> step = std::nullopt)
      : Error(what), step_(step) {}

  // Step index at which a chain produced a non-finite value, if known.
  std::optional<std::int64_t> step() const { return step_; }

 private:
  std::optional<std::int64_t> step_;
};

// Iterative solver hit its cap. Carries the last iterate.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> last)
      : Error(what), last_iterate_(std::move(last)) {}

  const std::vector<double>& last_iterate() const { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

// Randomised search could not certify its threshold.
class SearchFailureError : public Error {
 public:
  using Error::Error;
};

// An asserted mathematical invariant failed at run time.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration file or option.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sgkl
