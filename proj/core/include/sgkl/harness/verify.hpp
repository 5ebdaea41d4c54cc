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
#include <functional>
#include <string>
#include <vector>

#include "sgkl/harness/config.hpp"

namespace sgkl::harness {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  std::size_t failures() const;
  std::string to_json() const;
};

struct VerifyCheck {
  std::string name;
  std::function<CheckResult(const Config&)> run;
};

// Registered checks, in report order.
const std::vector<VerifyCheck>& verify_checks();

// Runs every registered check; a check that throws is recorded as failed
// with the exception message, and the remaining checks still run.
VerifyReport run_verify(const Config& config);

}  // namespace sgkl::harness
