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

#include <string>
#include <vector>

#include "sgkl/harness/config.hpp"
#include "sgkl/harness/output.hpp"

namespace sgkl::harness {

struct BoundsReport {
  std::vector<ResultRow> rows;
  std::string text;  // aligned, labelled
  std::string json;
};

// Every closed-form bound evaluated for the toy target of the sweep and the
// spike protocol. Out-of-regime (h, gamma) pairs are reported with the
// violated constraint instead of a number.
BoundsReport bounds_report(const Config& config);

}  // namespace sgkl::harness
