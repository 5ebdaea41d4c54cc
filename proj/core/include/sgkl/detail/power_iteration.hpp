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

#include <cmath>
#include <vector>

namespace sgkl {

template <typename Apply>
double power_iteration(std::size_t dim, Apply&& apply, std::size_t iterations,
                       double rel_tol) {
  std::vector<double> v(dim), w(dim);
  // Fixed, non-degenerate start so results are deterministic.
  for (std::size_t i = 0; i < dim; ++i) {
    v[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
  }
  double nv = 0.0;
  for (double x : v) nv += x * x;
  nv = std::sqrt(nv);
  for (double& x : v) x /= nv;

  double lambda = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    apply(v, w);
    double rayleigh = 0.0, nw = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      rayleigh += v[i] * w[i];
      nw += w[i] * w[i];
    }
    nw = std::sqrt(nw);
    if (nw == 0.0) return 0.0;
    for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / nw;
    if (it > 0 && std::abs(rayleigh - lambda) <= rel_tol * std::abs(rayleigh)) {
      return rayleigh;
    }
    lambda = rayleigh;
  }
  return lambda;
}

}  // namespace sgkl
