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

#include "sgkl/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "sgkl/error.hpp"

namespace sgkl {

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw ParameterError("normal_quantile: u must lie in (0, 1)");
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

double gaussian_abs_moment_root(double p) {
  if (!(p > 0.0)) throw ParameterError("gaussian_abs_moment_root: p <= 0");
  const double log_moment = 0.5 * p * std::log(2.0) +
                            std::lgamma(0.5 * (p + 1.0)) -
                            0.5 * std::log(std::numbers::pi);
  return std::exp(log_moment / p);
}

double mixture_constant(double p) {
  return std::max(1.0, 0.5 * gaussian_abs_moment_root(p) + 1.0 / 3.0);
}

double convolution_prefactor(double p) {
  if (!(p >= 1.0)) throw ParameterError("convolution_prefactor: p < 1");
  const double rate = std::pow(1.0 - std::pow(2.0, -2.0 * p), 1.0 / p);
  return mixture_constant(p) / (1.0 - rate);
}

double exp_quadratic_constant() { return (std::exp(4.0) - 5.0) / 16.0; }

}  // namespace sgkl
