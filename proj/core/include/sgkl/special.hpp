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

namespace sgkl {

double normal_pdf(double x);
double normal_cdf(double x);
// Inverse of the standard normal CDF on (0, 1).
double normal_quantile(double u);

// C_p = (E|xi|^p)^{1/p} for xi ~ N(0, 1), from the closed-form absolute
// moment 2^{p/2} Gamma((p+1)/2) / sqrt(pi).
double gaussian_abs_moment_root(double p);

// K_p = max{1, C_p / 2 + 1/3}: the two-component mixture constant shared by
// the convolution bounds and the coupling pipeline.
double mixture_constant(double p);

// K_p / (1 - (1 - 2^{-2p})^{1/p}).
double convolution_prefactor(double p);

// c_4 = (e^4 - 5) / 16, the sup of (e^t - 1 - t) / t^2 on [-4, 4].
double exp_quadratic_constant();

}  // namespace sgkl
