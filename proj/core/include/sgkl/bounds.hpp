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

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "sgkl/metrics.hpp"
#include "sgkl/vector_ops.hpp"

namespace sgkl {

// ---------------------------------------------------------------------------
// Gaussian convolution inequalities. The reference measure is N(0, s I).

// K_p / (1 - (1 - 2^{-2p})^{1/p}) * moment_2p^{1/p} / sqrt(s).
double general_convolution_bound(double p, double moment_2p, double s = 1.0);

// (tau + min(1, tau)) + sqrt(2 log(1 + c4 |Sigma~|_F^2)).
double refined_bound(double tau, double frobenius_truncated);

// The cruder 2 tau + sqrt(2 log(1 + c4 |Sigma~|_F^2)) form.
double refined_bound_crude(double tau, double frobenius_truncated);

// sqrt(C_P tr Sigma).
double poincare_bound(double poincare_constant, double trace_covariance);
// C_P sqrt(d).
double poincare_dimension_bound(double poincare_constant, std::size_t dim);

// (2 + sqrt(2 c4)) E|X|^2 for p = 1, (2 + sqrt(2 c4)) (E|X|^4)^{1/2} for p = 2.
double moment_corollary_bound(int p, double second_moment,
                              double fourth_moment);
double moment_corollary_constant();

// Tail quantities at threshold 1 and the covariance of the centred
// truncation X 1{|X| <= 1} - E[X 1{|X| <= 1}].
struct TailStatistics {
  std::size_t dim = 0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  Vec truncated_covariance;  // dim x dim, row-major
  double frobenius = 0.0;

  double tau(int p) const { return p == 1 ? tau1 : tau2; }
};

// Discrete measure; mean must vanish to kTolerances.discrete_mean_tolerance.
TailStatistics tail_and_truncated_cov(const WeightedAtoms& mu);

// Sample (n x dim, row-major); mean must vanish within 3 standard errors
// per coordinate.
TailStatistics tail_and_truncated_cov(std::span<const double> samples,
                                      std::size_t dim);

// chi^2(mu~ * g || g) = sum_ij w_i w_j exp(<x_i, x_j>) - 1 for a centred
// discrete mu~ supported in the ball of radius 2, together with
// c4 |Cov mu~|_F^2, which must dominate it.
struct Chi2Result {
  double chi2 = 0.0;
  double bound = 0.0;
  // sqrt(2 log(1 + chi2)), an upper bound on W_2(mu~ * g, g).
  double transport_bound() const;
};
Chi2Result chi2_convolution(const WeightedAtoms& mu_tilde);

// W_p(mu * N(0,1), N(0,1)) for a one-dimensional discrete mu, by midpoint
// quadrature of the quantile difference.
double convolved_wp_1d(const WeightedAtoms& mu, double p,
                       std::size_t n_quadrature = kTolerances.quadrature_nodes);

// ---------------------------------------------------------------------------
// SG-UBU asymptotic bias.

struct BiasBoundInputs {
  double h = 0.0;
  double gamma = 0.0;
  double m = 0.0;
  double L = 0.0;
  std::size_t d = 1;
  double c_g = 0.0;
  double sigma_p = 0.0;
  // 4 (E_pi W_p^p(mu_x * g, g))^{1/p} / (h^2 sqrt(L)), see plug_in_term.
  double convolution_term = 0.0;
  int p = 2;
};

// Throws ParameterError naming the violated stepsize/friction constraint.
void check_bias_regime(const BiasBoundInputs& in);

// gamma L h / (m L - 20 h C_G gamma) *
//   [33 sqrt(d)(sqrt(L) + gamma) + 5 (3 C_G^{1/2} sqrt(d)/sqrt(L)
//                                    + 3 sigma_p + T)].
double sg_ubu_bias_bound(const BiasBoundInputs& in);

enum class PlugInVariant {
  kMoment,     // finite 2p-th moment
  kPoincare,   // absolutely continuous noise with Poincare constants
  kSecondMoment,
};

std::string_view to_string(PlugInVariant v);

struct PlugInParams {
  double L = 0.0;
  std::optional<double> sigma_2p;                // (i)
  std::optional<double> poincare_trace_integral; // (ii) int C_P tr Cov dpi
  std::optional<double> tau_y;                   // (iii) tau_p(Y)
  std::optional<double> lambda_max_sq_mean;      // (iii) E lambda_max(Cov R)^2
  std::optional<double> h;                       // (iii)
  std::optional<double> gamma;                   // (iii)
  std::optional<std::size_t> d;                  // (iii)
};

// Upper bound on the convolution term T for each variant:
//   (i)   126 sigma_2p^2 / sqrt(L)
//   (ii)  4 sqrt(int C_P tr Cov dpi) / sqrt(L)
//   (iii) 8 tau_p(Y) / (h^2 sqrt(L))
//         + 10 e^{-h gamma} sqrt(d) (E lambda_max^2)^{1/2} / sqrt(L)
double plug_in_term(PlugInVariant variant, const PlugInParams& params);

// ---------------------------------------------------------------------------
// Contraction and the spike example.

// (1 - m h/(4 gamma) + 5 h^2 C_G / L)^{n/2}; regime checked.
double contraction_factor(double h, double gamma, double m, double L,
                          double c_g, std::size_t n);

struct SpikeLowerBound {
  double value = 0.0;        // max(0, s/2 - sqrt(2 log d))
  bool clean_regime = false; // s >= 4 sqrt(2 log d), where value >= s/4
};
SpikeLowerBound spike_lower_bound(double s, std::size_t d);

}  // namespace sgkl
