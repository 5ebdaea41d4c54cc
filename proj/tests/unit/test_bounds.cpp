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


#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "sgkl/bounds.hpp"
#include "sgkl/error.hpp"
#include "sgkl/metrics.hpp"
#include "sgkl/rng.hpp"

namespace sgkl {
namespace {

const double kC4 = (std::exp(4.0) - 5.0) / 16.0;

WeightedAtoms random_centred(rng::Stream& rng, std::size_t max_atoms,
                             double radius) {
  const std::size_t n = 2 + rng.below(max_atoms - 1);
  Vec pts(n), w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = radius * (2.0 * rng.uniform() - 1.0);
    w[i] = 0.1 + rng.uniform();
    total += w[i];
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] /= total;
    mean += w[i] * pts[i];
  }
  double extent = 0.0;
  for (double& x : pts) {
    x -= mean;
    extent = std::max(extent, std::abs(x));
  }
  if (extent > radius) {
    for (double& x : pts) x *= radius / extent;
  }
  return WeightedAtoms{1, pts, w};
}

double moment(const WeightedAtoms& mu, double q) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    s += mu.weights[i] * std::pow(std::abs(mu.points[i]), q);
  }
  return s;
}

TEST(GeneralConvolutionBound, Examples) {
  EXPECT_EQ(general_convolution_bound(2.0, 0.0), 0.0);
  EXPECT_NEAR(general_convolution_bound(2.0, 1.0),
              1.0 / (1.0 - std::sqrt(15.0 / 16.0)), 1e-12);
  EXPECT_NEAR(general_convolution_bound(2.0, 1.0), 31.492, 1e-3);
  EXPECT_LE(general_convolution_bound(2.0, 1.0), 32.0);
  for (double p : {1.0, 2.0}) {
    EXPECT_LE(4.0 * general_convolution_bound(p, 1.0), 126.0);
  }
  EXPECT_THROW(general_convolution_bound(0.5, 1.0), ParameterError);
}

TEST(GeneralConvolutionBound, ScalingAndLargeP) {
  EXPECT_NEAR(general_convolution_bound(2.0, 9.0, 4.0),
              general_convolution_bound(2.0, 9.0) / 2.0, 1e-12);
  EXPECT_NEAR(general_convolution_bound(1.0, 9.0), 9.0 * 4.0, 1e-12);
  // E|xi|^10 = 9!! = 945, so K_10 = 945^{1/10}/2 + 1/3 > 1.
  const double k10 = std::pow(945.0, 0.1) / 2.0 + 1.0 / 3.0;
  ASSERT_GT(k10, 1.0);
  const double expected =
      k10 / (1.0 - std::pow(1.0 - std::pow(2.0, -20.0), 0.1)) * std::pow(3.0, 0.1);
  EXPECT_NEAR(general_convolution_bound(10.0, 3.0) / expected, 1.0, 1e-10);
}

TEST(RefinedBound, Examples) {
  EXPECT_EQ(refined_bound(0.0, 0.0), 0.0);
  const double expected = 0.2 + 0.2 + std::sqrt(2.0 * std::log1p(kC4 * 0.25));
  EXPECT_NEAR(refined_bound(0.2, 0.5), expected, 1e-12);
  EXPECT_NEAR(refined_bound(0.2, 0.5), 1.4712, 1e-3);
  // min(1, tau) saturates above 1.
  EXPECT_NEAR(refined_bound(3.0, 0.0), 4.0, 1e-12);
}

TEST(RefinedBound, CrudeFormDominates) {
  for (double tau = 0.0; tau <= 4.0; tau += 0.125) {
    for (double f = 0.0; f <= 3.0; f += 0.25) {
      EXPECT_GE(refined_bound_crude(tau, f), refined_bound(tau, f));
    }
  }
}

TEST(TailStatistics, SupportInsideUnitBall) {
  const auto mu = WeightedAtoms::uniform(2, {0.5, 0.0, -0.5, 0.0, 0.0, 0.3, 0.0, -0.3});
  const auto t = tail_and_truncated_cov(mu);
  EXPECT_EQ(t.tau1, 0.0);
  EXPECT_EQ(t.tau2, 0.0);
  EXPECT_NEAR(t.truncated_covariance[0], 0.125, 1e-15);
  EXPECT_NEAR(t.truncated_covariance[3], 0.045, 1e-15);
  EXPECT_NEAR(t.truncated_covariance[1], 0.0, 1e-15);
  EXPECT_NEAR(t.frobenius, std::hypot(0.125, 0.045), 1e-15);
}

TEST(TailStatistics, AtomsOutsideBallAreTruncated) {
  const auto mu = WeightedAtoms::uniform(2, {2.0, 0.0, -2.0, 0.0});
  const auto t = tail_and_truncated_cov(mu);
  EXPECT_DOUBLE_EQ(t.tau1, 2.0);
  EXPECT_DOUBLE_EQ(t.tau2, 2.0);
  EXPECT_EQ(t.frobenius, 0.0);
}

TEST(TailStatistics, SpikeBelowUnitScale) {
  const std::size_t d = 8;
  const double s = 0.9;
  Vec pts(2 * d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    pts[(2 * i) * d + i] = s;
    pts[(2 * i + 1) * d + i] = -s;
  }
  const auto t = tail_and_truncated_cov(WeightedAtoms::uniform(d, pts));
  EXPECT_EQ(t.tau1, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      EXPECT_NEAR(t.truncated_covariance[i * d + j], i == j ? s * s / d : 0.0, 1e-15);
    }
  }
}

TEST(TailStatistics, RejectsUncentred) {
  EXPECT_THROW(tail_and_truncated_cov(WeightedAtoms::uniform(1, {0.0, 1.0})),
               ParameterError);
}

TEST(PoincareBound, Examples) {
  EXPECT_EQ(poincare_bound(2.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(poincare_bound(2.0, 8.0), 4.0);
  // N(0, c^2 I_d): C_P = c^2, tr = c^2 d.
  const double c2 = 0.7, d = 9.0;
  EXPECT_NEAR(poincare_bound(c2, c2 * d), c2 * std::sqrt(d), 1e-12);
  EXPECT_NEAR(poincare_dimension_bound(c2, 9), c2 * 3.0, 1e-12);
}

// Density-ratio integral of the convolved measure against the standard
// Gaussian, by trapezoid quadrature on a wide grid.
double chi2_quadrature_1d(const WeightedAtoms& mu) {
  const double lo = -30.0, hi = 30.0;
  const int n = 200000;
  const double dx = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * dx;
    double nu = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
      nu += mu.weights[j] * std::exp(-0.5 * (x - mu.points[j]) * (x - mu.points[j]));
    }
    nu /= std::sqrt(2.0 * M_PI);
    const double g = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    s += (i == 0 || i == n ? 0.5 : 1.0) * nu * nu / g;
  }
  return s * dx - 1.0;
}

TEST(Chi2, Examples) {
  EXPECT_NEAR(chi2_convolution(WeightedAtoms::uniform(1, {0.0})).chi2, 0.0, 1e-15);
  // +-u with |u| = 1: the four ordered pairs give inner products 1, -1, -1, 1.
  const auto r = chi2_convolution(WeightedAtoms::uniform(2, {0.6, 0.8, -0.6, -0.8}));
  EXPECT_NEAR(r.chi2, std::cosh(1.0) - 1.0, 1e-12);
  EXPECT_NEAR(r.chi2, chi2_quadrature_1d(WeightedAtoms::uniform(1, {1.0, -1.0})), 1e-9);
  EXPECT_LE(r.chi2, r.bound);
  EXPECT_NEAR(r.transport_bound(), std::sqrt(2.0 * std::log1p(r.chi2)), 1e-15);
  EXPECT_THROW(chi2_convolution(WeightedAtoms::uniform(1, {2.5, -2.5})),
               ParameterError);
}

TEST(Chi2, DominanceAndTransportChain) {
  rng::Stream rng(11, 0);
  for (int k = 0; k < 100; ++k) {
    const auto mu = random_centred(rng, 8, 2.0);
    const auto r = chi2_convolution(mu);
    if (k < 10) EXPECT_NEAR(r.chi2, chi2_quadrature_1d(mu), 1e-8 * (1.0 + r.chi2));
    // Full covariance of the (already centred, radius-2) measure.
    const double var = moment(mu, 2.0);
    EXPECT_NEAR(r.bound, kC4 * var * var, 1e-12);
    EXPECT_LE(r.chi2, r.bound);
    EXPECT_GE(r.transport_bound(), convolved_wp_1d(mu, 2.0));
  }
}

TEST(MomentCorollary, Examples) {
  EXPECT_EQ(moment_corollary_bound(1, 0.0, 0.0), 0.0);
  EXPECT_NEAR(moment_corollary_bound(1, 1.0, 7.0), 2.0 + std::sqrt(2.0 * kC4), 1e-12);
  EXPECT_NEAR(moment_corollary_constant(), 4.4900, 1e-4);
  EXPECT_NEAR(moment_corollary_bound(2, 7.0, 4.0), 2.0 * moment_corollary_constant(), 1e-12);
  EXPECT_LE(moment_corollary_constant(), 5.0);
  EXPECT_THROW(moment_corollary_bound(3, 1.0, 1.0), ParameterError);
}

TEST(ConvolutionBounds, DominateExactTransport) {
  rng::Stream rng(12, 0);
  for (int k = 0; k < 100; ++k) {
    const auto mu = random_centred(rng, 8, 3.0);
    const double exact = convolved_wp_1d(mu, 2.0);
    const auto t = tail_and_truncated_cov(mu);
    const double m2 = moment(mu, 2.0), m4 = moment(mu, 4.0);
    EXPECT_LE(exact, general_convolution_bound(2.0, m4));
    EXPECT_LE(exact, refined_bound(t.tau2, t.frobenius));
    EXPECT_LE(exact, moment_corollary_bound(2, m2, m4));
    const double w1 = convolved_wp_1d(mu, 1.0);
    EXPECT_LE(w1, general_convolution_bound(1.0, m2));
    EXPECT_LE(w1, refined_bound(t.tau1, t.frobenius));
    EXPECT_LE(w1, moment_corollary_bound(1, m2, m4));
  }
}

BiasBoundInputs example_inputs() {
  BiasBoundInputs in;
  in.m = 1.0;
  in.L = 4.0;
  in.gamma = std::sqrt(32.0);
  in.d = 10;
  in.h = 0.01;
  in.c_g = 1.0;
  in.sigma_p = 2.0;
  in.convolution_term = 1.0;
  in.p = 2;
  return in;
}

// Written out term by term from the stated bound.
double bias_bound_reference(const BiasBoundInputs& in) {
  const double sd = std::sqrt(static_cast<double>(in.d));
  const double sl = std::sqrt(in.L);
  const double discretisation = 33.0 * sd * sl + 33.0 * sd * in.gamma;
  const double gradient = 15.0 * std::sqrt(in.c_g) * sd / sl;
  const double noise = 15.0 * in.sigma_p + 5.0 * in.convolution_term;
  const double denominator = in.m * in.L - 20.0 * in.h * in.c_g * in.gamma;
  return in.gamma * in.L * in.h * (discretisation + gradient + noise) / denominator;
}

TEST(BiasBound, ExampleAgreesWithReference) {
  const auto in = example_inputs();
  EXPECT_NEAR(sg_ubu_bias_bound(in) / bias_bound_reference(in), 1.0, 1e-12);
}

TEST(BiasBound, DeterministicGradientReduction) {
  auto in = example_inputs();
  in.c_g = 0.0;
  in.sigma_p = 0.0;
  in.convolution_term = 0.0;
  const double expected = in.gamma * in.L * in.h / (in.m * in.L) * 33.0 *
                          std::sqrt(10.0) * (2.0 + in.gamma);
  EXPECT_NEAR(sg_ubu_bias_bound(in), expected, 1e-12 * expected);
}

TEST(BiasBound, IncreasingInStepsize) {
  auto in = example_inputs();
  const double hmax = std::min(1.0 / (2.0 * in.gamma),
                               in.m * in.L / (20.0 * in.c_g * in.gamma));
  double prev = 0.0;
  for (int k = 1; k < 100; ++k) {
    in.h = hmax * k / 100.0;
    const double b = sg_ubu_bias_bound(in);
    EXPECT_GT(b, prev);
    prev = b;
  }
}

TEST(BiasBound, FirstOrderWithMomentPlugIn) {
  auto in = example_inputs();
  PlugInParams pp;
  pp.L = in.L;
  pp.sigma_2p = 1.5;
  in.convolution_term = plug_in_term(PlugInVariant::kMoment, pp);
  in.h = 1e-4;
  const double b1 = sg_ubu_bias_bound(in);
  in.h = 2e-4;
  const double b2 = sg_ubu_bias_bound(in);
  EXPECT_NEAR(b2 / b1, 2.0, 0.2);
}

TEST(BiasBound, RegimeViolationsNameTheConstraint) {
  auto in = example_inputs();
  in.h = 0.04;  // above mL/(20 C_G gamma) ~ 0.0354
  try {
    sg_ubu_bias_bound(in);
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("C_G"), std::string::npos) << e.what();
  }
  in = example_inputs();
  in.gamma = 5.0;
  EXPECT_THROW(sg_ubu_bias_bound(in), ParameterError);
}

TEST(PlugIn, Variants) {
  PlugInParams pp;
  pp.L = 4.0;
  pp.sigma_2p = 0.0;
  EXPECT_EQ(plug_in_term(PlugInVariant::kMoment, pp), 0.0);
  pp.sigma_2p = 1.0;
  EXPECT_DOUBLE_EQ(plug_in_term(PlugInVariant::kMoment, pp), 63.0);

  PlugInParams pc;
  pc.L = 4.0;
  pc.poincare_trace_integral = 9.0;
  EXPECT_DOUBLE_EQ(plug_in_term(PlugInVariant::kPoincare, pc), 6.0);

  PlugInParams ps;
  ps.L = 4.0;
  ps.tau_y = 0.0;
  ps.lambda_max_sq_mean = 9.0;
  ps.h = 0.1;
  ps.gamma = 2.0;
  ps.d = 16;
  EXPECT_NEAR(plug_in_term(PlugInVariant::kSecondMoment, ps),
              10.0 * std::exp(-0.2) * 4.0 * 3.0 / 2.0, 1e-12);
  ps.tau_y = 0.5;
  EXPECT_NEAR(plug_in_term(PlugInVariant::kSecondMoment, ps),
              8.0 * 0.5 / (0.01 * 2.0) + 10.0 * std::exp(-0.2) * 4.0 * 3.0 / 2.0,
              1e-10);

  PlugInParams missing;
  missing.L = 4.0;
  EXPECT_THROW(plug_in_term(PlugInVariant::kMoment, missing), ParameterError);
  EXPECT_THROW(plug_in_term(PlugInVariant::kPoincare, missing), ParameterError);
  EXPECT_THROW(plug_in_term(PlugInVariant::kSecondMoment, missing), ParameterError);
}

TEST(SpikeLowerBound, Examples) {
  EXPECT_EQ(spike_lower_bound(1.0, 64).value, 0.0);
  const double s = 4.0 * std::sqrt(20.0 * std::log(2.0));
  EXPECT_NEAR(s, 14.889, 5e-3);
  const auto b = spike_lower_bound(s, 1024);
  EXPECT_NEAR(b.value, s / 4.0, 1e-12);
  EXPECT_NEAR(b.value, 3.722, 2e-3);
  EXPECT_TRUE(b.clean_regime);
  EXPECT_FALSE(spike_lower_bound(s * 0.99, 1024).clean_regime);
  EXPECT_THROW(spike_lower_bound(1.0, 1), ParameterError);
}

// Along s = d^{1/4} the spike covariance has unit Frobenius norm while the
// lower bound grows without limit.
TEST(SpikeLowerBound, DivergesAlongQuarterPowerScaling) {
  double prev = 0.0;
  for (int e = 20; e <= 60; e += 4) {
    const double d = std::ldexp(1.0, e);
    const double s = std::pow(d, 0.25);
    const double frob = std::sqrt(d) * s * s / d;
    EXPECT_NEAR(frob, 1.0, 1e-12);
    const double v = spike_lower_bound(s, static_cast<std::size_t>(d)).value;
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_GT(prev, 1000.0);
}

TEST(ContractionFactor, Examples) {
  const double g = std::sqrt(32.0);
  EXPECT_EQ(contraction_factor(0.05, g, 1.0, 4.0, 0.0, 0), 1.0);
  EXPECT_NEAR(contraction_factor(0.05, g, 1.0, 4.0, 0.0, 2), 1.0 - 0.05 / (4.0 * g),
              1e-15);
  for (double h : {0.001, 0.01, 0.03}) {
    EXPECT_GE(contraction_factor(h, g, 1.0, 4.0, 1.0, 10),
              contraction_factor(h, g, 1.0, 4.0, 0.0, 10));
  }
  EXPECT_THROW(contraction_factor(0.1, g, 1.0, 4.0, 0.0, 2), ParameterError);
  EXPECT_THROW(contraction_factor(0.01, 5.0, 1.0, 4.0, 0.0, 2), ParameterError);
  EXPECT_THROW(contraction_factor(0.04, g, 1.0, 4.0, 1.0, 2), ParameterError);
}

}  // namespace
}  // namespace sgkl
