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


#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "sgkl/error.hpp"
#include "sgkl/gradients.hpp"
#include "sgkl/model.hpp"
#include "sgkl/rng.hpp"

namespace sgkl {
namespace {

struct RunningMoments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / double(n);
    m2 += delta * (x - mean);
  }
  double se() const { return std::sqrt(m2 / double(n - 1) / double(n)); }
};

// Zero-mean test of the projected gradient error at 20 random points.
void expect_unbiased(const GradientEstimator& est, rng::Stream& rng,
                     std::size_t draws) {
  const std::size_t d = est.dim();
  Vec x(d), u(d), g(d), exact(d);
  for (int point = 0; point < 20; ++point) {
    rng.fill_normal(x);
    rng.fill_normal(u);
    const double un = norm(u);
    for (double& v : u) v /= un;
    est.potential().gradient(x, exact);
    RunningMoments rm;
    for (std::size_t k = 0; k < draws; ++k) {
      est.sample(x, rng, g);
      rm.add(dot(u, g) - dot(u, exact));
    }
    EXPECT_LE(std::abs(rm.mean), 3.0 * rm.se() + 1e-12 * (1.0 + norm(exact)))
        << est.name() << " point " << point;
  }
}

TEST(SampleSpike, ZeroProbabilityIsAlwaysZero) {
  rng::Stream rng(1, 0);
  Vec out(5);
  for (int i = 0; i < 1000; ++i) {
    sample_spike(3.0, 5, 0.0, rng, out);
    for (double v : out) ASSERT_EQ(v, 0.0);
  }
}

TEST(SampleSpike, SupportFrequenciesAndCovariance) {
  rng::Stream rng(2, 0);
  const std::size_t d = 4;
  const double s = 2.0;
  const std::size_t n = 1000000;
  Vec out(d);
  std::vector<double> cov(d * d, 0.0);
  std::map<std::pair<std::size_t, int>, int> freq;
  for (std::size_t k = 0; k < n; ++k) {
    sample_spike(s, d, 1.0, rng, out);
    int nonzero = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (out[i] != 0.0) {
        ++nonzero;
        ASSERT_EQ(std::abs(out[i]), s);
        ++freq[{i, out[i] > 0 ? 1 : -1}];
      }
    }
    ASSERT_EQ(nonzero, 1);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) cov[i * d + j] += out[i] * out[j];
    }
  }
  // Diagonal entries are s^2 times a Bernoulli(1/d) mean; off-diagonals are 0.
  const double p = 1.0 / d;
  const double se_diag = s * s * std::sqrt(p * (1 - p) / n);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double expected = i == j ? s * s / d : 0.0;
      EXPECT_NEAR(cov[i * d + j] / n, expected, 4.0 * se_diag);
    }
  }
  double chi2 = 0.0;
  const double e = double(n) / (2.0 * d);
  for (const auto& [key, c] : freq) chi2 += (c - e) * (c - e) / e;
  EXPECT_EQ(freq.size(), 2 * d);
  EXPECT_LT(chi2, 18.475);  // chi^2_7 upper 1% point
}

TEST(SampleSpike, FrobeniusNormAlongQuarterPowerScaling) {
  const std::size_t d = 64;
  const double s = std::pow(double(d), 0.25);
  const SpikeNoise law{s, d, 1.0};
  // Sigma = (s^2/d) I, so |Sigma|_F = s^2 / sqrt(d).
  EXPECT_NEAR(noise_variance(law) * std::sqrt(double(d)), 1.0, 1e-14);
}

TEST(SampleSpike, RejectsBadParameters) {
  rng::Stream rng(1, 0);
  Vec out(1);
  EXPECT_THROW(sample_spike(1.0, 1, 1.0, rng, out), ParameterError);
  Vec out3(3);
  EXPECT_THROW(sample_spike(-1.0, 3, 1.0, rng, out3), ParameterError);
  EXPECT_THROW(sample_spike(1.0, 3, 1.5, rng, out3), ParameterError);
}

TEST(Minibatch, FullBatchOfSingleComponentIsExact) {
  const QuadraticMixturePotential pot({0.3}, {1.5});
  rng::Stream rng(1, 0);
  const Vec g = minibatch_gradient(pot, Vec{0.7}, 1, rng);
  EXPECT_DOUBLE_EQ(g[0], pot.gradient(Vec{0.7})[0]);
}

TEST(Minibatch, ToyBatchOneTakesTwoValues) {
  const auto toy = QuadraticMixturePotential::toy();
  const MinibatchGradient est(toy, 1);
  const double x = 0.4;
  // 2 grad U_1 = 2 * 8 (x + 1), 2 grad U_2 = 2 * 0.5 (x - 1).
  const double g1 = 16.0 * (x + 1.0), g2 = 1.0 * (x - 1.0);
  rng::Stream rng(3, 0);
  Vec out(1);
  int n1 = 0, n2 = 0;
  for (int i = 0; i < 10000; ++i) {
    est.sample(Vec{x}, rng, out);
    if (std::abs(out[0] - g1) < 1e-12) {
      ++n1;
    } else {
      ASSERT_NEAR(out[0], g2, 1e-12);
      ++n2;
    }
  }
  EXPECT_GT(n1, 4700);
  EXPECT_GT(n2, 4700);
  EXPECT_NEAR(0.5 * (g1 + g2), toy.gradient(Vec{x})[0], 1e-12);
}

TEST(Minibatch, ToyJacobianVarianceByEnumeration) {
  const auto toy = QuadraticMixturePotential::toy();
  const MinibatchGradient est(toy, 1);
  // Jacobians 16 and 1 against Hessian 8.5.
  const double expected = 0.5 * (7.5 * 7.5) + 0.5 * (7.5 * 7.5);
  ASSERT_TRUE(est.jacobian_variance().has_value());
  EXPECT_NEAR(*est.jacobian_variance(), expected, 1e-12);
  EXPECT_NEAR(*est.jacobian_variance(), 56.25, 1e-12);
  // Batch 2 with replacement: four equally likely ordered batches.
  const double b2 = 0.25 * (7.5 * 7.5) * 2.0;
  EXPECT_NEAR(quadratic_mixture_jacobian_variance(toy, 2), b2, 1e-12);
}

TEST(Minibatch, MeanAtModeIsZero) {
  const auto toy = QuadraticMixturePotential::toy();
  const MinibatchGradient est(toy, 1);
  rng::Stream rng(4, 0);
  RunningMoments rm;
  Vec out(1);
  for (int i = 0; i < 100000; ++i) {
    est.sample(Vec{-15.0 / 17.0}, rng, out);
    rm.add(out[0]);
  }
  EXPECT_LE(std::abs(rm.mean), 3.0 * rm.se());
}

TEST(Minibatch, RejectsBadBatchSize) {
  const auto toy = QuadraticMixturePotential::toy();
  EXPECT_THROW(MinibatchGradient(toy, 0), ParameterError);
  EXPECT_THROW(MinibatchGradient(toy, 3), ParameterError);
}

TEST(ControlVariate, DeterministicAtAnchor) {
  const auto blr = make_synthetic_logistic(3, 20, 1.0, 5);
  const Vec q_min = find_mode(blr, Vec(3, 0.0));
  const ControlVariateGradient cv(blr, q_min, 2);
  rng::Stream rng(1, 0);
  Vec first(3), g(3);
  cv.sample(q_min, rng, first);
  for (int i = 0; i < 1000; ++i) {
    cv.sample(q_min, rng, g);
    ASSERT_EQ(g, first);
  }
  const Vec exact = blr.gradient(q_min);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(first[i], exact[i], 1e-10);
}

TEST(ControlVariate, SingletonBatchAverageIsExactGradient) {
  const std::size_t d = 3, N = 20;
  const auto blr = make_synthetic_logistic(d, N, 1.0, 5);
  const Vec q_min = find_mode(blr, Vec(d, 0.0));
  const Vec full = full_likelihood_gradient(blr, q_min);
  const Vec q{0.3, -0.8, 1.1};
  Vec avg(d, 0.0), out(d);
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t batch[1] = {i};
    control_variate_gradient(blr, q, q_min, full, batch, out);
    for (std::size_t j = 0; j < d; ++j) avg[j] += out[j] / double(N);
  }
  const Vec exact = blr.gradient(q);
  for (std::size_t j = 0; j < d; ++j) EXPECT_NEAR(avg[j], exact[j], 1e-10);
}

TEST(ControlVariate, FullBatchIsExact) {
  const std::size_t d = 3, N = 20;
  const auto blr = make_synthetic_logistic(d, N, 1.0, 5);
  const Vec q_min = find_mode(blr, Vec(d, 0.0));
  const Vec full = full_likelihood_gradient(blr, q_min);
  std::vector<std::size_t> batch(N);
  std::iota(batch.begin(), batch.end(), 0);
  const Vec q{-0.4, 0.2, 0.9};
  Vec out(d);
  control_variate_gradient(blr, q, q_min, full, batch, out);
  const Vec exact = blr.gradient(q);
  for (std::size_t j = 0; j < d; ++j) EXPECT_NEAR(out[j], exact[j], 1e-10);
  EXPECT_THROW(control_variate_gradient(blr, q, q_min, full, {}, out),
               ParameterError);
}

TEST(NoiseInjected, ZeroLawIsExact) {
  const auto quad = QuadraticPotential::isotropic(3, 2.0);
  rng::Stream rng(1, 0);
  const Vec x{1.0, -2.0, 0.5};
  EXPECT_EQ(noise_injected_gradient(quad, ZeroNoise{}, x, rng), quad.gradient(x));
}

TEST(NoiseInjected, GaussianCovariance) {
  const auto quad = QuadraticPotential::isotropic(3, 1.0);
  const NoiseInjectedGradient est(quad, GaussianNoise{1.5});
  rng::Stream rng(2, 0);
  const Vec x{0.2, 0.0, -0.3};
  const Vec g0 = quad.gradient(x);
  const int n = 200000;
  double cov[3][3] = {};
  Vec g(3);
  for (int k = 0; k < n; ++k) {
    est.sample(x, rng, g);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) cov[i][j] += (g[i] - g0[i]) * (g[j] - g0[j]);
    }
  }
  const double c2 = 2.25;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double se = c2 * (i == j ? std::sqrt(2.0 / n) : std::sqrt(1.0 / n));
      EXPECT_NEAR(cov[i][j] / n, i == j ? c2 : 0.0, 4.0 * se);
    }
  }
  EXPECT_DOUBLE_EQ(*est.isotropic_noise_variance(), c2);
  EXPECT_DOUBLE_EQ(*est.jacobian_variance(), 0.0);
}

TEST(Unbiasedness, AllEstimators) {
  rng::Stream rng(9, 0);
  const auto toy = QuadraticMixturePotential::toy();
  const auto quad = QuadraticPotential::isotropic(8, 1.0);
  const auto blr = make_synthetic_logistic(4, 100, 1.0, 3);
  const Vec q_min = find_mode(blr, Vec(4, 0.0));
  expect_unbiased(ExactGradient(toy), rng, 1000);
  expect_unbiased(MinibatchGradient(toy, 1), rng, 100000);
  expect_unbiased(MinibatchGradient(blr, 5), rng, 20000);
  expect_unbiased(NoiseInjectedGradient(quad, GaussianNoise{1.0}), rng, 20000);
  expect_unbiased(NoiseInjectedGradient(quad, SpikeNoise{6.0, 8, 0.25}), rng, 20000);
  expect_unbiased(ControlVariateGradient(blr, q_min, 5), rng, 20000);
}

TEST(SigmaP, ZeroNoiseIsZero) {
  const auto quad = QuadraticPotential::isotropic(2, 1.0);
  const ExactGradient est(quad);
  rng::Stream rng(1, 0);
  const TargetSampler target = [](rng::Stream& r, std::span<double> x) {
    r.fill_normal(x);
  };
  EXPECT_EQ(estimate_sigma_p(est, target, 2.0, 1000, rng).value, 0.0);
  EXPECT_THROW(estimate_sigma_p(est, target, 2.0, 50, rng), ParameterError);
}

TEST(SigmaP, GaussianNoiseSecondMoment) {
  const std::size_t d = 5;
  const double c = 0.8;
  const auto quad = QuadraticPotential::isotropic(d, 1.0);
  const NoiseInjectedGradient est(quad, GaussianNoise{c});
  rng::Stream rng(2, 0);
  const TargetSampler target = [](rng::Stream& r, std::span<double> x) {
    r.fill_normal(x);
  };
  const Estimate e = estimate_sigma_p(est, target, 2.0, 100000, rng);
  EXPECT_NEAR(e.value, c * std::sqrt(double(d)), 3.0 * e.std_error);
}

TEST(SigmaP, SpikeNoiseSecondMoment) {
  const std::size_t d = 6;
  const double s = 3.0, pmix = 0.4;
  const auto quad = QuadraticPotential::isotropic(d, 1.0);
  const NoiseInjectedGradient est(quad, SpikeNoise{s, d, pmix});
  rng::Stream rng(3, 0);
  const TargetSampler target = [](rng::Stream& r, std::span<double> x) {
    r.fill_normal(x);
  };
  const Estimate e = estimate_sigma_p(est, target, 2.0, 200000, rng);
  EXPECT_NEAR(e.value, s * std::sqrt(pmix), 3.0 * e.std_error);
}

TEST(JacobianVariance, MonteCarloMatchesToyEnumeration) {
  const auto toy = QuadraticMixturePotential::toy();
  const MinibatchGradient est(toy, 1);
  rng::Stream rng(5, 0);
  const std::vector<Vec> probes{{-1.0}, {0.0}, {0.5}};
  const double cg = estimate_jacobian_variance(est, probes, 200, rng);
  // Both batches give |D G - Hess V|^2 = 7.5^2 exactly.
  EXPECT_NEAR(cg, 56.25, 1e-4);
}

}  // namespace
}  // namespace sgkl
