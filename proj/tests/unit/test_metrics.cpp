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
#include <vector>

#include <gtest/gtest.h>

#include "sgkl/error.hpp"
#include "sgkl/metrics.hpp"
#include "sgkl/rng.hpp"
#include "sgkl/special.hpp"

namespace sgkl {
namespace {

SortedSample normal_sample(rng::Stream& rng, std::size_t n, double mean, double sd) {
  Vec v(n);
  rng.fill_normal(v);
  for (double& x : v) x = mean + sd * x;
  return SortedSample(std::move(v));
}

TEST(SortedSample, SortsAndValidates) {
  const SortedSample s(Vec{3.0, -1.0, 2.0});
  EXPECT_EQ(s[0], -1.0);
  EXPECT_EQ(s[2], 3.0);
  EXPECT_THROW(SortedSample(Vec{}), ParameterError);
  EXPECT_THROW(SortedSample(Vec{1.0, NAN}), Error);
}

TEST(W1Sorted, Examples) {
  const SortedSample a(Vec{-1.0, 1.0}), b(Vec{0.0, 2.0});
  EXPECT_DOUBLE_EQ(w1_sorted(a, a), 0.0);
  EXPECT_DOUBLE_EQ(w1_sorted(a, b), 1.0);
  EXPECT_DOUBLE_EQ(w2_sorted(a, b), 1.0);
  EXPECT_THROW(w1_sorted(a, SortedSample(Vec{1.0})), ParameterError);
}

TEST(W1Sorted, TranslatedGaussians) {
  rng::Stream rng(1, 0);
  const double m = 0.37;
  const auto xs = normal_sample(rng, 1000000, 0.0, 1.0);
  const auto ys = normal_sample(rng, 1000000, m, 1.0);
  EXPECT_NEAR(w1_sorted(xs, ys), m, 3e-3);
}

TEST(W1ToNormal, AgainstQuantileQuadratureAndLargeSample) {
  rng::Stream rng(2, 0);
  const auto xs = normal_sample(rng, 2000, 0.3, 1.4);
  // Integrate |Q_n(u) - Q(u)| over each block with many midpoint nodes.
  const std::size_t n = xs.size();
  const int per_block = 400;
  double quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < per_block; ++j) {
      const double u = (double(i) + (j + 0.5) / per_block) / double(n);
      quad += std::abs(xs[i] - (0.3 + 1.4 * normal_quantile(u)));
    }
  }
  quad /= double(n * per_block);
  EXPECT_NEAR(w1_to_normal(xs, 0.3, 1.4), quad, 2e-5);
  // Exact W1 against N(mean, sd) is 0 only in the limit; a shifted sample
  // has distance close to the shift.
  const auto big = normal_sample(rng, 1000000, 1.0, 1.0);
  EXPECT_NEAR(w1_to_normal(big, 0.0, 1.0), 1.0, 3e-3);
  EXPECT_THROW(w1_to_normal(xs, 0.0, 0.0), ParameterError);
}

TEST(WpQuantile, TranslationScalingAndSelfError) {
  const QuantileFn q0 = [](double u) { return normal_quantile(u); };
  const QuantileFn q1 = [](double u) { return 0.8 + normal_quantile(u); };
  EXPECT_EQ(wp_quantile_1d(q0, q0, 2.0), 0.0);
  EXPECT_NEAR(wp_quantile_1d(q0, q1, 2.0), 0.8, 1e-12);
  EXPECT_NEAR(wp_quantile_1d(q0, q1, 1.0), 0.8, 1e-12);
  // N(0,1) vs N(0,4): W2 = 1, W1 = E|Z| = sqrt(2/pi). The integrand is
  // unbounded at the endpoints, so midpoint error decays like log(n)/n.
  const QuantileFn q2 = [](double u) { return 2.0 * normal_quantile(u); };
  EXPECT_NEAR(wp_quantile_1d(q0, q2, 2.0), 1.0, 3e-5);
  EXPECT_NEAR(wp_quantile_1d(q0, q2, 1.0), std::sqrt(2.0 / M_PI), 1e-5);
  EXPECT_LT(std::abs(wp_quantile_1d(q0, q2, 2.0, 1 << 18) - 1.0),
            std::abs(wp_quantile_1d(q0, q2, 2.0) - 1.0));
  const QuantileFn bad = [](double) { return NAN; };
  EXPECT_THROW(wp_quantile_1d(q0, bad, 1.0), NumericError);
  EXPECT_THROW(wp_quantile_1d(q0, q1, 0.5), ParameterError);
}

TEST(WpQuantile, TwoComponentBelowMixtureConstantBound) {
  const double delta = 0.5;
  const QuantileFn q0 = [](double u) { return normal_quantile(u); };
  const QuantileFn qd = mixture_quantile_fn({{0.5, delta, 1.0}, {0.5, -delta, 1.0}});
  EXPECT_LE(wp_quantile_1d(q0, qd, 2.0), mixture_constant(2.0) * delta * delta);
  EXPECT_LE(wp_quantile_1d(q0, qd, 1.0), mixture_constant(1.0) * delta * delta);
  // Bounded, smooth quantile difference: n vs 2n agree to 1e-6 relative.
  for (double p : {1.0, 2.0}) {
    const double a = wp_quantile_1d(q0, qd, p);
    const double b = wp_quantile_1d(q0, qd, p, 1 << 17);
    EXPECT_LE(std::abs(a - b), 1e-6 * b);
  }
}

TEST(MixtureQuantile, Examples) {
  const std::vector<MixtureComponent> one{{1.0, 0.0, 1.0}};
  EXPECT_NEAR(mixture_quantile(one, 0.5), 0.0, 1e-12);
  const std::vector<MixtureComponent> sym{{0.5, -1.0, 1.0}, {0.5, 1.0, 1.0}};
  EXPECT_NEAR(mixture_quantile(sym, 0.5), 0.0, 1e-12);
  const double u = normal_cdf(1.0);
  const double q = mixture_quantile(sym, u);
  EXPECT_LE(std::abs(mixture_cdf(sym, q) - u), 1e-10);
  const std::vector<MixtureComponent> skew{{0.2, -30.0, 0.1}, {0.8, 40.0, 3.0}};
  for (double v : {1e-9, 0.1, 0.2, 0.2000001, 0.7, 1 - 1e-9}) {
    EXPECT_LE(std::abs(mixture_cdf(skew, mixture_quantile(skew, v)) - v), 1e-10);
  }
  EXPECT_THROW(mixture_quantile(sym, 0.0), ParameterError);
  EXPECT_THROW(mixture_quantile(std::vector<MixtureComponent>{{0.3, 0.0, 1.0}}, 0.5),
               ParameterError);
}

TEST(WeightedNorm, Examples) {
  const Vec e1{1.0, 0.0};
  EXPECT_DOUBLE_EQ(WeightedNorm(1.0, 0.0).squared(Vec{3.0, 4.0}, Vec{7.0, 7.0}),
                   25.0 + 98.0);
  EXPECT_DOUBLE_EQ(WeightedNorm(1.0, 0.1).squared(e1, e1), 2.2);
  EXPECT_THROW(WeightedNorm(1.0, 1.0), ParameterError);
  EXPECT_THROW(WeightedNorm(0.0, 0.0), ParameterError);
  const auto wn = WeightedNorm::for_target(4.0, std::sqrt(32.0));
  EXPECT_DOUBLE_EQ(wn.a, 0.25);
  EXPECT_DOUBLE_EQ(wn.b, 1.0 / std::sqrt(32.0));
  EXPECT_TRUE(wn.equivalence_regime());
}

// With b^2 < a/4: (1/2)(|x|^2 + a|v|^2) <= |z|_{a,b}^2 <= (3/2)(|x|^2 + a|v|^2).
TEST(WeightedNorm, EquivalenceSandwich) {
  rng::Stream rng(5, 0);
  Vec x(3), v(3);
  for (int k = 0; k < 10000; ++k) {
    const double a = 0.01 + 4.0 * rng.uniform();
    const double b = std::sqrt(a / 4.0) * rng.uniform() * 0.999;
    const WeightedNorm wn(a, b);
    ASSERT_TRUE(wn.equivalence_regime());
    rng.fill_normal(x);
    rng.fill_normal(v);
    const double base = dot(x, x) + a * dot(v, v);
    const double q = wn.squared(x, v);
    ASSERT_GE(q, 0.5 * base * (1 - 1e-12));
    ASSERT_LE(q, 1.5 * base * (1 + 1e-12));
  }
}

TEST(TestFunctions, FkAndMaxCoordinate) {
  const Vec x{3.0, -4.0, 1.0};
  EXPECT_DOUBLE_EQ(f_k(x, 3), std::sqrt(26.0));
  EXPECT_DOUBLE_EQ(f_k(x, 1), 4.0);
  // Brute force over 2-subsets.
  double best = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      best = std::max(best, std::hypot(x[i], x[j]));
    }
  }
  EXPECT_DOUBLE_EQ(f_k(x, 2), best);
  EXPECT_DOUBLE_EQ(f_k(x, 2), 5.0);
  EXPECT_THROW(f_k(x, 0), ParameterError);
  EXPECT_THROW(f_k(x, 4), ParameterError);
  EXPECT_EQ(max_coordinate(Vec{0.0, 0.0}), 0.0);
  EXPECT_EQ(max_coordinate(Vec{-1.0, 0.0, 0.0}), 0.0);
}

TEST(TestFunctions, FkIsOneLipschitz) {
  rng::Stream rng(6, 0);
  Vec x(12), y(12), d(12);
  for (int k = 0; k < 10000; ++k) {
    rng.fill_normal(x);
    rng.fill_normal(y);
    for (int i = 0; i < 12; ++i) d[i] = x[i] - y[i];
    const std::size_t kk = 1 + rng.below(12);
    ASSERT_LE(std::abs(f_k(x, kk) - f_k(y, kk)), norm(d) + 1e-12);
    ASSERT_LE(std::abs(max_coordinate(x) - max_coordinate(y)), norm(d) + 1e-12);
  }
}

TEST(TestFunctions, ExpectedMaxOfNormalsBelowBound) {
  rng::Stream rng(7, 0);
  Vec z(100);
  const int n = 20000;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    rng.fill_normal(z);
    s += max_coordinate(z);
  }
  EXPECT_LE(s / n, std::sqrt(2.0 * std::log(100.0)));
}

TEST(ExactWpSmall, Examples) {
  const auto x = WeightedAtoms::uniform(1, {0.0, 1.0});
  const auto y = WeightedAtoms::uniform(1, {0.1, 1.1});
  EXPECT_NEAR(exact_wp_small(x, x, 1.0), 0.0, 1e-15);
  // Matchings with unit masses: parallel 0.1 + 0.1 = 0.2, crossing 1.1 + 0.9.
  // The returned value is per unit mass.
  WeightedAtoms ux = x, uy = y;
  ux.weights = {1.0, 1.0};
  uy.weights = {1.0, 1.0};
  EXPECT_NEAR(2.0 * exact_wp_small(ux, uy, 1.0), 0.2, 1e-12);
  EXPECT_NEAR(exact_wp_small(x, y, 1.0), 0.1, 1e-12);
  WeightedAtoms light = y;
  light.weights = {0.1, 0.1};
  EXPECT_THROW(exact_wp_small(x, light, 1.0), ParameterError);
}

TEST(ExactWpSmall, AgreesWithSortedAndQuadratureIn1d) {
  rng::Stream rng(8, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.below(30);
    Vec a(n), b(n);
    rng.fill_normal(a);
    rng.fill_normal(b);
    const auto wa = WeightedAtoms::uniform(1, a);
    const auto wb = WeightedAtoms::uniform(1, b);
    const SortedSample sa(a), sb(b);
    for (double p : {1.0, 2.0}) {
      const double sorted = wp_sorted(sa, sb, p);
      EXPECT_NEAR(exact_wp_small(wa, wb, p), sorted, 1e-9);
      // Empirical quantile functions integrate exactly with n-aligned nodes.
      const QuantileFn qa = [&](double u) {
        return sa[std::min(n - 1, static_cast<std::size_t>(u * double(n)))];
      };
      const QuantileFn qb = [&](double u) {
        return sb[std::min(n - 1, static_cast<std::size_t>(u * double(n)))];
      };
      EXPECT_NEAR(wp_quantile_1d(qa, qb, p, n * 64), sorted, 1e-9);
    }
  }
}

TEST(ExactWpSmall, TriangleInequalityAndSymmetryIn2d) {
  rng::Stream rng(9, 0);
  for (int trial = 0; trial < 20; ++trial) {
    Vec a(12), b(12), c(12);
    rng.fill_normal(a);
    rng.fill_normal(b);
    rng.fill_normal(c);
    const auto wa = WeightedAtoms::uniform(2, a);
    const auto wb = WeightedAtoms::uniform(2, b);
    const auto wc = WeightedAtoms::uniform(2, c);
    for (double p : {1.0, 2.0}) {
      const double ab = exact_wp_small(wa, wb, p);
      EXPECT_NEAR(ab, exact_wp_small(wb, wa, p), 1e-12);
      EXPECT_LE(exact_wp_small(wa, wc, p),
                ab + exact_wp_small(wb, wc, p) + 1e-12);
    }
  }
}

}  // namespace
}  // namespace sgkl
