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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "sgkl/error.hpp"
#include "sgkl/idx_reader.hpp"
#include "sgkl/model.hpp"
#include "sgkl/rng.hpp"

namespace sgkl {
namespace {

void expect_gradient_matches_value(const Potential& pot, rng::Stream& rng,
                                   double spread) {
  const std::size_t d = pot.dim();
  const double eps = 1e-4;
  Vec x(d), e(d), g(d), xp(d), xm(d);
  for (int probe = 0; probe < 100; ++probe) {
    rng.fill_normal(x);
    for (double& v : x) v *= spread;
    rng.fill_normal(e);
    const double en = norm(e);
    for (double& v : e) v /= en;
    pot.gradient(x, g);
    for (std::size_t i = 0; i < d; ++i) {
      xp[i] = x[i] + eps * e[i];
      xm[i] = x[i] - eps * e[i];
    }
    const double fd = (pot.value(xp) - pot.value(xm)) / (2.0 * eps);
    EXPECT_NEAR(fd, dot(g, e), 1e-5 * std::max(1.0, std::abs(fd)))
        << "probe " << probe;
  }
}

TEST(ToyTargetMoments, SingleUnitComponent) {
  const QuadraticMixturePotential pot({0.0}, {1.0});
  const auto m = toy_target_moments(pot);
  EXPECT_DOUBLE_EQ(m.mean, 0.0);
  EXPECT_DOUBLE_EQ(m.variance, 0.5);
}

TEST(ToyTargetMoments, PaperToy) {
  const auto toy = QuadraticMixturePotential::toy();
  const auto m = toy_target_moments(toy);
  // 4(x+1)^2 + (x-1)^2/4 has precision 2 * 4.25 and minimiser -15/17.
  EXPECT_NEAR(m.mean, -15.0 / 17.0, 1e-15);
  EXPECT_NEAR(m.variance, 1.0 / 8.5, 1e-15);
  EXPECT_DOUBLE_EQ(toy.strong_convexity(), 8.5);
  EXPECT_DOUBLE_EQ(toy.smoothness(), 8.5);
}

TEST(ToyTargetMoments, SymmetricPair) {
  const QuadraticMixturePotential pot({-1.0, 1.0}, {1.0, 1.0});
  EXPECT_NEAR(toy_target_moments(pot).mean, 0.0, 1e-15);
}

TEST(ToyTargetMoments, RejectsNonPositiveWidth) {
  EXPECT_THROW(QuadraticMixturePotential({0.0}, {0.0}), ParameterError);
}

TEST(ToyTargetMoments, ExactSamplerMatchesClosedForm) {
  const auto toy = QuadraticMixturePotential::toy();
  const auto m = toy_target_moments(toy);
  rng::Stream rng(17, 0);
  const std::size_t n = 1000000;
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = m.mean + std::sqrt(m.variance) * rng.normal();
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  EXPECT_LE(std::abs(mean - m.mean), 4.0 * std::sqrt(m.variance / n));
  EXPECT_LE(std::abs(var - m.variance), 4.0 * m.variance * std::sqrt(2.0 / n));
}

TEST(Potentials, FiniteDifferenceGradients) {
  rng::Stream rng(3, 0);
  const QuadraticPotential quad({1.0, 2.0, 3.5}, {0.5, -1.0, 2.0});
  expect_gradient_matches_value(quad, rng, 2.0);
  expect_gradient_matches_value(QuadraticMixturePotential::toy(), rng, 2.0);
  const auto blr = make_synthetic_logistic(4, 60, 2.0, 5);
  expect_gradient_matches_value(blr, rng, 1.0);
}

TEST(Potentials, CurvatureMetadata) {
  const QuadraticPotential quad({1.0, 4.0}, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(quad.strong_convexity(), 1.0);
  EXPECT_DOUBLE_EQ(quad.smoothness(), 4.0);
  EXPECT_DOUBLE_EQ(quad.condition_number(), 4.0);
  const auto blr = make_synthetic_logistic(3, 40, 0.5, 2);
  EXPECT_LE(blr.strong_convexity(), blr.smoothness());
  EXPECT_DOUBLE_EQ(blr.condition_number(),
                   blr.smoothness() / blr.strong_convexity());
}

TEST(LogisticRegression, ValueMatchesDefinition) {
  const auto blr = make_synthetic_logistic(3, 25, 0.7, 9);
  rng::Stream rng(1, 0);
  Vec q(3);
  rng.fill_normal(q);
  double expected = dot(q, q) / (2.0 * 0.7);
  for (std::size_t i = 0; i < blr.observations(); ++i) {
    const double a = dot(blr.row(i), q);
    expected += std::log1p(std::exp(a)) - blr.label(i) * a;
  }
  EXPECT_NEAR(blr.value(q), expected, 1e-10 * std::abs(expected));
}

TEST(LogisticRegression, SmoothnessFromGramMatrix) {
  const std::size_t d = 4, n = 80;
  const auto blr = make_synthetic_logistic(d, n, 0.5, 21);
  Eigen::MatrixXd X(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) X(i, j) = blr.row(i)[j];
  }
  const Eigen::MatrixXd gram = X.transpose() * X;
  const double lmax =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues().maxCoeff();
  EXPECT_NEAR(blr.smoothness(), 1.0 / 0.5 + 0.25 * lmax, 1e-6 * lmax);
  EXPECT_DOUBLE_EQ(blr.strong_convexity(), 2.0);
}

TEST(FindMode, QuadraticCenter) {
  const QuadraticPotential quad({1.0, 3.0}, {2.0, -1.5});
  const Vec q = find_mode(quad, Vec{10.0, 10.0});
  EXPECT_NEAR(q[0], 2.0, 1e-8);
  EXPECT_NEAR(q[1], -1.5, 1e-8);
}

TEST(FindMode, ToyMode) {
  const Vec q = find_mode(QuadraticMixturePotential::toy(), Vec{3.0});
  EXPECT_NEAR(q[0], -15.0 / 17.0, 1e-8);
}

TEST(FindMode, SyntheticLogisticGradientBelowTolerance) {
  const auto blr = make_synthetic_logistic(2, 50, 1.0, 4);
  ModeOptions opts;
  opts.tolerance = 1e-9;
  const Vec q = find_mode(blr, Vec{0.0, 0.0}, opts);
  EXPECT_LE(norm(blr.gradient(q)), 1e-9);
}

TEST(FindMode, IterationCapRaisesNonConvergence) {
  const auto blr = make_synthetic_logistic(2, 50, 1.0, 4);
  ModeOptions opts;
  opts.max_iterations = 1;
  EXPECT_THROW(find_mode(blr, Vec{5.0, 5.0}, opts), NonConvergenceError);
}

void write_be32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

TEST(IdxReader, TenImageFixture) {
  const auto dir = std::filesystem::temp_directory_path() / "sgkl_idx_fixture";
  std::filesystem::create_directories(dir);
  const std::uint8_t digits[10] = {3, 5, 1, 3, 5, 5, 7, 3, 0, 5};
  {
    std::ofstream img(dir / "images.idx", std::ios::binary);
    write_be32(img, idx::kImageMagic);
    write_be32(img, 10);
    write_be32(img, 2);
    write_be32(img, 3);
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 6; ++j) img.put(static_cast<char>(i * 20 + j * 5));
    }
    std::ofstream lab(dir / "labels.idx", std::ios::binary);
    write_be32(lab, idx::kLabelMagic);
    write_be32(lab, 10);
    lab.write(reinterpret_cast<const char*>(digits), 10);
  }
  const auto set = idx::read_images(dir / "images.idx");
  EXPECT_EQ(set.count, 10u);
  EXPECT_EQ(set.rows, 2u);
  EXPECT_EQ(set.cols, 3u);
  EXPECT_EQ(set.pixels[7 * 6 + 2], 7 * 20 + 10);

  const auto blr = idx::load_digit_pair(dir / "images.idx", dir / "labels.idx", 1.0);
  EXPECT_EQ(blr.dim(), 6u);
  ASSERT_EQ(blr.observations(), 7u);  // three 3s and four 5s
  EXPECT_EQ(blr.label(0), 1);
  EXPECT_EQ(blr.label(1), 0);
  EXPECT_DOUBLE_EQ(blr.row(1)[5], (20.0 + 25.0) / 255.0);

  {
    std::ofstream bad(dir / "bad.idx", std::ios::binary);
    write_be32(bad, 0x12345678);
  }
  EXPECT_THROW(idx::read_images(dir / "bad.idx"), Error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace sgkl
