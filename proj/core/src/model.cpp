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

#include "sgkl/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "sgkl/error.hpp"
#include "sgkl/rng.hpp"

namespace sgkl {
namespace {

// log(1 + e^t) without overflow.
double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

Potential::Potential(double m, double L) : m_(m), L_(L) {
  if (!(m > 0.0) || !(L >= m) || !std::isfinite(L)) {
    throw ParameterError(
        fmt::format("potential curvature requires 0 < m <= L (m={}, L={})", m,
                    L));
  }
}

void SumPotential::gradient(std::span<const double> x,
                            std::span<double> out) const {
  base_gradient(x, out);
  Vec scratch(dim());
  for (std::size_t i = 0; i < component_count(); ++i) {
    component_gradient(i, x, scratch);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += scratch[j];
  }
}

// ---------------------------------------------------------------------------

namespace {
double checked_min(const Vec& v) {
  if (v.empty()) throw ParameterError("quadratic potential needs dim >= 1");
  return *std::min_element(v.begin(), v.end());
}
double checked_max(const Vec& v) {
  if (v.empty()) throw ParameterError("quadratic potential needs dim >= 1");
  return *std::max_element(v.begin(), v.end());
}
}  // namespace

QuadraticPotential::QuadraticPotential(Vec precisions, Vec center)
    : Potential(checked_min(precisions), checked_max(precisions)),
      precisions_(std::move(precisions)),
      center_(std::move(center)) {
  if (center_.size() != precisions_.size()) {
    throw ParameterError("quadratic potential: center/precision size mismatch");
  }
}

QuadraticPotential QuadraticPotential::isotropic(std::size_t dim,
                                                 double precision) {
  return QuadraticPotential(Vec(dim, precision), Vec(dim, 0.0));
}

double QuadraticPotential::value(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double r = x[j] - center_[j];
    s += precisions_[j] * r * r;
  }
  return 0.5 * s;
}

void QuadraticPotential::gradient(std::span<const double> x,
                                  std::span<double> out) const {
  for (std::size_t j = 0; j < x.size(); ++j) {
    out[j] = precisions_[j] * (x[j] - center_[j]);
  }
}

// ---------------------------------------------------------------------------

namespace {
double mixture_curvature(const Vec& centers, const Vec& widths) {
  if (centers.empty() || centers.size() != widths.size()) {
    throw ParameterError("quadratic mixture: need matching, non-empty centers "
                         "and widths");
  }
  double c = 0.0;
  for (double s : widths) {
    if (!(s > 0.0)) throw ParameterError("quadratic mixture: width <= 0");
    c += 2.0 / (s * s);
  }
  return c;
}
}  // namespace

QuadraticMixturePotential::QuadraticMixturePotential(Vec centers, Vec widths)
    : SumPotential(mixture_curvature(centers, widths),
                   mixture_curvature(centers, widths)),
      centers_(std::move(centers)),
      widths_(std::move(widths)) {}

QuadraticMixturePotential QuadraticMixturePotential::toy() {
  return QuadraticMixturePotential({-1.0, 1.0}, {0.5, 2.0});
}

double QuadraticMixturePotential::value(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    const double r = (x[0] - centers_[i]) / widths_[i];
    s += r * r;
  }
  return s;
}

void QuadraticMixturePotential::component_gradient(
    std::size_t i, std::span<const double> x, std::span<double> out) const {
  out[0] = component_curvature(i) * (x[0] - centers_[i]);
}

void QuadraticMixturePotential::base_gradient(std::span<const double>,
                                              std::span<double> out) const {
  out[0] = 0.0;
}

double QuadraticMixturePotential::component_curvature(std::size_t i) const {
  return 2.0 / (widths_[i] * widths_[i]);
}

GaussianMoments toy_target_moments(const QuadraticMixturePotential& toy) {
  double precision = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < toy.component_count(); ++i) {
    const double w = 1.0 / (toy.widths()[i] * toy.widths()[i]);
    precision += 2.0 * w;
    weighted += 2.0 * w * toy.centers()[i];
  }
  return {weighted / precision, 1.0 / precision};
}

// ---------------------------------------------------------------------------

namespace {

double logistic_L(std::size_t dim, const Vec& features, std::size_t n,
                  double prior_variance) {
  // lambda_max(X^T X) by power iteration on v -> X^T (X v).
  const double top = power_iteration(dim, [&](const Vec& v, Vec& w) {
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = features.data() + i * dim;
      double t = 0.0;
      for (std::size_t j = 0; j < dim; ++j) t += xi[j] * v[j];
      for (std::size_t j = 0; j < dim; ++j) w[j] += t * xi[j];
    }
  });
  return 1.0 / prior_variance + 0.25 * top;
}

double checked_prior(double prior_variance) {
  if (!(prior_variance > 0.0)) {
    throw ParameterError("logistic regression: prior variance must be > 0");
  }
  return prior_variance;
}

}  // namespace

LogisticRegressionPotential::LogisticRegressionPotential(
    std::size_t dim, Vec features, std::vector<std::uint8_t> labels,
    double prior_variance)
    : SumPotential(1.0 / checked_prior(prior_variance),
                   (dim == 0 || features.size() != labels.size() * dim)
                       ? throw ParameterError(
                             "logistic regression: feature matrix must be "
                             "observations x dim")
                       : logistic_L(dim, features, labels.size(),
                                    prior_variance)),
      dim_(dim),
      features_(std::move(features)),
      labels_(std::move(labels)),
      prior_variance_(prior_variance) {
  for (auto y : labels_) {
    if (y > 1) throw ParameterError("logistic regression: labels must be 0/1");
  }
}

double LogisticRegressionPotential::value(std::span<const double> q) const {
  double s = 0.5 * norm_squared(q) / prior_variance_;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const double t = dot(row(i), q);
    s += softplus(t) - labels_[i] * t;
  }
  return s;
}

void LogisticRegressionPotential::component_gradient(
    std::size_t i, std::span<const double> q, std::span<double> out) const {
  const auto xi = row(i);
  const double r = sigmoid(dot(xi, q)) - labels_[i];
  for (std::size_t j = 0; j < dim_; ++j) out[j] = r * xi[j];
}

void LogisticRegressionPotential::base_gradient(std::span<const double> q,
                                                std::span<double> out) const {
  for (std::size_t j = 0; j < dim_; ++j) out[j] = q[j] / prior_variance_;
}

double LogisticRegressionPotential::hessian_max_eigenvalue(
    std::span<const double> q) const {
  Vec weights(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const double s = sigmoid(dot(row(i), q));
    weights[i] = s * (1.0 - s);
  }
  return power_iteration(dim_, [&](const Vec& v, Vec& w) {
    for (std::size_t j = 0; j < dim_; ++j) w[j] = v[j] / prior_variance_;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      const auto xi = row(i);
      const double t = weights[i] * dot(xi, v);
      for (std::size_t j = 0; j < dim_; ++j) w[j] += t * xi[j];
    }
  });
}

LogisticRegressionPotential make_synthetic_logistic(std::size_t dim,
                                                    std::size_t observations,
                                                    double prior_variance,
                                                    std::uint64_t seed) {
  if (dim == 0 || observations == 0) {
    throw ParameterError("synthetic logistic: dim and observations must be > 0");
  }
  rng::Stream stream(seed, 0x10615);
  Vec truth(dim);
  for (double& t : truth) t = stream.normal() / std::sqrt(double(dim));
  Vec features(dim * observations);
  std::vector<std::uint8_t> labels(observations);
  for (std::size_t i = 0; i < observations; ++i) {
    double logit = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double x = stream.normal();
      features[i * dim + j] = x;
      logit += x * truth[j];
    }
    labels[i] = stream.uniform() < sigmoid(logit) ? 1 : 0;
  }
  return LogisticRegressionPotential(dim, std::move(features),
                                     std::move(labels), prior_variance);
}

// ---------------------------------------------------------------------------

Vec find_mode(const Potential& potential, std::span<const double> x0,
              const ModeOptions& options) {
  const std::size_t d = potential.dim();
  if (x0.size() != d) throw ParameterError("find_mode: x0 has wrong dimension");
  Vec x(x0.begin(), x0.end());
  Vec g(d), trial(d);
  potential.gradient(x, g);
  double fx = potential.value(x);
  double step = 1.0 / potential.smoothness();

  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const double gn2 = norm_squared(g);
    if (std::sqrt(gn2) <= options.tolerance) return x;
    if (!std::isfinite(gn2)) {
      throw NonConvergenceError("find_mode: non-finite gradient", x);
    }
    // Try a doubled step first so the step can grow back after shrinking.
    step *= 2.0;
    double ft = 0.0;
    for (int halvings = 0;; ++halvings) {
      for (std::size_t j = 0; j < d; ++j) trial[j] = x[j] - step * g[j];
      ft = potential.value(trial);
      const double decrease = 0.5 * step * gn2;
      // Once the required decrease is below the resolution of V, rounding
      // can satisfy the Armijo test spuriously; require a smaller gradient
      // norm instead.
      if (decrease <= 1e-14 * std::max(1.0, std::abs(fx))) {
        Vec gt(d);
        potential.gradient(trial, gt);
        if (norm_squared(gt) < gn2) break;
      } else if (ft <= fx - decrease) {
        break;
      }
      step *= 0.5;
      if (halvings > 200) {
        throw NonConvergenceError("find_mode: line search stalled", x);
      }
    }
    x.swap(trial);
    fx = ft;
    potential.gradient(x, g);
  }
  if (norm(g) <= options.tolerance) return x;
  throw NonConvergenceError(
      fmt::format("find_mode: {} iterations without reaching |grad| <= {}",
                  options.max_iterations, options.tolerance),
      x);
}

}  // namespace sgkl
