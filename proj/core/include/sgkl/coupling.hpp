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
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgkl/rng.hpp"
#include "sgkl/tolerances.hpp"
#include "sgkl/vector_ops.hpp"

namespace sgkl::coupling {

// 2n centred atoms in R^dim, row-major.
class AtomCloud {
 public:
  AtomCloud(std::size_t dim, Vec points);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return points_.size() / dim_; }
  std::size_t pairs() const { return size() / 2; }
  std::span<const double> atom(std::size_t i) const {
    return std::span<const double>(points_).subspan(i * dim_, dim_);
  }
  std::span<const double> points() const { return points_; }

  // sum_i |x_i|^{2p}
  double power_sum(double p) const;
  // (1/2n) sum_i |x_i|^{2p}
  double phi(double p) const { return power_sum(p) / double(size()); }

 private:
  std::size_t dim_;
  Vec points_;
};

// Subtracts the empirical mean. Throws ParameterError on an odd or zero
// atom count.
AtomCloud center_atoms(std::size_t dim, Vec points);

struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double energy = 0.0;  // sum over pairs of |x_i - x_j|^{2p}
  bool exhaustive = false;
  std::size_t draws = 0;  // random matchings examined
};

double matching_energy(const AtomCloud& cloud,
                       std::span<const std::pair<std::size_t, std::size_t>> pairs,
                       double p);

// Exhaustive maximum-energy search for clouds of at most
// kTolerances.exhaustive_matching_max_atoms atoms; otherwise the best of up
// to kTolerances.random_matching_draws uniform random perfect matchings,
// stopping early once the energy reaches half of sum |x_i|^{2p}. Throws
// SearchFailureError if that threshold is never met.
Matching find_high_energy_matching(const AtomCloud& cloud, double p,
                                   rng::Stream& rng);
Matching exhaustive_matching(const AtomCloud& cloud, double p);
Matching random_matching_search(const AtomCloud& cloud, double p,
                                rng::Stream& rng,
                                std::size_t max_draws =
                                    kTolerances.random_matching_draws);

// Replaces each matched pair by two copies of its midpoint and asserts
// Phi_2p(new) <= (1 - 2^{-2p}) Phi_2p(old).
AtomCloud midpoint_replace(const AtomCloud& cloud, const Matching& matching,
                           double p);

// (K_p / 4) ((1/n) sum_{(i,j)} |x_i - x_j|^{2p})^{1/p}.
double one_step_cost(const AtomCloud& cloud, const Matching& matching,
                     double p);

// W_p(N(0,1), (N(delta,1) + N(-delta,1))/2) by quantile quadrature.
double two_component_exact_wp(double delta, double p,
                              std::size_t n_quadrature =
                                  kTolerances.quadrature_nodes);

struct CertificateLevel {
  Matching matching;
  double cost = 0.0;
  double phi = 0.0;  // Phi_t before the replacement of this level
};

struct ChainCertificate {
  double p = 1.0;
  double phi0 = 0.0;
  std::vector<CertificateLevel> levels;
  double tail = 0.0;   // Phi_T^{1/(2p)}
  double total = 0.0;  // sum of costs + tail
  double closed_form = 0.0;

  std::string to_json() const;
};

// K_p / (1 - (1 - 2^{-2p})^{1/p}) * phi0^{1/p}.
double closed_form_chain_bound(double p, double phi0);

// Iterates match -> cost -> replace until Phi_T <= phi_relative_tolerance *
// Phi_0. Asserts the energy and contraction conditions at each level, the
// geometric cost decay, and total <= closed form; violations raise
// InvariantError naming the level.
ChainCertificate chain_certificate(
    const AtomCloud& cloud, double p, rng::Stream& rng,
    double phi_relative_tolerance = kTolerances.phi_relative_tolerance);

// Centres an even-size sample and returns the certified total.
double empirical_convolution_bound(std::size_t dim, Vec sample, double p,
                                   rng::Stream& rng,
                                   double phi_relative_tolerance =
                                       kTolerances.phi_relative_tolerance);

}  // namespace sgkl::coupling
