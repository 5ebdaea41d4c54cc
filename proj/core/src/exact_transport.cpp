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
#include <deque>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "sgkl/error.hpp"
#include "sgkl/metrics.hpp"

namespace sgkl {

namespace {

// Successive shortest paths on the transportation network
// source -> supplies -> demands -> sink with real-valued capacities.
class TransportSolver {
 public:
  TransportSolver(const Vec& supply, const Vec& demand, const Vec& cost)
      : n_(supply.size()), m_(demand.size()) {
    const std::size_t nodes = n_ + m_ + 2;
    graph_.resize(nodes);
    source_ = n_ + m_;
    sink_ = source_ + 1;
    for (std::size_t i = 0; i < n_; ++i) add_edge(source_, i, supply[i], 0.0);
    for (std::size_t j = 0; j < m_; ++j) {
      add_edge(n_ + j, sink_, demand[j], 0.0);
    }
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < m_; ++j) {
        add_edge(i, n_ + j, inf, cost[i * m_ + j]);
      }
    }
  }

  double solve(double total, double eps) {
    double flow = 0.0, cost = 0.0;
    const std::size_t nodes = graph_.size();
    std::vector<double> dist(nodes);
    std::vector<int> in_queue(nodes);
    std::vector<std::size_t> prev_edge(nodes);
    while (total - flow > eps) {
      // Bellman-Ford (queue based); residual graph has no negative cycles.
      std::fill(dist.begin(), dist.end(),
                std::numeric_limits<double>::infinity());
      std::fill(in_queue.begin(), in_queue.end(), 0);
      std::deque<std::size_t> queue{source_};
      dist[source_] = 0.0;
      while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        in_queue[u] = 0;
        for (std::size_t e : graph_[u]) {
          const Edge& edge = edges_[e];
          if (edge.cap <= eps) continue;
          const double nd = dist[u] + edge.cost;
          if (nd < dist[edge.to] - 1e-15 * (1.0 + std::abs(nd))) {
            dist[edge.to] = nd;
            prev_edge[edge.to] = e;
            if (!in_queue[edge.to]) {
              in_queue[edge.to] = 1;
              queue.push_back(edge.to);
            }
          }
        }
      }
      if (!std::isfinite(dist[sink_])) break;
      double push = total - flow;
      for (std::size_t v = sink_; v != source_;) {
        const Edge& edge = edges_[prev_edge[v]];
        push = std::min(push, edge.cap);
        v = edges_[prev_edge[v] ^ 1].to;
      }
      for (std::size_t v = sink_; v != source_;) {
        const std::size_t e = prev_edge[v];
        edges_[e].cap -= push;
        edges_[e ^ 1].cap += push;
        v = edges_[e ^ 1].to;
      }
      flow += push;
      cost += push * dist[sink_];
    }
    if (total - flow > std::max(eps, kTolerances.mass_balance_tolerance)) {
      throw NumericError("transport flow did not saturate");
    }
    return cost;
  }

 private:
  struct Edge {
    std::size_t to;
    double cap;
    double cost;
  };

  void add_edge(std::size_t from, std::size_t to, double cap, double cost) {
    graph_[from].push_back(edges_.size());
    edges_.push_back({to, cap, cost});
    graph_[to].push_back(edges_.size());
    edges_.push_back({from, 0.0, -cost});
  }

  std::size_t n_, m_, source_ = 0, sink_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> graph_;
};

double total_mass(const WeightedAtoms& atoms) {
  if (atoms.dim == 0 || atoms.points.size() != atoms.size() * atoms.dim) {
    throw ParameterError("atom array does not match weights and dimension");
  }
  if (atoms.size() == 0) throw ParameterError("empty atom set");
  if (atoms.size() > kTolerances.exact_transport_max_atoms) {
    throw ParameterError(
        fmt::format("exact transport supports at most {} atoms, got {}",
                    kTolerances.exact_transport_max_atoms, atoms.size()));
  }
  double s = 0.0;
  for (double w : atoms.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ParameterError("atom weights must be finite and nonnegative");
    }
    s += w;
  }
  if (!(s > 0.0)) throw ParameterError("atom set has zero mass");
  return s;
}

}  // namespace

double exact_wp_small(const WeightedAtoms& xs, const WeightedAtoms& ys,
                      double p) {
  if (!(p >= 1.0)) throw ParameterError("p must be >= 1");
  if (xs.dim != ys.dim) throw ParameterError("atom dimensions differ");
  const double mx = total_mass(xs);
  const double my = total_mass(ys);
  if (std::abs(mx - my) > kTolerances.mass_balance_tolerance) {
    throw ParameterError(
        fmt::format("mass imbalance: {} vs {}", mx, my));
  }
  const std::size_t n = xs.size(), m = ys.size();
  Vec cost(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = xs.point(i);
    for (std::size_t j = 0; j < m; ++j) {
      const auto b = ys.point(j);
      double d2 = 0.0;
      for (std::size_t k = 0; k < xs.dim; ++k) {
        const double t = a[k] - b[k];
        d2 += t * t;
      }
      cost[i * m + j] = std::pow(std::sqrt(d2), p);
    }
  }
  // Scale demands so both sides carry exactly the same mass.
  Vec demand = ys.weights;
  for (double& w : demand) w *= mx / my;
  TransportSolver solver(xs.weights, demand, cost);
  const double total = solver.solve(mx, 1e-14 * mx);
  return std::pow(std::max(total / mx, 0.0), 1.0 / p);
}

}  // namespace sgkl
