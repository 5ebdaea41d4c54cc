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


#include "sgkl/harness/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "sgkl/error.hpp"
#include "sgkl/gradients.hpp"
#include "sgkl/idx_reader.hpp"
#include "sgkl/integrators.hpp"
#include "sgkl/metrics.hpp"
#include "sgkl/model.hpp"
#include "sgkl/rng.hpp"

namespace sgkl::harness {

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

MeanSe mean_and_se(std::span<const double> values) {
  if (values.empty()) throw ParameterError("no values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

SlopeFit log_log_slope(std::span<const double> h, std::span<const double> value,
                       std::span<const double> std_error) {
  const std::size_t n = h.size();
  if (n < 2 || value.size() != n || std_error.size() != n) {
    throw ParameterError("slope fit needs at least two matching points");
  }
  double mx = 0.0;
  for (double x : h) mx += std::log(x);
  mx /= static_cast<double>(n);
  double sxx = 0.0;
  for (double x : h) sxx += (std::log(x) - mx) * (std::log(x) - mx);
  if (!(sxx > 0.0)) throw ParameterError("slope fit needs distinct stepsizes");
  double slope = 0.0, var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(value[i] > 0.0)) throw NumericError("slope fit needs positive values");
    const double w = (std::log(h[i]) - mx) / sxx;
    slope += w * std::log(value[i]);
    const double rel = std_error[i] / value[i];
    var += w * w * rel * rel;
  }
  return {slope, std::sqrt(var)};
}

std::size_t thin_steps(double h, double thin_time) {
  if (!(thin_time > 0.0)) return 1;
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(thin_time / h - 1e-9)));
}

bool in_regime(Method m, double h, double gamma) {
  return !is_kinetic(m) || h < 1.0 / (2.0 * gamma);
}

SpikeParameters spike_parameters(std::size_t d, double alpha) {
  if (d < 3) throw ParameterError("spike protocol needs d >= 3");
  SpikeParameters sp;
  const double dd = static_cast<double>(d);
  const double logd = std::log(dd);
  sp.d = d;
  sp.alpha = alpha;
  sp.h = std::pow(dd, -alpha);
  sp.p = sp.h * std::pow(dd, 1.0 - alpha) / logd;
  sp.s = (8.0 / sp.h) * std::sqrt(logd);
  sp.k = static_cast<std::size_t>(std::ceil(std::pow(dd, 1.0 - alpha) / logd));
  sp.k = std::clamp<std::size_t>(sp.k, 1, d);
  sp.noise_variance = sp.p * sp.s * sp.s / dd;
  if (sp.p > 1.0) {
    throw ParameterError(fmt::format("spike probability {} exceeds 1", sp.p));
  }
  return sp;
}

namespace {

Integrator integrator_for(Method m) {
  switch (m) {
    case Method::kSgld:
      return Integrator::kSgld;
    case Method::kSgEm:
    case Method::kEm:
      return Integrator::kEulerKinetic;
    case Method::kSgUbu:
    case Method::kUbu:
      return Integrator::kUbu;
  }
  return Integrator::kUbu;
}

std::string regime_metric(const std::string& metric, bool regime_ok) {
  return regime_ok ? metric : metric + "@out_of_regime";
}

void check_regimes(const std::vector<Method>& methods,
                   const std::vector<double>& hs,
                   const std::vector<double>& gammas, bool allow,
                   ExperimentOutput& out) {
  std::vector<std::string> bad;
  for (double gamma : gammas) {
    for (double h : hs) {
      for (Method m : methods) {
        if (!in_regime(m, h, gamma)) {
          bad.push_back(
              fmt::format("{} h={} gamma={}", to_string(m), h, gamma));
        }
      }
    }
  }
  if (bad.empty()) return;
  std::string list;
  for (const auto& b : bad) list += (list.empty() ? "" : "; ") + b;
  if (!allow) {
    throw ConfigError(fmt::format(
        "cells violate h < 1/(2 gamma): {}. Pass --allow-out-of-regime to "
        "run them with tagged rows",
        list));
  }
  out.notes.push_back("out-of-regime cells (tagged): " + list);
}

struct CellResult {
  std::optional<double> value;
  std::optional<std::size_t> diverged_at;
};

void emit_cell(ExperimentOutput& out, const std::string& experiment,
               Method method, double h, double gamma, const std::string& metric,
               const std::vector<CellResult>& reps, std::uint64_t n,
               std::uint64_t seed) {
  std::optional<std::size_t> first_divergence;
  std::vector<double> values;
  for (const auto& r : reps) {
    if (r.diverged_at) {
      first_divergence = std::min(first_divergence.value_or(*r.diverged_at),
                                  *r.diverged_at);
    } else {
      values.push_back(*r.value);
    }
  }
  if (first_divergence) {
    out.rows.push_back({experiment, std::string(to_string(method)), h, gamma,
                        "diverged", static_cast<double>(*first_divergence),
                        std::nullopt, n, seed});
    return;
  }
  const MeanSe ms = mean_and_se(values);
  out.rows.push_back({experiment, std::string(to_string(method)), h, gamma,
                      metric, ms.mean, ms.std_error, n, seed});
}

}  // namespace

// ---------------------------------------------------------------------------
// Bias sweep.

ExperimentOutput run_bias_sweep(const Config& config) {
  const SweepConfig& sc = config.sweep;
  ExperimentOutput out;
  check_regimes(sc.methods, sc.h, sc.gamma, config.run.allow_out_of_regime,
                out);

  const auto toy = QuadraticMixturePotential::toy();
  const GaussianMoments moments = toy_target_moments(toy);
  const double target_sd = std::sqrt(moments.variance);
  const ExactGradient exact(toy);
  const MinibatchGradient minibatch(toy,
                                    static_cast<std::size_t>(sc.batch_size));
  const std::size_t n = sc.samples;
  const std::uint64_t master = config.run.seed;
  const std::size_t reps = static_cast<std::size_t>(sc.replicas);

  auto exact_sample = [&](rng::Stream rng) {
    Vec y(n);
    rng.fill_normal(y);
    for (double& v : y) v = moments.mean + target_sd * v;
    return SortedSample(std::move(y));
  };

  struct Cell {
    Method method;
    double h;
    double gamma;
  };
  std::vector<Cell> cells;
  for (double gamma : sc.gamma) {
    for (double h : sc.h) {
      for (Method m : sc.methods) cells.push_back({m, h, gamma});
    }
  }

  std::vector<CellResult> results(cells.size() * reps);
  std::vector<CellResult> to_target(cells.size() * reps);
  std::vector<double> floor(reps);
  // Replica tasks of all cells plus the estimator-floor tasks.
  const std::size_t tasks = cells.size() * reps + reps;
  parallel_for(tasks, config.run.threads, [&](std::size_t t) {
    if (t >= cells.size() * reps) {
      const std::size_t r = t - cells.size() * reps;
      const std::uint64_t seed =
          rng::derive_seed(master, fmt::format("sweep/floor/rep={}", r));
      floor[r] = w1_sorted(exact_sample(rng::Stream(seed, 1)),
                           exact_sample(rng::Stream(seed, 2)));
      return;
    }
    const Cell& cell = cells[t / reps];
    const std::size_t r = t % reps;
    // Methods share the replica seed so their biases are paired.
    const std::uint64_t seed = rng::derive_seed(
        master, fmt::format("sweep/gamma={}/h={}/rep={}", cell.gamma, cell.h, r));
    const rng::Stream root(seed, 0);
    const GradientEstimator& grad =
        is_stochastic(cell.method)
            ? static_cast<const GradientEstimator&>(minibatch)
            : static_cast<const GradientEstimator&>(exact);
    ChainSpec spec;
    spec.integrator = integrator_for(cell.method);
    spec.h = cell.h;
    spec.gamma = cell.gamma;
    spec.thin = thin_steps(cell.h, sc.thin_time);
    spec.burn_in = sc.burn_in;
    spec.n_steps = sc.burn_in + n * spec.thin;
    KineticState init;
    {
      auto init_rng = rng::channel(root, rng::Channel::kReference);
      init.x = {moments.mean + target_sd * init_rng.normal()};
    }
    try {
      Vec xs = run_chain(spec, grad, init, root);
      const SortedSample chain(std::move(xs));
      results[t].value = w1_sorted(chain, exact_sample(rng::Stream(seed, 1)));
      to_target[t].value = w1_to_normal(chain, moments.mean, target_sd);
    } catch (const NumericError& e) {
      results[t].diverged_at =
          static_cast<std::size_t>(e.step().value_or(0));
      to_target[t].diverged_at = results[t].diverged_at;
    }
  });

  const std::string exp = "sweep";
  const MeanSe fl = mean_and_se(floor);
  out.rows.push_back({exp, "exact", std::nullopt, std::nullopt, "w1_floor",
                      fl.mean, fl.std_error, n, master});
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    std::vector<CellResult> reps_c(results.begin() + c * reps,
                                   results.begin() + (c + 1) * reps);
    emit_cell(out, exp, cell.method, cell.h, cell.gamma,
              regime_metric("w1_bias", in_regime(cell.method, cell.h, cell.gamma)),
              reps_c, n, master);
    const std::vector<CellResult> target_c(to_target.begin() + c * reps,
                                           to_target.begin() + (c + 1) * reps);
    if (std::none_of(target_c.begin(), target_c.end(),
                     [](const CellResult& r) { return r.diverged_at.has_value(); })) {
      emit_cell(out, exp, cell.method, cell.h, cell.gamma,
                regime_metric("w1_to_target",
                              in_regime(cell.method, cell.h, cell.gamma)),
                target_c, n, master);
    }
  }
  // Paired differences between methods at each (h, gamma).
  const std::size_t n_methods = sc.methods.size();
  for (std::size_t c = 0; c < cells.size(); c += n_methods) {
    for (std::size_t i = 0; i < n_methods; ++i) {
      for (std::size_t j = i + 1; j < n_methods; ++j) {
        std::vector<double> diffs;
        for (std::size_t r = 0; r < reps; ++r) {
          const CellResult& a = results[(c + i) * reps + r];
          const CellResult& b = results[(c + j) * reps + r];
          if (a.value && b.value) diffs.push_back(*a.value - *b.value);
        }
        if (diffs.size() != reps || reps < 2) continue;
        const Cell& cell = cells[c + i];
        const MeanSe ms = mean_and_se(diffs);
        out.rows.push_back(
            {exp, std::string(to_string(cell.method)), cell.h, cell.gamma,
             fmt::format("w1_bias_diff_vs_{}", to_string(cells[c + j].method)),
             ms.mean, ms.std_error, n, master});
      }
    }
  }
  // Slopes over the non-diverged cells of each (method, gamma).
  for (double gamma : sc.gamma) {
    for (Method m : sc.methods) {
      std::vector<double> hs, vs, ses;
      for (const auto& row : out.rows) {
        if (row.method == to_string(m) && row.gamma == gamma &&
            (row.metric == "w1_bias" ||
             row.metric == regime_metric("w1_bias", false))) {
          hs.push_back(*row.h);
          vs.push_back(row.value);
          ses.push_back(*row.std_error);
        }
      }
      if (hs.size() < 2) continue;
      const SlopeFit fit = log_log_slope(hs, vs, ses);
      out.rows.push_back({exp, std::string(to_string(m)), std::nullopt, gamma,
                          "w1_bias_loglog_slope", fit.slope, fit.std_error,
                          hs.size(), master});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spike table.

ExperimentOutput run_spike_table(const Config& config) {
  const SpikeConfig& sc = config.spike;
  ExperimentOutput out;
  const std::uint64_t master = config.run.seed;
  const std::size_t reps = static_cast<std::size_t>(sc.replicas);

  for (auto d : sc.dims) {
    const auto sp = spike_parameters(static_cast<std::size_t>(d), sc.alpha);
    if (!in_regime(Method::kSgUbu, sp.h, sc.gamma)) {
      check_regimes({Method::kSgUbu}, {sp.h}, {sc.gamma},
                    config.run.allow_out_of_regime, out);
    }
  }

  struct Cell {
    SpikeParameters sp;
    SpikeNoiseKind noise;
  };
  std::vector<Cell> cells;
  for (auto d : sc.dims) {
    const auto sp = spike_parameters(static_cast<std::size_t>(d), sc.alpha);
    for (auto k : sc.noise) cells.push_back({sp, k});
    out.notes.push_back(fmt::format(
        "d={}: h={}, p={}, s={}, k={}, noise variance per coordinate {}", sp.d,
        sp.h, sp.p, sp.s, sp.k, sp.noise_variance));
  }

  std::vector<CellResult> results(cells.size() * reps);
  std::vector<CellResult> to_target(cells.size() * reps);
  parallel_for(cells.size() * reps, config.run.threads, [&](std::size_t t) {
    const Cell& cell = cells[t / reps];
    const std::size_t r = t % reps;
    const auto& sp = cell.sp;
    const std::uint64_t seed = rng::derive_seed(
        master, fmt::format("spike/{}/d={}/alpha={}/rep={}",
                            to_string(cell.noise), sp.d, sp.alpha, r));
    const rng::Stream root(seed, 0);
    const auto target = QuadraticPotential::isotropic(sp.d, 1.0);
    NoiseLaw law = ZeroNoise{};
    if (cell.noise == SpikeNoiseKind::kSpike) {
      law = SpikeNoise{sp.s, sp.d, sp.p};
    } else if (cell.noise == SpikeNoiseKind::kGaussian) {
      law = GaussianNoise{std::sqrt(sp.noise_variance)};
    }
    const NoiseInjectedGradient grad(target, law);

    ChainSpec spec;
    spec.integrator = Integrator::kUbu;
    spec.h = sp.h;
    spec.gamma = sc.gamma;
    spec.burn_in = static_cast<std::size_t>(std::ceil(sc.burn_in_time / sp.h));
    spec.n_steps =
        spec.burn_in + static_cast<std::size_t>(std::ceil(sc.horizon / sp.h));
    KineticState init;
    init.x.resize(sp.d);
    rng::channel(root, rng::Channel::kReference).fill_normal(init.x);
    double chain_sum = 0.0;
    std::size_t chain_n = 0;
    try {
      run_chain(spec, grad, init, root,
                [&](std::size_t, const KineticState& s) {
                  chain_sum += f_k(s.x, sp.k);
                  ++chain_n;
                });
    } catch (const NumericError& e) {
      results[t].diverged_at = static_cast<std::size_t>(e.step().value_or(0));
      return;
    }
    // Fresh exact-target reference on an independent stream.
    rng::Stream ref(seed, 1);
    Vec z(sp.d);
    double ref_sum = 0.0;
    for (std::uint64_t i = 0; i < sc.reference_samples; ++i) {
      ref.fill_normal(z);
      ref_sum += f_k(z, sp.k);
    }
    results[t].value = chain_sum / static_cast<double>(chain_n) -
                       ref_sum / static_cast<double>(sc.reference_samples);
  });

  const std::string exp = "spike";
  std::vector<std::optional<MeanSe>> bias(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    const auto& sp = cell.sp;
    std::vector<CellResult> reps_c(results.begin() + c * reps,
                                   results.begin() + (c + 1) * reps);
    const std::string metric =
        fmt::format("fk_bias_{}_d{}", to_string(cell.noise), sp.d);
    const std::uint64_t steps =
        static_cast<std::uint64_t>(std::ceil(sc.horizon / sp.h));
    emit_cell(out, exp, Method::kSgUbu, sp.h, sc.gamma,
              regime_metric(metric, in_regime(Method::kSgUbu, sp.h, sc.gamma)),
              reps_c, steps, master);
    if (out.rows.back().metric != "diverged") {
      bias[c] = MeanSe{out.rows.back().value, *out.rows.back().std_error};
    }
    if (cell.noise != SpikeNoiseKind::kZero) {
      out.rows.push_back({exp, "SG-UBU", sp.h, sc.gamma,
                          fmt::format("noise_variance_{}_d{}",
                                      to_string(cell.noise), sp.d),
                          sp.noise_variance, std::nullopt, sp.k, master});
    }
  }
  // Growth ratios between consecutive dimensions, per noise kind.
  for (auto noise : sc.noise) {
    std::optional<std::size_t> prev;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].noise != noise) continue;
      if (prev && bias[*prev] && bias[c] && bias[*prev]->mean != 0.0) {
        const MeanSe a = *bias[c], b = *bias[*prev];
        const double ratio = a.mean / b.mean;
        const double se =
            std::abs(ratio) * std::sqrt(std::pow(a.std_error / a.mean, 2) +
                                        std::pow(b.std_error / b.mean, 2));
        out.rows.push_back({exp, "SG-UBU", std::nullopt, sc.gamma,
                            fmt::format("fk_bias_{}_ratio_d{}_d{}",
                                        to_string(noise), cells[c].sp.d,
                                        cells[*prev].sp.d),
                            ratio, se, reps, master});
      }
      prev = c;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bayesian logistic regression.

ExperimentOutput run_blr(const Config& config) {
  const BlrConfig& bc = config.blr;
  ExperimentOutput out;
  const std::uint64_t master = config.run.seed;
  const std::size_t reps = static_cast<std::size_t>(bc.replicas);

  std::unique_ptr<LogisticRegressionPotential> blr;
  if (bc.source == "idx") {
    blr = std::make_unique<LogisticRegressionPotential>(idx::load_digit_pair(
        bc.images_path, bc.labels_path, bc.prior_variance));
  } else {
    blr = std::make_unique<LogisticRegressionPotential>(make_synthetic_logistic(
        static_cast<std::size_t>(bc.dim),
        static_cast<std::size_t>(bc.observations), bc.prior_variance,
        bc.data_seed));
  }
  const Vec zero(blr->dim(), 0.0);
  const Vec q_min = find_mode(*blr, zero);
  const double L = blr->hessian_max_eigenvalue(q_min);
  const double gamma = std::sqrt(L);
  out.notes.push_back(fmt::format(
      "BLR d={}, N={}, L(q_min)={}, gamma={}, m={}", blr->dim(),
      blr->observations(), L, gamma, blr->strong_convexity()));

  std::vector<double> hs;
  for (double c : bc.h_multipliers) hs.push_back(c / std::sqrt(L));
  check_regimes(bc.methods, hs, {gamma}, config.run.allow_out_of_regime, out);
  const double h_ref = 1.0 / (bc.reference_divisor * std::sqrt(L));

  const ExactGradient exact(*blr);
  const ControlVariateGradient cv(*blr, q_min,
                                  static_cast<std::size_t>(bc.batch_size));

  struct Cell {
    Method method;
    double h;
    double horizon;
    std::string key;
  };
  std::vector<Cell> cells;
  cells.push_back({Method::kUbu, h_ref, bc.reference_horizon, "reference"});
  for (double h : hs) {
    for (Method m : bc.methods) {
      cells.push_back({m, h, bc.horizon, std::string(to_string(m))});
    }
  }

  std::vector<CellResult> results(cells.size() * reps);
  std::vector<CellResult> to_target(cells.size() * reps);
  parallel_for(cells.size() * reps, config.run.threads, [&](std::size_t t) {
    const Cell& cell = cells[t / reps];
    const std::size_t r = t % reps;
    const std::uint64_t seed = rng::derive_seed(
        master, fmt::format("blr/{}/h={}/rep={}", cell.key, cell.h, r));
    const rng::Stream root(seed, 0);
    const GradientEstimator& grad =
        is_stochastic(cell.method)
            ? static_cast<const GradientEstimator&>(cv)
            : static_cast<const GradientEstimator&>(exact);
    ChainSpec spec;
    spec.integrator = integrator_for(cell.method);
    spec.h = cell.h;
    spec.gamma = gamma;
    spec.burn_in = static_cast<std::size_t>(std::ceil(bc.burn_in_time / cell.h));
    spec.n_steps =
        spec.burn_in + static_cast<std::size_t>(std::ceil(cell.horizon / cell.h));
    KineticState init;
    init.x = q_min;
    double sum = 0.0;
    std::size_t count = 0;
    try {
      run_chain(spec, grad, init, root,
                [&](std::size_t, const KineticState& s) {
                  sum += blr->value(s.x);
                  ++count;
                });
      results[t].value = sum / static_cast<double>(count);
    } catch (const NumericError& e) {
      results[t].diverged_at = static_cast<std::size_t>(e.step().value_or(0));
    }
  });

  const std::string exp = "blr";
  std::vector<double> ref_values;
  for (std::size_t r = 0; r < reps; ++r) {
    if (!results[r].value) throw NumericError("reference chain diverged");
    ref_values.push_back(*results[r].value);
  }
  const MeanSe ref = mean_and_se(ref_values);
  out.rows.push_back({exp, "UBU", h_ref, gamma, "mean_U_reference", ref.mean,
                      ref.std_error, static_cast<std::uint64_t>(std::ceil(
                                         bc.reference_horizon / h_ref)),
                      master});
  for (std::size_t c = 1; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    std::vector<CellResult> reps_c(results.begin() + c * reps,
                                   results.begin() + (c + 1) * reps);
    const std::uint64_t steps =
        static_cast<std::uint64_t>(std::ceil(bc.horizon / cell.h));
    const bool ok = in_regime(cell.method, cell.h, gamma);
    emit_cell(out, exp, cell.method, cell.h, gamma,
              regime_metric("mean_U", ok), reps_c, steps, master);
    if (out.rows.back().metric == "diverged") continue;
    const ResultRow mean_row = out.rows.back();
    out.rows.push_back({exp, mean_row.method, cell.h, gamma,
                        regime_metric("abs_error_U", ok),
                        std::abs(mean_row.value - ref.mean),
                        std::hypot(*mean_row.std_error, ref.std_error), steps,
                        master});
  }
  return out;
}

}  // namespace sgkl::harness
