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


#include "sgkl/harness/bounds_report.hpp"

#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "sgkl/bounds.hpp"
#include "sgkl/error.hpp"
#include "sgkl/gradients.hpp"
#include "sgkl/model.hpp"
#include "sgkl/special.hpp"

namespace sgkl::harness {

BoundsReport bounds_report(const Config& config) {
  using nlohmann::json;
  BoundsReport rep;
  json j;
  std::string text;
  const std::uint64_t seed = config.run.seed;
  auto add = [&](const std::string& method, std::optional<double> h,
                 std::optional<double> gamma, const std::string& metric,
                 double value, std::optional<double> se = std::nullopt,
                 std::uint64_t n = 0) {
    rep.rows.push_back({"bounds", method, h, gamma, metric, value, se, n, seed});
    text += fmt::format("{:<10} {:<44} {:>14.6g}", method, metric, value);
    if (h) text += fmt::format("  h={}", *h);
    if (gamma) text += fmt::format("  gamma={}", *gamma);
    if (se) text += fmt::format("  (SE {:.3g})", *se);
    text += "\n";
  };

  // Constants.
  for (int p : {1, 2}) {
    add("constants", std::nullopt, std::nullopt, fmt::format("K_{}", p),
        mixture_constant(p));
    add("constants", std::nullopt, std::nullopt,
        fmt::format("convolution_prefactor_p{}", p), convolution_prefactor(p));
  }
  add("constants", std::nullopt, std::nullopt, "c4", exp_quadratic_constant());
  add("constants", std::nullopt, std::nullopt, "moment_corollary_constant",
      moment_corollary_constant());

  // Toy target statistics.
  const auto toy = QuadraticMixturePotential::toy();
  const auto moments = toy_target_moments(toy);
  const MinibatchGradient mb(toy,
                             static_cast<std::size_t>(config.sweep.batch_size));
  const double m = toy.strong_convexity(), L = toy.smoothness();
  const double c_g = *mb.jacobian_variance();
  const TargetSampler sampler = [&](rng::Stream& rng, std::span<double> out) {
    out[0] = moments.mean + std::sqrt(moments.variance) * rng.normal();
  };
  rng::Stream rng(rng::derive_seed(seed, "bounds/sigma"), 0);
  const Estimate sigma2 =
      estimate_sigma_p(mb, sampler, 2.0, config.bounds.moment_samples, rng);
  const Estimate sigma4 =
      estimate_sigma_p(mb, sampler, 4.0, config.bounds.moment_samples, rng);
  add("toy", std::nullopt, std::nullopt, "m", m);
  add("toy", std::nullopt, std::nullopt, "L", L);
  add("toy", std::nullopt, std::nullopt, "C_G", c_g);
  add("toy", std::nullopt, std::nullopt, "sigma_2", sigma2.value,
      sigma2.std_error, config.bounds.moment_samples);
  add("toy", std::nullopt, std::nullopt, "sigma_4", sigma4.value,
      sigma4.std_error, config.bounds.moment_samples);

  PlugInParams pp;
  pp.L = L;
  pp.sigma_2p = sigma4.value;
  const double T = plug_in_term(PlugInVariant::kMoment, pp);
  add("toy", std::nullopt, std::nullopt, "plug_in_moment_p2", T);

  json skipped = json::array();
  for (double gamma : config.bounds.gamma) {
    for (double h : config.bounds.h) {
      BiasBoundInputs in;
      in.h = h;
      in.gamma = gamma;
      in.m = m;
      in.L = L;
      in.d = 1;
      in.c_g = c_g;
      in.sigma_p = sigma2.value;
      in.convolution_term = T;
      in.p = 2;
      try {
        add("toy", h, gamma, "sg_ubu_bias_bound_p2", sg_ubu_bias_bound(in));
        add("toy", h, gamma, "contraction_factor_1step",
            contraction_factor(h, gamma, m, L, c_g, 1));
      } catch (const ParameterError& e) {
        text += fmt::format("{:<10} h={} gamma={}: not evaluated, {}\n", "toy",
                            h, gamma, e.what());
        skipped.push_back({{"h", h}, {"gamma", gamma}, {"reason", e.what()}});
      }
    }
  }

  // Spike example in its clean regime s = 4 sqrt(2 log d).
  for (auto d : config.bounds.spike_dims) {
    const double s =
        4.0 * std::sqrt(2.0 * std::log(static_cast<double>(d)));
    const auto lb = spike_lower_bound(s, static_cast<std::size_t>(d));
    add("spike", std::nullopt, std::nullopt,
        fmt::format("lower_bound_d{}_s{:.6g}", d, s), lb.value);
  }

  json rows = json::array();
  for (const auto& r : rep.rows) {
    json row = {{"method", r.method}, {"metric", r.metric}, {"value", r.value}};
    if (r.h) row["h"] = *r.h;
    if (r.gamma) row["gamma"] = *r.gamma;
    if (r.std_error) row["stderr"] = *r.std_error;
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["not_evaluated"] = skipped;
  rep.json = j.dump(2) + "\n";
  rep.text = text;
  return rep;
}

}  // namespace sgkl::harness
