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


#include <benchmark/benchmark.h>

#include "sgkl/gradients.hpp"
#include "sgkl/integrators.hpp"
#include "sgkl/metrics.hpp"
#include "sgkl/model.hpp"
#include "sgkl/rng.hpp"
#include "sgkl/special.hpp"

namespace {

using namespace sgkl;

void BM_UbuStep(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto target = QuadraticPotential::isotropic(d, 1.0);
  const ExactGradient grad(target);
  const auto c = StepCoefficients::make(0.05, 2.0);
  KineticState s{Vec(d, 0.1), Vec(d, 0.0)};
  auto streams = ChainStreams::from(rng::Stream(1, 0));
  Vec scratch(kScratchPerDim * d);
  for (auto _ : state) {
    ubu_step(s, c, grad, streams, scratch);
    benchmark::DoNotOptimize(s.x.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_UbuStep)->Arg(1)->Arg(64)->Arg(1024);

void BM_SgUbuStepToy(benchmark::State& state) {
  const auto toy = QuadraticMixturePotential::toy();
  const MinibatchGradient mb(toy, 1);
  const auto c = StepCoefficients::make(0.03125, 5.0);
  KineticState s{Vec{-0.9}, Vec{0.0}};
  auto streams = ChainStreams::from(rng::Stream(2, 0));
  Vec scratch(kScratchPerDim);
  for (auto _ : state) {
    ubu_step(s, c, mb, streams, scratch);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_SgUbuStepToy);

void BM_EmKineticStep(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto target = QuadraticPotential::isotropic(d, 1.0);
  const ExactGradient grad(target);
  KineticState s{Vec(d, 0.1), Vec(d, 0.0)};
  auto streams = ChainStreams::from(rng::Stream(3, 0));
  Vec scratch(kScratchPerDim * d);
  for (auto _ : state) {
    em_kinetic_step(s, 0.05, 2.0, grad, streams, scratch);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_EmKineticStep)->Arg(1)->Arg(64)->Arg(1024);

void BM_W1Sorted(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  rng::Stream rng(4, 0);
  Vec a(n), b(n);
  rng.fill_normal(a);
  rng.fill_normal(b);
  for (auto _ : state) {
    const SortedSample sa(a), sb(b);
    benchmark::DoNotOptimize(w1_sorted(sa, sb));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_W1Sorted)->Arg(1 << 12)->Arg(1 << 20);

void BM_MixtureQuantile(benchmark::State& state) {
  const std::vector<MixtureComponent> mix{{0.3, -1.0, 1.0}, {0.5, 0.5, 1.0}, {0.2, 3.0, 1.0}};
  double u = 0.0;
  for (auto _ : state) {
    u = u + 0.6180339887 - static_cast<double>(static_cast<int>(u + 0.6180339887));
    benchmark::DoNotOptimize(mixture_quantile(mix, 0.001 + 0.998 * u));
  }
}
BENCHMARK(BM_MixtureQuantile);

void BM_NormalQuantile(benchmark::State& state) {
  double u = 0.0;
  for (auto _ : state) {
    u = u + 0.6180339887 - static_cast<double>(static_cast<int>(u + 0.6180339887));
    benchmark::DoNotOptimize(normal_quantile(0.001 + 0.998 * u));
  }
}
BENCHMARK(BM_NormalQuantile);

}  // namespace

BENCHMARK_MAIN();
