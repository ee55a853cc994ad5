// Copyright 2026 The collective-qsv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>

#include <benchmark/benchmark.h>

#include "cqsv/analytic.hpp"
#include "cqsv/circuit.hpp"
#include "cqsv/noise_models.hpp"
#include "cqsv/protocol.hpp"
#include "cqsv/target_states.hpp"

namespace {

using namespace cqsv;

constexpr double kThird = 1.0 / 3.0;

DensityMatrix bell_ensemble(int k, double eps) {
  const Strategy s = homogeneous_strategy(bell(), kThird);
  return make_ensemble(NoiseSpec{NoiseKind::independent_white, eps, std::nullopt}, s, k);
}

void BM_kron_power(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const DensityMatrix rho = white(bell(), 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(kron_power(rho, k));
}
BENCHMARK(BM_kron_power)->DenseRange(2, 5);

void BM_swap_projection(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const DensityMatrix rho = bell_ensemble(k, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(swap_projection_apply(rho, k, 4));
}
BENCHMARK(BM_swap_projection)->DenseRange(2, 5);

void BM_engine_pass_probability(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Strategy s = homogeneous_strategy(bell(), kThird);
  const DensityMatrix rho = bell_ensemble(k, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(pass_probability_exact(Scheme{k, 1, 0.01}, rho, s));
}
BENCHMARK(BM_engine_pass_probability)->DenseRange(2, 4);

void BM_closed_form_complexity(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytic::complexity(Scheme{10, 1, 0.01}, NoiseKind::independent_white, kThird, 0.01,
                                                  4, analytic::Mode::exact));
  }
}
BENCHMARK(BM_closed_form_complexity);

void BM_run_experiment(benchmark::State& state) {
  const Strategy s = homogeneous_strategy(bell(), kThird);
  const NoiseSpec noise{NoiseKind::independent_white, 0.01, std::nullopt};
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_experiment(Scheme{2, 1, 0.01}, noise, s, 100000, 1, ExperimentOptions{threads, {}}));
  }
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_run_experiment)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_compiled_unitary(benchmark::State& state) {
  const Circuit c = lower_to_fredkin(build_cswap_chain(static_cast<int>(state.range(0)), 2));
  for (auto _ : state) benchmark::DoNotOptimize(compiled_unitary(c));
}
BENCHMARK(BM_compiled_unitary)->DenseRange(2, 4);

}  // namespace

BENCHMARK_MAIN();
