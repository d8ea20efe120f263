// Copyright 2026 The klbudget Authors
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

// Serial vs OpenMP conditional-reward kernels, plus the lambda grid oracle.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "klbudget/kernels.hpp"
#include "oracles/oracles.hpp"

namespace {

std::vector<double> random_probs(int n) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<double> p(static_cast<std::size_t>(n));
  for (auto& x : p) x = u(rng);
  return p;
}

void BM_ConditionalSerial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const klb::MatrixGameSpec spec{n, klb::RewardVariant::kLiteralSuffix};
  const auto p = random_probs(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(klb::kernels::conditional_reward_serial(spec, p, 0, 1));
  }
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << (n - 1)));
}

void BM_ConditionalParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const klb::MatrixGameSpec spec{n, klb::RewardVariant::kLiteralSuffix};
  const auto p = random_probs(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(klb::kernels::conditional_reward_parallel(spec, p, 0, 1));
  }
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << (n - 1)));
}

void BM_LambdaGridSerial(benchmark::State& state) {
  const std::vector<double> u = {3.0, 1.0, 0.5, 2.5, 4.0, -1.0, 0.2, 1.7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(klb::oracles::lambda_grid_search_serial(u, 2.0));
  }
}

void BM_LambdaGridParallel(benchmark::State& state) {
  const std::vector<double> u = {3.0, 1.0, 0.5, 2.5, 4.0, -1.0, 0.2, 1.7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(klb::oracles::lambda_grid_search(u, 2.0));
  }
}

}  // namespace

BENCHMARK(BM_ConditionalSerial)->Arg(10)->Arg(14)->Arg(18)->Arg(20)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ConditionalParallel)->Arg(10)->Arg(14)->Arg(18)->Arg(20)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LambdaGridSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LambdaGridParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
