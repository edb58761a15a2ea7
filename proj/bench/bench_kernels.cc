// Copyright 2026 The FedPDM Authors.
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


// Serial reference vs OpenMP for the kernels the simulator spends its time
// in. Arg 0 picks the path: 0 = serial, 1 = OpenMP.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "fedpdm/config.h"
#include "fedpdm/kernels.h"
#include "fedpdm/simulation.h"

namespace fedpdm {
namespace {

// Wider than the default synthetic set so there is work to split.
RunConfig BenchConfig() {
  RunConfig cfg = DefaultConfig(DatasetKind::kSynthetic);
  SetField(cfg, "synthetic.features", "201");
  SetField(cfg, "synthetic.zero_features", "100");
  cfg.rounds = 10;
  cfg.eval_every = 10;
  return cfg;
}

const Environment& BenchEnvironment() {
  static const Environment env = PrepareEnvironment(BenchConfig());
  return env;
}

Execution ExecOf(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::kSerial : Execution::kOpenMP;
}

std::vector<ModelVector> RandomModels(std::size_t count, std::size_t dim) {
  std::mt19937_64 engine(3);
  std::normal_distribution<double> unit(0.0, 0.1);
  std::vector<ModelVector> xs(count, ModelVector(dim));
  for (auto& x : xs) {
    for (double& v : x) v = unit(engine);
  }
  return xs;
}

void BM_CountCorrect(benchmark::State& state) {
  const Environment& env = BenchEnvironment();
  const auto model = RandomModels(1, env.workload.dim()).front();
  for (auto _ : state) {
    benchmark::DoNotOptimize(CountCorrect(ExecOf(state), model, env.data.test));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(env.data.test.size()));
}
BENCHMARK(BM_CountCorrect)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_FullBatchGradients(benchmark::State& state) {
  const Environment& env = BenchEnvironment();
  const auto xs =
      RandomModels(env.shards.size(), env.workload.dim());
  for (auto _ : state) {
    benchmark::DoNotOptimize(FullBatchGradients(
        ExecOf(state), xs, env.data.train, env.shards, env.workload));
  }
}
BENCHMARK(BM_FullBatchGradients)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// Whole runs: the per-client local rounds are the parallel fan-out.
void BM_Simulation(benchmark::State& state) {
  const Environment& env = BenchEnvironment();
  RunConfig cfg = BenchConfig();
  cfg.execution = ExecOf(state);
  cfg.algorithm = state.range(1) == 0 ? Algorithm::kDpFedPdm
                                      : Algorithm::kBsdpFedPdm;
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunSimulation(cfg, env));
  }
}
BENCHMARK(BM_Simulation)
    ->ArgsProduct({{0, 1}, {0, 1}})
    ->ArgNames({"omp", "bsdp"})
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace fedpdm

BENCHMARK_MAIN();
