// Copyright 2026 The Fairaudit Authors
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

// Serial reference kernels against their OpenMP versions. Both return
// identical results; only the wall time differs.

#include <vector>

#include "benchmark/benchmark.h"
#include "fairaudit/geometry.h"
#include "fairaudit/platform.h"
#include "fairaudit/protocol.h"
#include "fairaudit/strategies.h"

namespace fairaudit {
namespace {

geometry::GeometryParams Point() {
  geometry::GeometryParams g;
  g.n = 10;
  g.tau = 1.0;
  g.delta = 0.5;
  return g;
}

void BM_MonteCarloSerial(benchmark::State& state) {
  for (auto _ : state) {
    auto r = geometry::MonteCarloDetectionRateSerial(Point(), state.range(0),
                                                     1);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloSerial)->Arg(100000)->Arg(1000000);

void BM_MonteCarloParallel(benchmark::State& state) {
  for (auto _ : state) {
    auto r = geometry::MonteCarloDetectionRate(Point(), state.range(0), 1);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloParallel)->Arg(100000)->Arg(1000000);

struct TrialFixture {
  AuditEnvironment env;
  DatasetPrior prior;
  std::vector<StrategySpec> grid;
};

const TrialFixture& Trials() {
  static const TrialFixture* fixture = [] {
    AuditEnvironment env;
    env.task = SyntheticTask::Hard();
    env.platform_train_n = 2000;
    env.pool_size = 500;
    auto prior = BuildPrior(env, 0.4, 1);
    return new TrialFixture{
        env,
        *std::move(prior),
        {{StrategyId::kHonest, 0.0},
         {StrategyId::kOptimalProjection, 0.02},
         {StrategyId::kRocMitigation, 0.05},
         {StrategyId::kLabelTransport, 0.5},
         {StrategyId::kThresholdManipulation, 0.02}}};
  }();
  return *fixture;
}

void BM_TrialsSerial(benchmark::State& state) {
  const TrialFixture& f = Trials();
  for (auto _ : state) {
    auto r = RunTrialsSerial(f.env, f.prior, f.grid, 200, state.range(0), 7);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrialsSerial)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_TrialsParallel(benchmark::State& state) {
  const TrialFixture& f = Trials();
  for (auto _ : state) {
    auto r = RunTrials(f.env, f.prior, f.grid, 200, state.range(0), 7);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrialsParallel)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace fairaudit

BENCHMARK_MAIN();
