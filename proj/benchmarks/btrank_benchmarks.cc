// Copyright 2026 The btrank Authors.
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

#include <Eigen/Core>
#include <random>
#include <vector>

#include "btrank/btmle.h"
#include "btrank/comparisons.h"
#include "btrank/fused_lasso.h"
#include "btrank/npmle.h"
#include "btrank/scores.h"
#include "btrank/simlab.h"

namespace btrank {
namespace {

// Random-design dataset with lognormal abilities, the simulation default.
ComparisonDataset MakeDataset(int players, std::int64_t matches,
                              std::uint64_t seed) {
  Rng rng(seed);
  const AbilityDraw draw = DrawAbilities({}, players, rng);
  const std::vector<MatchRecord> records =
      DrawMatches(draw.alpha, {DesignKind::kRandom}, matches, rng);
  return Aggregate(records, players);
}

void BM_FitMle(benchmark::State& state) {
  const ComparisonDataset d =
      MakeDataset(static_cast<int>(state.range(0)), 20000, 1);
  for (auto _ : state) benchmark::DoNotOptimize(FitMle(d));
}
BENCHMARK(BM_FitMle)->Arg(20)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_FitNpmle(benchmark::State& state) {
  const FitResult fit =
      FitMle(MakeDataset(static_cast<int>(state.range(0)), 50000, 2));
  const GaussianObservations obs = ObservationsFromFit(fit);
  for (auto _ : state) benchmark::DoNotOptimize(FitNpmle(obs));
}
BENCHMARK(BM_FitNpmle)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SolvePath(benchmark::State& state) {
  const ComparisonDataset d =
      MakeDataset(static_cast<int>(state.range(0)), 10000, 3);
  const std::vector<double> grid = DefaultLambdaGrid(d, 21);
  for (auto _ : state) benchmark::DoNotOptimize(SolvePath(d, grid));
}
BENCHMARK(BM_SolvePath)->Arg(30)->Arg(86)->Unit(benchmark::kMillisecond);

void BM_KendallTau(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  const int n = static_cast<int>(state.range(0));
  Eigen::VectorXd a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = z(rng);
    b[i] = a[i] + z(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(KendallTau(a, b));
}
BENCHMARK(BM_KendallTau)->Arg(100)->Arg(1000);

void BM_PosteriorMeanRanks(benchmark::State& state) {
  const FitResult fit =
      FitMle(MakeDataset(static_cast<int>(state.range(0)), 20000, 5));
  const MixingDistribution g = FitNpmle(ObservationsFromFit(fit));
  for (auto _ : state) benchmark::DoNotOptimize(PosteriorMeanRanks(g, fit));
}
BENCHMARK(BM_PosteriorMeanRanks)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace btrank

BENCHMARK_MAIN();
