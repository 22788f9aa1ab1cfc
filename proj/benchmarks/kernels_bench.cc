// benchmarks/kernels_bench.cc

// Copyright 2026 The f0entrain Authors
//
// See ../../COPYING for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "f0entrain/entrain.h"
#include "f0entrain/pitch.h"
#include "f0entrain/preprocess.h"
#include "f0entrain/stats.h"

namespace {

std::vector<double> random_series(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(150.0, 20.0);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

void BM_Dtw(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_series(n, 1), b = random_series(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(f0entrain::dtw_distance(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dtw)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oNSquared);

void BM_SgSmooth(benchmark::State& state) {
  const auto track = f0entrain::F0Track::from_values(
      random_series(static_cast<std::size_t>(state.range(0)), 3), 0.0, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(f0entrain::sg_smooth(track));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SgSmooth)->Range(64, 8192);

void BM_EstimateF0(benchmark::State& state) {
  f0entrain::Wave w;
  const auto n = static_cast<std::size_t>(w.sample_rate * static_cast<double>(state.range(0)) / 1000.0);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = 120.0 + 60.0 * std::sin(2.0 * std::numbers::pi * 0.5 * static_cast<double>(i) / w.sample_rate);
    phase += 2.0 * std::numbers::pi * f / w.sample_rate;
    w.samples.push_back(0.5 * std::sin(phase) + 0.2 * std::sin(2.0 * phase));
  }
  for (auto _ : state) benchmark::DoNotOptimize(f0entrain::estimate_f0(w));
}
BENCHMARK(BM_EstimateF0)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_RegIncBeta(benchmark::State& state) {
  const double a = static_cast<double>(state.range(0)) / 2.0;
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f0entrain::reg_inc_beta(a, 0.5, x));
    x = x > 0.9 ? 0.1 : x + 0.01;
  }
}
BENCHMARK(BM_RegIncBeta)->Arg(2)->Arg(57)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
