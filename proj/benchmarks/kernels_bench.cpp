// Copyright 2026 The kpiroot Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "kpiroot/autoencoder.hpp"
#include "kpiroot/causality.hpp"
#include "kpiroot/datagen.hpp"
#include "kpiroot/decomposition.hpp"
#include "kpiroot/pipeline.hpp"
#include "kpiroot/series.hpp"
#include "kpiroot/symbolic.hpp"

namespace {

using namespace kpiroot;

std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> x(n);
  double level = 0.0;
  for (auto& v : x) v = level += d(rng);
  return x;
}

void BM_Paa(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto z = znormalize(random_walk(n, 1)).values;
  const auto w = default_word_size(n);
  for (auto _ : state) benchmark::DoNotOptimize(paa(z, w));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Paa)->RangeMultiplier(4)->Range(2880, 184320)->Complexity();

void BM_Isax(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto z = znormalize(random_walk(n, 2)).values;
  const auto bp = gaussian_breakpoints(9);
  for (auto _ : state) {
    const auto p = paa(z, default_word_size(n));
    benchmark::DoNotOptimize(isax_symbolize(p, trend_signs(z, p), bp));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Isax)->RangeMultiplier(4)->Range(2880, 184320)->Complexity();

void BM_Jaccard(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> code(9, 27);
  IsaxSequence a{{}, 9, Encoding::isax};
  IsaxSequence b{{}, 9, Encoding::isax};
  for (std::size_t i = 0; i < len; ++i) {
    a.symbols.push_back(code(rng));
    b.symbols.push_back(code(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(jaccard_similarity(a, b));
}
BENCHMARK(BM_Jaccard)->Arg(8)->Arg(54)->Arg(200);

void BM_GrangerF(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto q = static_cast<std::size_t>(state.range(1));
  const auto x = random_walk(len, 4);
  auto y = random_walk(len, 5);
  for (std::size_t t = 1; t < len; ++t) y[t] += 0.5 * x[t - 1];
  const AnomalySegment seg{0, len, SegmentKind::fused, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(granger_f(y, x, seg, q));
}
BENCHMARK(BM_GrangerF)->ArgsProduct({{16, 54, 200}, {1, 3, 5}});

void BM_Stl(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_walk(n, 6);
  const auto cfg = StlConfig::for_period(48);
  for (auto _ : state) benchmark::DoNotOptimize(stl_decompose(x, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Stl)->RangeMultiplier(4)->Range(2880, 46080)->Complexity()->Unit(benchmark::kMillisecond);

void BM_AutoencoderTraining(benchmark::State& state) {
  const auto x = random_walk(2880, 7);
  AutoencoderConfig cfg;
  cfg.window_length = static_cast<std::size_t>(state.range(0));
  cfg.epochs = 100;
  for (auto _ : state) benchmark::DoNotOptimize(train_reconstruction_detector(x, cfg));
}
BENCHMARK(BM_AutoencoderTraining)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Localize(benchmark::State& state) {
  ScenarioSpec spec;
  spec.m = static_cast<std::size_t>(state.range(0));
  spec.seed = 11;
  const auto ds = generate_scenario(spec);
  RunConfig cfg;
  cfg.period = spec.period;
  const auto detection = detect_alarm(ds.alarm, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(localize(ds.alarm, ds.candidates, cfg, &detection));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Localize)->Arg(50)->Arg(200)->Arg(800)->Complexity()->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
