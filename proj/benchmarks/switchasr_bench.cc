// benchmarks/switchasr_bench.cc

// Copyright 2026  The switchasr Authors

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

#include <random>
#include <string>
#include <vector>

#include "switchasr/features.h"
#include "switchasr/model.h"
#include "switchasr/transcript.h"
#include "switchasr/waveform.h"

namespace switchasr {
namespace {

Waveform Noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.1);
  std::vector<double> v(n);
  for (double &x : v) x = g(rng);
  return Waveform(std::move(v));
}

FeatureMatrix Frames(int t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(t, 512);
  for (int i = 0; i < t; ++i)
    for (int d = 0; d < 512; ++d) m(i, d) = g(rng);
  return FeatureMatrix(std::move(m));
}

void BM_LogMel(benchmark::State &state) {
  const Waveform w = Noise(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(LogMel(w));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogMel)->Arg(4000)->Arg(16000)->Arg(160000);

void BM_PairFeatures(benchmark::State &state) {
  const Waveform y = Noise(16000, 2), s = Noise(16000, 3);
  for (auto _ : state) benchmark::DoNotOptimize(PairFeatures(y, s));
}
BENCHMARK(BM_PairFeatures);

void BM_Forward(benchmark::State &state) {
  const ModelParams p = InitParams(Architecture{}, 1);
  const FeatureMatrix f = Frames(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(Forward(p, f));
}
BENCHMARK(BM_Forward)->Arg(30)->Arg(125);

void BM_BatchGrad(benchmark::State &state) {
  const ModelParams p = InitParams(Architecture{}, 1);
  std::vector<FeatureMatrix> feats;
  for (int b = 0; b < 32; ++b) feats.push_back(Frames(20 + b % 12, 10 + b));
  std::vector<const FeatureMatrix *> ptrs;
  for (const auto &f : feats) ptrs.push_back(&f);
  std::vector<SwitchLabel> labels(32, SwitchLabel::FromBit(1));
  ModelParams grad(p.arch());
  ForwardCache cache;
  for (auto _ : state) {
    Forward(p, ptrs, &cache);
    benchmark::DoNotOptimize(Backward(p, cache, labels, &grad));
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_BatchGrad)->Unit(benchmark::kMillisecond);

void BM_EditDistance(benchmark::State &state) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> c(0x3042, 0x3093);
  std::u32string a, b;
  for (int i = 0; i < state.range(0); ++i) {
    a.push_back(static_cast<char32_t>(c(rng)));
    b.push_back(static_cast<char32_t>(c(rng)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(EditDistance(a, b));
}
BENCHMARK(BM_EditDistance)->Arg(40)->Arg(400);

}  // namespace
}  // namespace switchasr

BENCHMARK_MAIN();
