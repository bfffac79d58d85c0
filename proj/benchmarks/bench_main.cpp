// Copyright 2026 The attri2vec Authors
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

#include <map>

#include "attri2vec/inference.hpp"
#include "attri2vec/sampler.hpp"
#include "attri2vec/synthetic.hpp"
#include "attri2vec/trainer.hpp"
#include "attri2vec/walker.hpp"

using namespace attri2vec;

namespace {

const AttributedGraph& bench_graph(std::size_t n) {
  static std::map<std::size_t, AttributedGraph> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, generate_random_graph(n, 10.0, 1000, 20, 7)).first;
  return it->second;
}

MappingKind kind_arg(std::int64_t k) { return static_cast<MappingKind>(k); }

}  // namespace

static void BM_SgdStep(benchmark::State& state) {
  const auto& g = bench_graph(2000);
  const auto dim = static_cast<std::size_t>(state.range(1));
  Trainer t(g, initial_model(kind_arg(state.range(0)), g.feature_dim(), dim, 1), TrainConfig{});
  Rng rng(1);
  std::vector<NodeIndex> neg(5);
  for (auto _ : state) {
    const auto i = static_cast<NodeIndex>(rng() % g.num_nodes());
    const auto j = static_cast<NodeIndex>(rng() % g.num_nodes());
    for (auto& q : neg) q = static_cast<NodeIndex>(rng() % g.num_nodes());
    benchmark::DoNotOptimize(t.sgd_step(i, j, neg, 0.01));
  }
  state.SetItemsProcessed(state.iterations());
  state.SetLabel(std::string(to_string(kind_arg(state.range(0)))));
}
BENCHMARK(BM_SgdStep)->ArgsProduct({{0, 1, 2, 3}, {64, 128}});

static void BM_AliasDraw(benchmark::State& state) {
  Rng rng(2);
  std::lognormal_distribution<double> ln(0.0, 2.0);
  std::vector<double> w(static_cast<std::size_t>(state.range(0)));
  for (double& x : w) x = ln(rng);
  const AliasTable table(w);
  for (auto _ : state) benchmark::DoNotOptimize(table.sample(rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AliasDraw)->Range(1 << 10, 1 << 20);

static void BM_AliasBuild(benchmark::State& state) {
  Rng rng(3);
  std::vector<double> w(static_cast<std::size_t>(state.range(0)));
  for (double& x : w) x = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (auto _ : state) benchmark::DoNotOptimize(AliasTable(w));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AliasBuild)->Range(1 << 10, 1 << 20);

static void BM_BuildCorpus(benchmark::State& state) {
  const auto& g = bench_graph(static_cast<std::size_t>(state.range(0)));
  const WalkConfig cfg{100, 2, 10, 1};
  for (auto _ : state) benchmark::DoNotOptimize(build_corpus(g, cfg, static_cast<std::size_t>(state.range(1))));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_BuildCorpus)->Args({1000, 1})->Args({4000, 1})->Args({4000, 4})->Unit(benchmark::kMillisecond);

static void BM_EmbedGraph(benchmark::State& state) {
  const auto& g = bench_graph(4000);
  const auto model = initial_model(kind_arg(state.range(0)), g.feature_dim(), 128, 1);
  for (auto _ : state) benchmark::DoNotOptimize(embed_graph(model, g));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.num_nodes()));
}
BENCHMARK(BM_EmbedGraph)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
