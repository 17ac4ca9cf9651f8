// Copyright 2026 The Authors.
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

// Micro benchmarks of the per-item hot paths.

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "cfstream/bench.h"
#include "cfstream/domain.h"
#include "cfstream/evaluator.h"
#include "cfstream/matroid.h"
#include "cfstream/session.h"
#include "cfstream/similarity.h"
#include "cfstream/synth.h"

namespace cfstream {
namespace {

const Instance& SharedInstance(int k) {
  static std::map<int, std::unique_ptr<Instance>> cache;
  auto& slot = cache[k];
  if (slot == nullptr) {
    SynthConfig synth;
    synth.n = 20000;
    synth.seed = 7;
    synth.label_mode = DriftMode::kSkewed;
    slot = std::make_unique<Instance>(MakeSyntheticInstance(synth, k));
  }
  return *slot;
}

void BM_Similarity(benchmark::State& state) {
  const Instance& inst = SharedInstance(10);
  std::size_t i = 0;
  for (auto _ : state) {
    const Item& a = inst.items[i % inst.items.size()];
    const Item& b = inst.items[(i + 1) % inst.items.size()];
    benchmark::DoNotOptimize(inst.sim.Similarity(a, b));
    ++i;
  }
}
BENCHMARK(BM_Similarity);

// f(S + e) for a set of state.range(0) members.
void BM_Evaluate(benchmark::State& state, bool use_sketch) {
  const Instance& inst = SharedInstance(10);
  const std::size_t size = static_cast<std::size_t>(state.range(0));
  UtilityConfig config;
  std::unique_ptr<UtilityEvaluator> evaluator =
      MakeEvaluator(use_sketch, inst.sim, inst.query, config);
  for (std::size_t i = 0; i < size; ++i) {
    evaluator->Append(evaluator->Evaluate(inst.items[i], 0.5));
  }
  std::size_t i = size;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        evaluator->Evaluate(inst.items[i % inst.items.size()], 0.5));
    ++i;
  }
}
BENCHMARK_CAPTURE(BM_Evaluate, sketch, true)->Arg(5)->Arg(25)->Arg(100);
BENCHMARK_CAPTURE(BM_Evaluate, scratch, false)->Arg(5)->Arg(25)->Arg(100);

void BM_ProcessItem(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Instance& inst = SharedInstance(k);
  UtilityConfig config;
  config.swap_threshold = 1.0;
  auto session = std::make_unique<QuerySession>(inst.sim, inst.query,
                                                inst.spec, config);
  std::size_t i = 0;
  for (auto _ : state) {
    if (i == inst.items.size()) {
      state.PauseTiming();
      session = std::make_unique<QuerySession>(inst.sim, inst.query,
                                               inst.spec, config);
      i = 0;
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(session->ProcessItem(inst.items[i]));
    ++i;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ProcessItem)->Arg(5)->Arg(25)->Arg(100);

// Evict the lightest member, insert a fresh one and query the swap
// candidate, on a full set of state.range(0) members over 8 labels.
void BM_SwapIndexChurn(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int labels = 8;
  ConstraintSpec spec{k, std::vector<int>(labels, 0),
                      std::vector<int>(labels, k / 4 + 1)};
  ExtensibilityState matroid(spec);
  SwapIndex index(spec);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  ItemId next = 0;
  while (matroid.size() < k) {
    const Label l = 1 + static_cast<Label>(rng() % labels);
    if (!matroid.CanExtend(l)) continue;
    matroid.ApplyInsert(l);
    index.Insert(next, weight(rng), l);
    ++next;
  }
  for (auto _ : state) {
    const IndexEntry victim = *index.MinOverall();
    index.Evict(victim.id);
    matroid.ApplyEvict(victim.label);
    Label l = 1 + static_cast<Label>(rng() % labels);
    while (!matroid.CanExtend(l)) l = 1 + static_cast<Label>(rng() % labels);
    matroid.ApplyInsert(l);
    index.Insert(next++, weight(rng), l);
    const Label arriving = 1 + static_cast<Label>(rng() % labels);
    if (!matroid.CanExtend(arriving)) {
      benchmark::DoNotOptimize(index.MinGoodMember(matroid, arriving));
    }
  }
}
BENCHMARK(BM_SwapIndexChurn)->Arg(25)->Arg(1000);

}  // namespace
}  // namespace cfstream

BENCHMARK_MAIN();
