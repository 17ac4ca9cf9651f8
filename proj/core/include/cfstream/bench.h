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

// Experiment harness over the synthetic generator: end-to-end comparison,
// ablations, sliding windows, drift grid and scaling.

#ifndef CFSTREAM_BENCH_H_
#define CFSTREAM_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "cfstream/domain.h"
#include "cfstream/session.h"
#include "cfstream/similarity.h"
#include "cfstream/synth.h"

namespace cfstream {

enum class Algorithm { kOurs, kRelaxed, kRandom, kSieve, kOffline, kKnn };

std::string_view AlgorithmName(Algorithm algorithm);
Algorithm ParseAlgorithm(std::string_view name);
const std::vector<Algorithm>& AllAlgorithms();

// A generated stream with its query and bounds inferred from the stream's
// label histogram.
struct Instance {
  SynthConfig synth;
  SimilarityMeasure sim;
  std::vector<Item> items;
  Item query;
  ConstraintSpec spec;
};

Instance MakeSyntheticInstance(const SynthConfig& synth, int k,
                               double lower_slack = 0.9,
                               double upper_slack = 1.1);

RunResult RunAlgorithm(Algorithm algorithm, std::span<const Item> items,
                       const Item& query, const SimilarityMeasure& sim,
                       const ConstraintSpec& spec, const UtilityConfig& config,
                       const SessionOptions& options = {},
                       std::uint64_t seed = 0);
RunResult RunAlgorithm(Algorithm algorithm, const Instance& instance,
                       const UtilityConfig& config,
                       const SessionOptions& options = {},
                       std::uint64_t seed = 0);

struct SuiteOptions {
  std::vector<int> k_grid = {5, 10, 25};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t n = 10000;
  // Stream shape of the end-to-end, ablation and window suites.
  DriftMode feature_mode = DriftMode::kNormal;
  DriftMode label_mode = DriftMode::kSkewed;
  std::vector<std::size_t> windows = {1, 5, 10};
  std::size_t window_n = 2000;
  int window_k = 5;
  std::vector<std::size_t> scaling_n = {1000000, 2000000, 3000000, 4000000,
                                        5000000};
  int scaling_k = 1000;
  int drift_k = 10;
  UtilityConfig config;  // lambda defaults; swap threshold unset -> auto
  int jobs = 1;
};

struct RunRow {
  std::string suite;
  std::string algorithm;
  std::string variant;
  std::string dataset;
  std::size_t n = 0;
  int k = 0;
  std::uint64_t seed = 0;
  double utility = 0.0;
  double cost = 0.0;  // NaN for an empty explanation
  std::uint64_t stream_violations = 0;
  int final_violations = 0;
  std::uint64_t nanos = 0;
  std::uint64_t utility_calls = 0;
  double swap_threshold = 0.0;
};

std::vector<std::string> RunRowHeader();
std::vector<std::string> RunRowFields(const RunRow& row);

RunRow MakeRunRow(std::string suite, Algorithm algorithm, std::string variant,
                  const Instance& instance, std::uint64_t seed,
                  const RunResult& result);

// Every algorithm on every (k, seed).
std::vector<RunRow> RunEndToEnd(const SuiteOptions& options);

// The streaming algorithm with auto lambda and its variants: w/o sketch,
// w/o lower-bound, w/o upper-bound, lambda in {0.5, 1, 2}.
std::vector<RunRow> RunAblation(const SuiteOptions& options);

struct WindowRow {
  std::size_t window = 0;
  std::uint64_t seed = 0;
  double fraction = 0.0;
  double utility = 0.0;
};
std::vector<WindowRow> RunWindows(const SuiteOptions& options);

struct DriftCell {
  DriftMode feature_mode;
  DriftMode label_mode;
  std::string algorithm;
  double mean_utility = 0.0;
  // (mean utility - ours on normal/normal) / |ours on normal/normal|
  double delta = 0.0;
};
struct DriftTable {
  std::vector<RunRow> rows;
  std::vector<DriftCell> cells;
  double baseline = 0.0;
};
DriftTable RunDrift(const SuiteOptions& options,
                    const std::vector<Algorithm>& algorithms = AllAlgorithms());

// The streaming algorithm on generated streams of each size in scaling_n
// with k = scaling_k and the clustering utility; items are never stored.
std::vector<RunRow> RunScaling(const SuiteOptions& options);

// Runs fn(0..count-1) on up to `jobs` threads.
void ParallelFor(std::size_t count, int jobs,
                 const std::function<void(std::size_t)>& fn);

}  // namespace cfstream

#endif  // CFSTREAM_BENCH_H_
