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

#include "cfstream/bench.h"

#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfstream/error.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace cfstream {
namespace {

using ::cfstream::testing::ThrownCode;

SuiteOptions Tiny() {
  SuiteOptions o;
  o.k_grid = {3};
  o.seeds = {1, 2};
  o.n = 300;
  o.windows = {1, 5};
  o.window_n = 120;
  o.window_k = 3;
  o.scaling_n = {500, 1000};
  o.scaling_k = 20;
  o.drift_k = 4;
  o.config.swap_threshold = 1.0;
  return o;
}

TEST(BenchTest, AlgorithmNamesRoundTrip) {
  ASSERT_EQ(AllAlgorithms().size(), 6u);
  for (Algorithm a : AllAlgorithms()) {
    EXPECT_EQ(ParseAlgorithm(AlgorithmName(a)), a);
  }
  EXPECT_EQ(ThrownCode([] { ParseAlgorithm("magic"); }),
            ErrorCode::kInvalidArgument);
}

TEST(BenchTest, InstanceBoundsComeFromTheStream) {
  SynthConfig synth;
  synth.n = 500;
  Instance inst = MakeSyntheticInstance(synth, 10);
  EXPECT_EQ(inst.items.size(), 500u);
  EXPECT_EQ(inst.spec.k, 10);
  EXPECT_EQ(inst.query.id, kQueryItemId);
  EXPECT_NO_THROW(ValidateConstraints(inst.spec, inst.sim.schema()));
}

TEST(BenchTest, EndToEndCoversEveryAlgorithmAndSeed) {
  SuiteOptions o = Tiny();
  std::vector<RunRow> rows = RunEndToEnd(o);
  ASSERT_EQ(rows.size(), 6u * 2u);
  std::set<std::string> names;
  for (const RunRow& r : rows) {
    names.insert(r.algorithm);
    EXPECT_EQ(r.suite, "end2end");
    EXPECT_EQ(r.n, 300u);
    EXPECT_EQ(r.k, 3);
    if (r.algorithm == "ours" || r.algorithm == "offline") {
      EXPECT_EQ(r.stream_violations + r.final_violations, 0u) << r.algorithm;
    }
  }
  EXPECT_EQ(names.size(), 6u);
  // Threads do not change results.
  o.jobs = 3;
  std::vector<RunRow> parallel = RunEndToEnd(o);
  ASSERT_EQ(parallel.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(parallel[i].utility, rows[i].utility);
    EXPECT_EQ(parallel[i].algorithm, rows[i].algorithm);
  }
}

TEST(BenchTest, AblationVariants) {
  std::vector<RunRow> rows = RunAblation(Tiny());
  ASSERT_EQ(rows.size(), 7u * 2u);
  std::set<std::string> variants;
  for (const RunRow& r : rows) variants.insert(r.variant);
  EXPECT_EQ(variants,
            (std::set<std::string>{"full", "w/o sketch", "w/o lower-bound",
                                   "w/o upper-bound", "lambda=0.5", "lambda=1",
                                   "lambda=2"}));
  // The sketch changes only the runtime.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].variant != "w/o sketch") continue;
    const RunRow& full = rows[i - 1];
    ASSERT_EQ(full.variant, "full");
    EXPECT_EQ(rows[i].utility, full.utility);
    EXPECT_EQ(rows[i].cost, full.cost);
  }
}

TEST(BenchTest, WindowsEmitTwentyPointsPerRun) {
  std::vector<WindowRow> rows = RunWindows(Tiny());
  EXPECT_EQ(rows.size(), 2u * 2u * 20u);
  for (const WindowRow& r : rows) {
    EXPECT_GT(r.fraction, 0.0);
    EXPECT_LE(r.fraction, 1.0);
  }
}

TEST(BenchTest, DriftBaselineIsOursOnNormalStreams) {
  DriftTable t = RunDrift(Tiny(), {Algorithm::kOurs, Algorithm::kRandom});
  EXPECT_EQ(t.rows.size(), 4u * 2u * 2u);
  ASSERT_EQ(t.cells.size(), 4u * 2u);
  bool found = false;
  for (const DriftCell& c : t.cells) {
    if (c.algorithm == "ours" && c.feature_mode == DriftMode::kNormal &&
        c.label_mode == DriftMode::kNormal) {
      EXPECT_EQ(c.delta, 0.0);
      EXPECT_EQ(c.mean_utility, t.baseline);
      found = true;
    }
    EXPECT_NEAR(c.delta, (c.mean_utility - t.baseline) / std::fabs(t.baseline),
                1e-12);
  }
  EXPECT_TRUE(found);
}

TEST(BenchTest, ScalingStreamsWithoutStoringItems) {
  std::vector<RunRow> rows = RunScaling(Tiny());
  ASSERT_EQ(rows.size(), 2u * 2u);
  for (const RunRow& r : rows) {
    EXPECT_EQ(r.suite, "scaling");
    EXPECT_EQ(r.k, 20);
    EXPECT_LE(r.utility_calls, 2 * r.n);
    EXPECT_EQ(r.stream_violations + r.final_violations, 0u);
  }
}

TEST(BenchTest, RowFieldsAlignWithHeader) {
  RunRow row;
  row.suite = "e2e";
  row.algorithm = "ours";
  row.stream_violations = 2;
  row.final_violations = 1;
  row.cost = std::nan("");
  std::vector<std::string> fields = RunRowFields(row);
  std::vector<std::string> header = RunRowHeader();
  ASSERT_EQ(fields.size(), header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "violations") EXPECT_EQ(fields[i], "3");
    if (header[i] == "cost") EXPECT_EQ(fields[i], "nan");
  }
}

TEST(BenchTest, ParallelForVisitsEveryIndexOnceAndRethrows) {
  for (int jobs : {1, 4}) {
    std::vector<std::atomic<int>> hits(100);
    ParallelFor(100, jobs, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(ParallelFor(10, jobs,
                             [](std::size_t i) {
                               if (i == 7) throw std::runtime_error("x");
                             }),
                 std::runtime_error);
  }
}

}  // namespace
}  // namespace cfstream
