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

#include "cfstream/baselines.h"

#include <algorithm>
#include <random>
#include <vector>

#include "cfstream/coverage.h"
#include "cfstream/error.h"
#include "cfstream/eval.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace cfstream {
namespace {

using ::cfstream::testing::LabelHistogram;
using ::cfstream::testing::MakeSchema;
using ::cfstream::testing::RandomItem;
using ::cfstream::testing::RandomItems;
using ::cfstream::testing::RandomItemsCovering;
using ::cfstream::testing::RandomSpec;
using ::cfstream::testing::ReferenceOptimum;
using ::cfstream::testing::ThrownCode;

std::vector<ItemId> MemberIds(const Explanation& e) {
  std::vector<ItemId> ids;
  for (const ExplanationMember& m : e.members) ids.push_back(m.item.id);
  return ids;
}

UtilityConfig ModularConfig() {
  UtilityConfig config;
  config.lambda1 = config.lambda2 = config.lambda3 = 0.0;
  config.swap_threshold = 1.0;
  return config;
}

class BaselineTest : public ::testing::Test {
 protected:
  BaselineTest() : schema_(MakeSchema(2, 1, 3)), sim_(schema_), rng_(77) {
    items_ = RandomItemsCovering(rng_, *schema_, 400, 10);
    query_ = RandomItem(rng_, *schema_, kQueryItemId);
  }

  std::shared_ptr<const Schema> schema_;
  SimilarityMeasure sim_;
  std::mt19937_64 rng_;
  std::vector<Item> items_;
  Item query_;
  ConstraintSpec spec_{6, {1, 1, 1}, {3, 3, 3}};
};

TEST_F(BaselineTest, KnnSingleLabelIsTopKBySimilarity) {
  auto schema = MakeSchema(2, 1, 1);
  SimilarityMeasure sim(schema);
  std::vector<Item> items = RandomItems(rng_, *schema, 50);
  const ConstraintSpec spec{5, {0}, {5}};
  RunResult r = KnnRotation(items, query_, sim, spec, UtilityConfig{});
  std::vector<std::pair<double, ItemId>> ranked;
  for (const Item& item : items) {
    ranked.push_back({-sim.Similarity(item, query_), item.id});
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<ItemId> want;
  for (int i = 0; i < 5; ++i) want.push_back(ranked[i].second);
  std::sort(want.begin(), want.end());
  EXPECT_EQ(MemberIds(r.explanation), want);
}

TEST_F(BaselineTest, KnnOnePerLabelTakesEachLabelsNearest) {
  const ConstraintSpec spec{5, {0, 0, 0}, {1, 1, 1}};
  RunResult r = KnnRotation(items_, query_, sim_, spec, UtilityConfig{});
  ASSERT_EQ(r.explanation.members.size(), 3u);
  for (const ExplanationMember& m : r.explanation.members) {
    for (const Item& other : items_) {
      if (other.label != m.item.label) continue;
      EXPECT_GE(m.sim_to_query, sim_.Similarity(other, query_));
    }
  }
}

TEST_F(BaselineTest, KnnTiesGoToSmallerId) {
  auto schema = MakeSchema(1, 0, 1);
  SimilarityMeasure sim(schema);
  std::vector<Item> items = {
      {4, 1, {2.0}, {}}, {2, 1, {2.0}, {}}, {9, 1, {2.0}, {}}};
  Item q{kQueryItemId, 1, {0.0}, {}};
  RunResult r = KnnRotation(items, q, sim, ConstraintSpec{2, {0}, {2}},
                            UtilityConfig{});
  EXPECT_EQ(MemberIds(r.explanation), (std::vector<ItemId>{2, 4}));
}

TEST_F(BaselineTest, KnnNeverBreaksUpperBounds) {
  RunResult r = KnnRotation(items_, query_, sim_, spec_, UtilityConfig{});
  for (Label l = 1; l <= 3; ++l) {
    EXPECT_LE(r.explanation.label_counts[l - 1], spec_.upper_bound(l));
  }
  EXPECT_LE(static_cast<int>(r.explanation.members.size()), spec_.k);
}

TEST_F(BaselineTest, RandomSwapIsSeedDeterministic) {
  UtilityConfig config;
  RunResult a = RandomSwap(items_, query_, sim_, spec_, config, 5);
  RunResult b = RandomSwap(items_, query_, sim_, spec_, config, 5);
  EXPECT_EQ(MemberIds(a.explanation), MemberIds(b.explanation));
  EXPECT_EQ(a.stats.swaps, b.stats.swaps);
  bool any_differs = false;
  for (std::uint64_t seed = 6; seed < 12 && !any_differs; ++seed) {
    RunResult c = RandomSwap(items_, query_, sim_, spec_, config, seed);
    any_differs = MemberIds(c.explanation) != MemberIds(a.explanation);
  }
  EXPECT_TRUE(any_differs);
}

TEST_F(BaselineTest, RandomSwapSwapsAboutHalfTheBlockedArrivals) {
  RunResult r = RandomSwap(items_, query_, sim_, spec_, UtilityConfig{}, 3);
  const double blocked = static_cast<double>(r.stats.swaps + r.stats.rejects);
  ASSERT_GT(blocked, 300.0);
  EXPECT_NEAR(r.stats.swaps / blocked, 0.5, 0.1);
  EXPECT_LE(static_cast<int>(r.explanation.members.size()), spec_.k);
}

TEST_F(BaselineTest, RelaxedNeverBreaksUpperBounds) {
  UtilityConfig config;
  config.swap_threshold = 0.5;
  SessionOptions options;
  options.record_trace = true;
  RunResult r = RelaxedStreaming(items_, query_, sim_, spec_, config, options);
  EXPECT_EQ(r.stats.stream_upper, 0u);
  for (Label l = 1; l <= 3; ++l) {
    EXPECT_LE(r.explanation.label_counts[l - 1], spec_.upper_bound(l));
  }
}

TEST_F(BaselineTest, SieveSingletonWithinEpsilon) {
  UtilityConfig config;
  config.mode = UtilityMode::kContent;
  double best_singleton = 0.0;
  for (const Item& item : items_) {
    best_singleton = std::max(best_singleton, sim_.Similarity(item, query_));
  }
  for (double eps : {0.05, 0.1, 0.5}) {
    SieveOptions options;
    options.epsilon = eps;
    RunResult r = SieveNoConstraint(items_, query_, sim_,
                                    ConstraintSpec{1, {0, 0, 0}, {1, 1, 1}},
                                    config, options);
    ASSERT_EQ(r.explanation.members.size(), 1u);
    EXPECT_GE(r.explanation.utility * (1.0 + eps), best_singleton - 1e-12);
  }
}

TEST_F(BaselineTest, SieveIgnoresLabelsAndIsDeterministic) {
  // Every item carries label 1 while the spec caps it at one member.
  std::vector<Item> items = items_;
  for (Item& item : items) item.label = 1;
  UtilityConfig config;
  const ConstraintSpec spec{5, {0, 0, 0}, {1, 5, 5}};
  RunResult a = SieveNoConstraint(items, query_, sim_, spec, config);
  RunResult b = SieveNoConstraint(items, query_, sim_, spec, config);
  EXPECT_EQ(MemberIds(a.explanation), MemberIds(b.explanation));
  EXPECT_GT(a.explanation.members.size(), 1u);
  EXPECT_GT(a.stats.stream_upper, 0u);
  EXPECT_GT(a.stats.final_violations, 0);
  EXPECT_EQ(ThrownCode([&] {
              SieveNoConstraint(items, query_, sim_, spec, config,
                                SieveOptions{0.0});
            }),
            ErrorCode::kInvalidArgument);
}

TEST_F(BaselineTest, OfflineSingleItemIsSelected) {
  std::vector<Item> one = {items_[0]};
  ConstraintSpec spec{1, {0, 0, 0}, {1, 1, 1}};
  RunResult r = OfflineGreedy(one, query_, sim_, spec, UtilityConfig{});
  EXPECT_EQ(MemberIds(r.explanation), (std::vector<ItemId>{items_[0].id}));
  EXPECT_TRUE(r.explanation.feasible);
}

TEST_F(BaselineTest, OfflineTiesGoToSmallerId) {
  auto schema = MakeSchema(1, 0, 1);
  SimilarityMeasure sim(schema);
  std::vector<Item> items = {
      {8, 1, {3.0}, {}}, {1, 1, {3.0}, {}}, {5, 1, {3.0}, {}}};
  Item q{kQueryItemId, 1, {0.0}, {}};
  RunResult r = OfflineGreedy(items, q, sim, ConstraintSpec{1, {0}, {1}},
                              ModularConfig());
  EXPECT_EQ(MemberIds(r.explanation), (std::vector<ItemId>{1}));
}

TEST_F(BaselineTest, OfflineMissingLabelIsInfeasible) {
  std::vector<Item> items = items_;
  std::erase_if(items, [](const Item& item) { return item.label == 3; });
  EXPECT_EQ(ThrownCode([&] {
              OfflineGreedy(items, query_, sim_, spec_, UtilityConfig{});
            }),
            ErrorCode::kInfeasibleStream);
}

// Offline greedy output is feasible whenever the instance is, reaches half
// of the exhaustive optimum for modular utilities, and is at least the
// streaming value in at least 95% of instances.
TEST(OfflineGreedyPropertyTest, HalfApproximationAndDominance) {
  std::mt19937_64 rng(2025);
  int dominates = 0;
  const int trials = 500;
  for (int trial = 0; trial < trials; ++trial) {
    const int labels = 1 + static_cast<int>(rng() % 3);
    auto schema = MakeSchema(2, 1, labels);
    SimilarityMeasure sim(schema);
    const std::size_t n = static_cast<std::size_t>(labels) + rng() % (12 - labels + 1);
    std::vector<Item> items = RandomItemsCovering(rng, *schema, n, 1);
    Item query = RandomItem(rng, *schema, kQueryItemId);
    const ConstraintSpec spec =
        RandomSpec(rng, labels, 1 + static_cast<int>(rng() % 4),
                   LabelHistogram(items, labels));
    const UtilityConfig config = ModularConfig();
    const std::vector<double> cov =
        ComputeArrivalCoverage(items, sim, labels, config);
    const std::optional<double> opt =
        ReferenceOptimum(items, cov, query, sim, spec, config);
    ASSERT_TRUE(opt.has_value());
    RunResult greedy = OfflineGreedy(items, query, sim, spec, config);
    EXPECT_TRUE(greedy.explanation.feasible);
    EXPECT_GE(greedy.explanation.utility, *opt / 2.0 - 1e-12);
    EXPECT_LE(greedy.explanation.utility, *opt + 1e-9);
    RunResult ours = RunStream(items, sim, query, spec, config);
    if (greedy.explanation.utility >= ours.explanation.utility - 1e-12) {
      ++dominates;
    }
  }
  EXPECT_GE(dominates, trials * 95 / 100);
}

}  // namespace
}  // namespace cfstream
