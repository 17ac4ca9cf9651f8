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

#include "cfstream/session.h"

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "cfstream/error.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace cfstream {
namespace {

using ::cfstream::testing::LabelHistogram;
using ::cfstream::testing::MakeSchema;
using ::cfstream::testing::RandomItem;
using ::cfstream::testing::RandomItemsCovering;
using ::cfstream::testing::RandomSpec;
using ::cfstream::testing::ReferenceUtilities;
using ::cfstream::testing::ThrownCode;

std::vector<ItemId> MemberIds(const Explanation& e) {
  std::vector<ItemId> ids;
  for (const ExplanationMember& m : e.members) ids.push_back(m.item.id);
  return ids;
}

UtilityConfig Modular(double swap_threshold) {
  UtilityConfig config;
  config.mode = UtilityMode::kContent;
  config.lambda1 = 0.0;
  config.swap_threshold = swap_threshold;
  return config;
}

// One continuous feature on [0, 10]; the query sits at 0 so an item at x
// has similarity 1 - x / 10.
class SingleFeatureTest : public ::testing::Test {
 protected:
  SingleFeatureTest() : schema_(MakeSchema(1, 0, 2)), sim_(schema_) {}

  Item At(ItemId id, double x, Label label = 1) const {
    return Item{id, label, {x}, {}};
  }

  std::shared_ptr<const Schema> schema_;
  SimilarityMeasure sim_;
  Item query_{kQueryItemId, 1, {0.0}, {}};
};

TEST_F(SingleFeatureTest, EmptySetAcceptsExtensibleArrival) {
  QuerySession session(sim_, query_, ConstraintSpec{2, {0, 0}, {2, 2}},
                       Modular(1.0));
  ArrivalOutcome out = session.ProcessItem(At(0, 3.0));
  EXPECT_EQ(out.kind, ArrivalKind::kAccepted);
  EXPECT_NEAR(out.weight, 0.7, 1e-12);
  EXPECT_EQ(session.size(), 1u);
  EXPECT_NEAR(session.weight(0), 0.7, 1e-12);
}

TEST_F(SingleFeatureTest, SwapInequality) {
  // Member weight 0.6, arrival weight 1.0: 1.0 >= 1.5 * 0.6 swaps while
  // 1.0 < 2 * 0.6 rejects.
  const ConstraintSpec spec{1, {0, 0}, {1, 1}};
  QuerySession loose(sim_, query_, spec, Modular(0.5));
  loose.ProcessItem(At(0, 4.0));
  ArrivalOutcome swapped = loose.ProcessItem(At(1, 0.0));
  EXPECT_EQ(swapped.kind, ArrivalKind::kSwapped);
  EXPECT_EQ(swapped.evicted, 0u);
  EXPECT_EQ(loose.Finalize().members.at(0).item.id, 1u);

  QuerySession strict(sim_, query_, spec, Modular(1.0));
  strict.ProcessItem(At(0, 4.0));
  ArrivalOutcome rejected = strict.ProcessItem(At(1, 0.0));
  EXPECT_EQ(rejected.kind, ArrivalKind::kRejected);
  EXPECT_EQ(strict.Finalize().members.at(0).item.id, 0u);
  EXPECT_EQ(strict.stats().rejects, 1u);
}

TEST_F(SingleFeatureTest, PreserveSetsKeepFirstArrivals) {
  QuerySession session(sim_, query_, ConstraintSpec{3, {2, 1}, {3, 3}},
                       Modular(1.0));
  const Label labels[] = {1, 2, 1, 1, 2, 1};
  for (ItemId id = 0; id < 6; ++id) {
    ArrivalOutcome out = session.ProcessItem(At(id, 1.0 + id, labels[id]));
    EXPECT_EQ(out.preserved, id == 0 || id == 1 || id == 2);
  }
  ASSERT_EQ(session.preserved(1).size(), 2u);
  EXPECT_EQ(session.preserved(1)[0].item.id, 0u);
  EXPECT_EQ(session.preserved(1)[1].item.id, 2u);
  ASSERT_EQ(session.preserved(2).size(), 1u);
  EXPECT_EQ(session.preserved(2)[0].item.id, 1u);
}

TEST_F(SingleFeatureTest, FinalizeLeavesFeasibleSetUnchanged) {
  QuerySession session(sim_, query_, ConstraintSpec{2, {1, 1}, {1, 1}},
                       Modular(1.0));
  session.ProcessItem(At(0, 2.0, 1));
  session.ProcessItem(At(1, 5.0, 2));
  session.ProcessItem(At(2, 9.0, 1));
  Explanation e = session.Finalize();
  EXPECT_EQ(MemberIds(e), (std::vector<ItemId>{0, 1}));
  EXPECT_TRUE(e.feasible);
  EXPECT_EQ(e.label_counts, (std::vector<int>{1, 1}));
}

TEST_F(SingleFeatureTest, MissingLabelIsInfeasibleStream) {
  QuerySession session(sim_, query_, ConstraintSpec{2, {1, 1}, {2, 2}},
                       Modular(1.0));
  session.ProcessItem(At(0, 2.0, 1));
  session.ProcessItem(At(1, 3.0, 1));
  Explanation snap = session.Snapshot();
  EXPECT_FALSE(snap.feasible);
  EXPECT_EQ(ThrownCode([&] { session.Finalize(); }),
            ErrorCode::kInfeasibleStream);
}

TEST_F(SingleFeatureTest, EmptyStreamWithoutLowerBounds) {
  RunResult r = RunStream(std::span<const Item>{}, sim_, query_,
                          ConstraintSpec{3, {0, 0}, {3, 3}}, UtilityConfig{});
  EXPECT_TRUE(r.explanation.members.empty());
  EXPECT_TRUE(r.explanation.feasible);
  EXPECT_EQ(r.explanation.utility, 0.0);
  EXPECT_EQ(r.stats.items, 0u);
  EXPECT_EQ(r.stats.utility_calls, 0u);
}

TEST_F(SingleFeatureTest, RejectsMalformedInput) {
  EXPECT_EQ(ThrownCode([&] {
              QuerySession(sim_, query_, ConstraintSpec{1, {1, 1}, {1, 1}},
                           Modular(1.0));
            }),
            ErrorCode::kInfeasibleConstraints);
  QuerySession session(sim_, query_, ConstraintSpec{2, {0, 0}, {2, 2}},
                       Modular(1.0));
  Item wrong{0, 1, {1.0, 2.0}, {}};
  EXPECT_EQ(ThrownCode([&] { session.ProcessItem(wrong); }),
            ErrorCode::kSchemaMismatch);
  EXPECT_EQ(ThrownCode([&] { session.ProcessItem(At(1, 1.0, 3)); }),
            ErrorCode::kUnknownLabel);
}

TEST(EngineSpecTest, AblationsRelaxBounds) {
  const ConstraintSpec spec{5, {1, 2}, {2, 3}};
  SessionOptions options;
  options.drop_lower_bounds = true;
  EXPECT_EQ(EngineSpec(spec, options), (ConstraintSpec{5, {0, 0}, {2, 3}}));
  options = {};
  options.drop_upper_bounds = true;
  EXPECT_EQ(EngineSpec(spec, options), (ConstraintSpec{5, {1, 2}, {5, 5}}));
}

struct RandomInstance {
  std::shared_ptr<const Schema> schema;
  std::vector<Item> items;
  Item query;
  ConstraintSpec spec;
  UtilityConfig config;
};

RandomInstance MakeInstance(std::mt19937_64& rng, std::size_t max_n) {
  RandomInstance inst;
  const int labels = 1 + static_cast<int>(rng() % 5);
  inst.schema = MakeSchema(2, 2, labels);
  const std::size_t n =
      static_cast<std::size_t>(labels) + rng() % (max_n - labels + 1);
  inst.items = RandomItemsCovering(rng, *inst.schema, n, 1);
  inst.query = RandomItem(rng, *inst.schema, kQueryItemId);
  const std::vector<int> available = LabelHistogram(inst.items, labels);
  inst.spec =
      RandomSpec(rng, labels, 1 + static_cast<int>(rng() % 10), available);
  inst.config.seed = rng();
  inst.config.lambda1 = static_cast<double>(rng() % 11) / 10.0;
  inst.config.lambda2 = static_cast<double>(rng() % 11) / 10.0;
  inst.config.lambda3 = static_cast<double>(rng() % 11) / 10.0;
  if (rng() % 2 == 0) inst.config.swap_threshold = 0.25 + (rng() % 8) / 4.0;
  return inst;
}

// Feasibility re-checked from scratch, audits after every arrival, at most
// two utility calls per item, and counts never below min(arrivals, alpha).
TEST(SessionPropertyTest, FeasibleAuditedAndCheap) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 300; ++trial) {
    RandomInstance inst = MakeInstance(rng, 80);
    SimilarityMeasure sim(inst.schema);
    SessionOptions options;
    options.audit = true;
    options.use_sketch = trial % 4 != 0;
    QuerySession session(sim, inst.query, inst.spec, inst.config, options);
    std::vector<int> arrivals(inst.spec.label_count(), 0);
    for (const Item& item : inst.items) {
      session.ProcessItem(item);
      ++arrivals[item.label - 1];
      for (Label l = 1; l <= inst.spec.label_count(); ++l) {
        ASSERT_GE(session.state().count(l),
                  std::min(arrivals[l - 1], inst.spec.lower_bound(l)));
      }
    }
    Explanation e = session.Finalize();
    RunStats stats = session.stats();
    ASSERT_TRUE(e.feasible);
    EXPECT_TRUE(AuditExplanation(e, inst.spec));
    EXPECT_TRUE(SatisfiesConstraints(CountLabels(e.members,
                                                 inst.spec.label_count()),
                                     e.members.size(), inst.spec));
    EXPECT_LE(stats.utility_calls, 2 * inst.items.size());
    EXPECT_EQ(stats.stream_upper, 0u);
    EXPECT_EQ(stats.final_violations, 0);
    EXPECT_EQ(stats.items, inst.items.size());
    EXPECT_EQ(stats.accepted + stats.swaps + stats.rejects, stats.items);

    std::vector<Item> members;
    std::vector<double> cov;
    for (const ExplanationMember& m : e.members) {
      members.push_back(m.item);
      cov.push_back(m.coverage);
    }
    EXPECT_NEAR(e.utility,
                ReferenceUtilities(members, cov, inst.query, sim, inst.config)
                    .hybrid,
                1e-9);
  }
}

TEST(SessionTest, SketchAndScratchChooseTheSameSet) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    RandomInstance inst = MakeInstance(rng, 120);
    SimilarityMeasure sim(inst.schema);
    SessionOptions scratch;
    scratch.use_sketch = false;
    RunResult a = RunStream(inst.items, sim, inst.query, inst.spec, inst.config);
    RunResult b =
        RunStream(inst.items, sim, inst.query, inst.spec, inst.config, scratch);
    EXPECT_EQ(MemberIds(a.explanation), MemberIds(b.explanation));
    EXPECT_NEAR(a.explanation.utility, b.explanation.utility, 1e-9);
    EXPECT_EQ(a.stats.swaps, b.stats.swaps);
  }
}

TEST(SessionTest, RunsAreDeterministic) {
  std::mt19937_64 rng(9);
  RandomInstance inst = MakeInstance(rng, 150);
  SimilarityMeasure sim(inst.schema);
  inst.config.swap_threshold.reset();
  RunResult a = RunStream(inst.items, sim, inst.query, inst.spec, inst.config);
  RunResult b = RunStream(inst.items, sim, inst.query, inst.spec, inst.config);
  EXPECT_EQ(MemberIds(a.explanation), MemberIds(b.explanation));
  EXPECT_EQ(a.explanation.utility, b.explanation.utility);
  EXPECT_EQ(a.stats.swap_threshold, b.stats.swap_threshold);
  EXPECT_EQ(a.stats.curvature, b.stats.curvature);
}

TEST(SessionTest, SnapshotThenFinalizeAgree) {
  std::mt19937_64 rng(10);
  RandomInstance inst = MakeInstance(rng, 60);
  SimilarityMeasure sim(inst.schema);
  QuerySession session(sim, inst.query, inst.spec, inst.config);
  for (const Item& item : inst.items) session.ProcessItem(item);
  Explanation snap = session.Snapshot();
  Explanation fin = session.Finalize();
  EXPECT_EQ(MemberIds(snap), MemberIds(fin));
  EXPECT_EQ(snap.utility, fin.utility);
  EXPECT_EQ(snap.feasible, fin.feasible);
}

TEST(SessionTest, SnapshotDoesNotDisturbTheStream) {
  std::mt19937_64 rng(11);
  RandomInstance inst = MakeInstance(rng, 100);
  SimilarityMeasure sim(inst.schema);
  QuerySession watched(sim, inst.query, inst.spec, inst.config);
  QuerySession plain(sim, inst.query, inst.spec, inst.config);
  for (const Item& item : inst.items) {
    watched.ProcessItem(item);
    watched.Snapshot();
    plain.ProcessItem(item);
  }
  EXPECT_EQ(MemberIds(watched.Finalize()), MemberIds(plain.Finalize()));
}

TEST(SessionTest, UtilityCallsAtMostTwoPerItem) {
  std::mt19937_64 rng(12);
  for (bool sketch : {true, false}) {
    RandomInstance inst = MakeInstance(rng, 200);
    SimilarityMeasure sim(inst.schema);
    SessionOptions options;
    options.use_sketch = sketch;
    RunResult r = RunStream(inst.items, sim, inst.query, inst.spec,
                            inst.config, options);
    EXPECT_LE(r.stats.utility_calls, 2 * inst.items.size());
  }
}

TEST(SessionTest, TraceAndTimingsAreRecorded) {
  std::mt19937_64 rng(13);
  RandomInstance inst = MakeInstance(rng, 50);
  SimilarityMeasure sim(inst.schema);
  SessionOptions options;
  options.record_trace = true;
  options.record_timings = true;
  RunResult r =
      RunStream(inst.items, sim, inst.query, inst.spec, inst.config, options);
  EXPECT_EQ(r.stats.violation_trace.size(), inst.items.size());
  EXPECT_EQ(r.stats.per_item_nanos.size(), inst.items.size());
  EXPECT_TRUE(std::all_of(r.stats.violation_trace.begin(),
                          r.stats.violation_trace.end(),
                          [](int v) { return v == 0; }));
}

TEST(SessionTest, ReconfigureRescoresWithoutTouchingWeights) {
  std::mt19937_64 rng(14);
  RandomInstance inst = MakeInstance(rng, 80);
  SimilarityMeasure sim(inst.schema);
  QuerySession session(sim, inst.query, inst.spec, inst.config);
  for (const Item& item : inst.items) session.ProcessItem(item);
  const Explanation before = session.Snapshot();
  UtilityConfig other = inst.config;
  other.lambda1 = 1.0;
  other.lambda2 = 0.0;
  other.lambda3 = 0.2;
  other.swap_threshold.reset();
  session.Reconfigure(other);
  // An unset threshold keeps the session's current lambda.
  EXPECT_EQ(session.swap_threshold(), inst.config.swap_threshold.value_or(1.0));
  const Explanation after = session.Snapshot();
  ASSERT_EQ(MemberIds(before), MemberIds(after));
  std::vector<Item> members;
  std::vector<double> cov;
  for (std::size_t i = 0; i < after.members.size(); ++i) {
    EXPECT_EQ(after.members[i].weight, before.members[i].weight);
    members.push_back(after.members[i].item);
    cov.push_back(after.members[i].coverage);
  }
  EXPECT_NEAR(after.utility,
              ReferenceUtilities(members, cov, inst.query, sim, other).hybrid,
              1e-9);
}

TEST(SessionTest, ForkKeepsWhatFitsAndContinues) {
  std::mt19937_64 rng(15);
  auto schema = MakeSchema(2, 1, 3);
  SimilarityMeasure sim(schema);
  std::vector<Item> items = RandomItemsCovering(rng, *schema, 300, 5);
  Item query = RandomItem(rng, *schema, kQueryItemId);
  UtilityConfig config;
  config.swap_threshold = 1.0;
  QuerySession session(sim, query, ConstraintSpec{8, {1, 1, 1}, {4, 4, 4}},
                       config);
  for (std::size_t i = 0; i < 150; ++i) session.ProcessItem(items[i]);
  const std::vector<ItemId> parent_before = MemberIds(session.Snapshot());

  const ConstraintSpec narrow{4, {1, 1, 1}, {2, 2, 2}};
  QuerySession child = session.Fork(narrow);
  EXPECT_EQ(child.spec(), narrow);
  EXPECT_LE(child.size(), 4u);
  EXPECT_TRUE(child.state().Audit());
  EXPECT_NO_THROW(child.index().Audit());
  const std::vector<ItemId> kept = MemberIds(child.Snapshot());
  for (ItemId id : kept) {
    EXPECT_TRUE(std::find(parent_before.begin(), parent_before.end(), id) !=
                parent_before.end());
  }
  // The parent is untouched.
  EXPECT_EQ(MemberIds(session.Snapshot()), parent_before);

  for (std::size_t i = 150; i < items.size(); ++i) {
    session.ProcessItem(items[i]);
    child.ProcessItem(items[i]);
  }
  Explanation e = child.Finalize();
  EXPECT_TRUE(e.feasible);
  EXPECT_TRUE(AuditExplanation(e, narrow));
  EXPECT_TRUE(session.Finalize().feasible);
}

TEST(AutoSwapThresholdTest, ModularUtilityPicksOne) {
  std::mt19937_64 rng(16);
  auto schema = MakeSchema(2, 1, 2);
  SimilarityMeasure sim(schema);
  std::vector<Item> warmup = RandomItemsCovering(rng, *schema, 100, 1);
  Item query = RandomItem(rng, *schema, kQueryItemId);
  UtilityConfig modular;
  modular.lambda1 = modular.lambda2 = modular.lambda3 = 0.0;
  SwapThresholdChoice choice =
      AutoSwapThreshold(warmup, query, sim, 2, modular);
  ASSERT_TRUE(choice.curvature.has_value());
  EXPECT_EQ(*choice.curvature, 0.0);
  EXPECT_EQ(choice.lambda, 1.0);

  SwapThresholdChoice empty = AutoSwapThreshold({}, query, sim, 2, modular);
  EXPECT_FALSE(empty.curvature.has_value());
  EXPECT_EQ(empty.lambda, 1.0);

  UtilityConfig hybrid;
  SwapThresholdChoice h = AutoSwapThreshold(warmup, query, sim, 2, hybrid);
  ASSERT_TRUE(h.curvature.has_value());
  EXPECT_EQ(h.lambda, SelectSwapThreshold(*h.curvature));
}

}  // namespace
}  // namespace cfstream
