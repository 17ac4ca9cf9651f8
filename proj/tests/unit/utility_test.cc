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

#include "cfstream/utility.h"

#include <cmath>
#include <random>
#include <vector>

#include "cfstream/coverage.h"
#include "cfstream/error.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace cfstream {
namespace {

using ::cfstream::testing::MakeSchema;
using ::cfstream::testing::RandomItem;
using ::cfstream::testing::RandomItems;
using ::cfstream::testing::ReferenceUtilities;
using ::cfstream::testing::ThrownCode;

MemberSimilarities TwoMembers(double s1, double s2, double pair) {
  MemberSimilarities sims;
  sims.to_query = {s1, s2};
  sims.pairwise = {1.0, pair, pair, 1.0};
  return sims;
}

MemberSimilarities OneMember(double s) {
  MemberSimilarities sims;
  sims.to_query = {s};
  sims.pairwise = {1.0};
  return sims;
}

UtilityConfig Lambdas(double l1, double l2, double l3,
                      UtilityMode mode = UtilityMode::kHybrid) {
  UtilityConfig config;
  config.lambda1 = l1;
  config.lambda2 = l2;
  config.lambda3 = l3;
  config.mode = mode;
  return config;
}

TEST(ContentUtilityTest, EmptySingletonAndPair) {
  const UtilityConfig config = Lambdas(1, 0, 0);
  EXPECT_EQ(ContentUtility(MemberSimilarities{}, config), 0.0);
  EXPECT_EQ(ContentUtility(OneMember(0.8), config), 0.8);
  // 1.6 - (1/4) * (0.4 + 0.4) over ordered pairs.
  EXPECT_NEAR(ContentUtility(TwoMembers(0.9, 0.7, 0.4), config), 1.4, 1e-12);
}

TEST(SamplingUtilityTest, EmptySingletonAndPair) {
  const UtilityConfig config = Lambdas(0, 1, 0);
  const std::vector<ItemId> ids = {3, 8};
  EXPECT_EQ(SamplingUtility(MemberSimilarities{}, {}, config), 0.0);

  const double jitter = DiagonalJitter(3, config);
  EXPECT_NEAR(SamplingUtility(OneMember(0.8), std::span(ids).first(1), config),
              0.8 - (1.0 + jitter), 1e-12);

  // dist 0.6: det [[1, 0.625], [0.625, 1]] = 0.609375.
  const double value =
      SamplingUtility(TwoMembers(0.9, 0.7, 0.4), ids, config);
  EXPECT_NEAR(value, 1.6 - 0.609375 / 2.0, 2 * config.diag_jitter);
  EXPECT_NE(value, 1.6 - 0.609375 / 2.0);
}

TEST(ClusteringUtilityTest, EmptySingletonAndNoDiversity) {
  const UtilityConfig config = Lambdas(0, 0, 1);
  EXPECT_EQ(ClusteringUtility({}, {}, config), 0.0);
  const std::vector<double> s = {0.8};
  const std::vector<double> cov = {1.0};
  EXPECT_NEAR(ClusteringUtility(s, cov, config), 1.6, 1e-12);

  const std::vector<double> s3 = {0.1, 0.2, 0.3};
  const std::vector<double> cov3 = {2.0, 1.5, 0.7};
  EXPECT_EQ(ClusteringUtility(s3, cov3, Lambdas(0, 0, 0)), 0.1 + 0.2 + 0.3);
}

TEST(HybridUtilityTest, ModularSingleton) {
  const UtilityConfig config = Lambdas(0, 0, 0);
  const std::vector<ItemId> ids = {1};
  const std::vector<double> cov = {1.0};
  UtilityBreakdown b = EvaluateUtility(OneMember(0.8), ids, cov, config);
  EXPECT_NEAR(b.total, 2.4, 1e-12);
  EXPECT_EQ(b.total, b.f1 + b.f2 + b.f3);
  EXPECT_EQ(EvaluateUtility(MemberSimilarities{}, {}, {}, config).total, 0.0);
}

TEST(HybridUtilityTest, ModeSelectsOneComponent) {
  const std::vector<ItemId> ids = {1, 2};
  const std::vector<double> cov = {1.2, 0.6};
  const MemberSimilarities sims = TwoMembers(0.9, 0.7, 0.4);
  const UtilityBreakdown all =
      EvaluateUtility(sims, ids, cov, Lambdas(0.5, 0.5, 0.5));
  UtilityBreakdown content = EvaluateUtility(
      sims, ids, cov, Lambdas(0.5, 0.5, 0.5, UtilityMode::kContent));
  UtilityBreakdown sampling = EvaluateUtility(
      sims, ids, cov, Lambdas(0.5, 0.5, 0.5, UtilityMode::kSampling));
  UtilityBreakdown clustering = EvaluateUtility(
      sims, ids, cov, Lambdas(0.5, 0.5, 0.5, UtilityMode::kClustering));
  EXPECT_EQ(content.total, all.f1);
  EXPECT_EQ(content.f2, 0.0);
  EXPECT_EQ(sampling.total, all.f2);
  EXPECT_EQ(clustering.total, all.f3);
}

TEST(NeedsForTest, SkipsVanishingTerms) {
  UtilityNeeds needs = NeedsFor(Lambdas(0, 0, 0));
  EXPECT_FALSE(needs.pairs || needs.determinant || needs.coverage);
  needs = NeedsFor(Lambdas(0, 0.5, 0, UtilityMode::kSampling));
  EXPECT_TRUE(needs.determinant && needs.pairs);
  EXPECT_FALSE(needs.f1 || needs.f3);
  needs = NeedsFor(Lambdas(0.5, 0, 0.5, UtilityMode::kClustering));
  EXPECT_FALSE(needs.pairs);
  EXPECT_TRUE(needs.coverage);
}

TEST(DiagonalJitterTest, DeterministicPositiveAndBounded) {
  UtilityConfig config;
  config.seed = 5;
  for (ItemId id = 0; id < 1000; ++id) {
    const double j = DiagonalJitter(id, config);
    EXPECT_GT(j, 0.0);
    EXPECT_LE(j, config.diag_jitter);
    EXPECT_EQ(j, DiagonalJitter(id, config));
  }
  UtilityConfig other = config;
  other.seed = 6;
  EXPECT_NE(DiagonalJitter(1, config), DiagonalJitter(1, other));
}

TEST(KernelDeterminantTest, NonPositiveDefiniteKernelFails) {
  // A similarity above 1 yields K entries of 2 and an indefinite kernel.
  const std::vector<ItemId> ids = {1, 2};
  EXPECT_EQ(ThrownCode([&] {
              KernelLogDeterminant(TwoMembers(0.5, 0.5, 1.5), ids,
                                   UtilityConfig{});
            }),
            ErrorCode::kDeterminantFailure);
}

// f1, f2, f3 and hybrid against the written-out definitions (Eigen LU
// determinant), plus the determinant bound 0 < det(K) <= (1 + jitter)^n.
TEST(UtilityPropertyTest, MatchesReferenceOnRandomSets) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 400; ++trial) {
    const int labels = 1 + static_cast<int>(rng() % 3);
    auto schema = MakeSchema(3, 2, labels);
    SimilarityMeasure sim(schema);
    const std::size_t n = 1 + rng() % 12;
    std::vector<Item> members = RandomItems(rng, *schema, n);
    Item query = RandomItem(rng, *schema, kQueryItemId);
    UtilityConfig config;
    config.lambda1 = static_cast<double>(rng() % 11) / 10.0;
    config.lambda2 = static_cast<double>(rng() % 11) / 10.0;
    config.lambda3 = static_cast<double>(rng() % 11) / 10.0;
    config.seed = trial;
    std::vector<double> cov =
        ComputeArrivalCoverage(members, sim, labels, config);
    UtilityBreakdown got = EvaluateUtility(members, cov, query, sim, config);
    testing::ReferenceUtility want =
        ReferenceUtilities(members, cov, query, sim, config);
    EXPECT_NEAR(got.f1, want.f1, 1e-9);
    EXPECT_NEAR(got.f2, want.f2, 1e-9);
    EXPECT_NEAR(got.f3, want.f3, 1e-9);
    EXPECT_NEAR(got.total, want.hybrid, 1e-9);
    EXPECT_NEAR(got.total, got.f1 + got.f2 + got.f3, 1e-12);

    std::vector<ItemId> ids;
    for (const Item& m : members) ids.push_back(m.id);
    const double det = std::exp(KernelLogDeterminant(
        ComputeMemberSimilarities(members, query, sim), ids, config));
    EXPECT_GT(det, 0.0);
    EXPECT_LE(det, std::pow(1.0 + config.diag_jitter, n) + 1e-12);
  }
}

TEST(MarginalGainTest, EmptySetGainIsSingletonValue) {
  auto schema = MakeSchema(2, 1, 2);
  SimilarityMeasure sim(schema);
  std::mt19937_64 rng(4);
  Item e = RandomItem(rng, *schema, 1);
  Item q = RandomItem(rng, *schema, kQueryItemId);
  UtilityConfig config;
  const std::vector<Item> single = {e};
  const std::vector<double> cov = {1.3};
  EXPECT_NEAR(MarginalGain(e, 1.3, {}, {}, q, sim, config),
              EvaluateUtility(single, cov, q, sim, config).total, 1e-15);
}

TEST(MarginalGainTest, ModularGainIsQuerySimilarity) {
  auto schema = MakeSchema(3, 1, 2);
  SimilarityMeasure sim(schema);
  std::mt19937_64 rng(8);
  const UtilityConfig config = Lambdas(0, 0, 0, UtilityMode::kContent);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Item> members = RandomItems(rng, *schema, rng() % 10);
    std::vector<double> cov(members.size(), 1.0);
    Item e = RandomItem(rng, *schema, 100);
    Item q = RandomItem(rng, *schema, kQueryItemId);
    const double gain = MarginalGain(e, 1.0, members, cov, q, sim, config);
    EXPECT_GE(gain, 0.0);
    EXPECT_NEAR(gain, sim.Similarity(e, q), 1e-12);
  }
}

TEST(SwapThresholdTest, RuleAndBoundary) {
  EXPECT_EQ(SelectSwapThreshold(0.0), 1.0);
  EXPECT_EQ(SelectSwapThreshold(0.5), 0.717);
  const double boundary = 1.0 - 5.585 / 7.75;
  EXPECT_EQ(SelectSwapThreshold(boundary), 1.0);
  EXPECT_EQ(SelectSwapThreshold(boundary + 1e-9), 0.717);
  EXPECT_EQ(SelectSwapThreshold(boundary - 1e-9), 1.0);
  EXPECT_EQ(ThrownCode([] { SelectSwapThreshold(1.0); }),
            ErrorCode::kCurvatureOutOfRange);
  EXPECT_EQ(ThrownCode([] { SelectSwapThreshold(-0.1); }),
            ErrorCode::kCurvatureOutOfRange);
  EXPECT_EQ(SwapThresholdForCurvature(1.0), 0.717);
}

TEST(ApproximationRatioTest, MinimumAtOne) {
  EXPECT_DOUBLE_EQ(ApproximationRatio(1.0), 7.75);
  const double a = 1.717 * 1.717;
  EXPECT_NEAR(ApproximationRatio(0.717), 2.0 * a / 0.717 - 0.717 / a, 1e-12);
  EXPECT_NEAR(ApproximationRatio(0.717), 7.980, 5e-4);
  for (int i = 1; i <= 400; ++i) {
    EXPECT_GE(ApproximationRatio(i / 100.0), 7.75 - 1e-12);
  }
  EXPECT_EQ(ThrownCode([] { ApproximationRatio(0.0); }),
            ErrorCode::kInvalidArgument);
}

class CurvatureTest : public ::testing::Test {
 protected:
  CurvatureTest() : schema_(MakeSchema(3, 2, 3)), sim_(schema_) {
    std::mt19937_64 rng(12);
    sample_ = RandomItems(rng, *schema_, 60);
    query_ = RandomItem(rng, *schema_, kQueryItemId);
  }

  double Estimate(const UtilityConfig& config, std::uint64_t seed = 1) {
    std::vector<double> cov =
        ComputeArrivalCoverage(sample_, sim_, 3, config);
    CurvatureOptions options;
    options.seed = seed;
    return EstimateCurvature(sample_, cov, query_, sim_, config, options);
  }

  std::shared_ptr<const Schema> schema_;
  SimilarityMeasure sim_;
  std::vector<Item> sample_;
  Item query_;
};

TEST_F(CurvatureTest, ModularConfigHasZeroCurvature) {
  EXPECT_EQ(Estimate(Lambdas(0, 0, 0)), 0.0);
  EXPECT_EQ(Estimate(Lambdas(0, 0, 0, UtilityMode::kContent)), 0.0);
}

TEST_F(CurvatureTest, ClampedAndDeterministic) {
  for (double l : {0.25, 0.5, 1.0}) {
    const double c = Estimate(Lambdas(l, l, l));
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 1.0);
    EXPECT_EQ(c, Estimate(Lambdas(l, l, l)));
  }
  EXPECT_GT(Estimate(Lambdas(1, 0, 0, UtilityMode::kContent)), 0.0);
}

TEST_F(CurvatureTest, DegenerateSamples) {
  EXPECT_EQ(ThrownCode([&] {
              EstimateCurvature({}, {}, query_, sim_, UtilityConfig{});
            }),
            ErrorCode::kDegenerateSample);
  // Every item is maximally far from the query: all singleton values are 0.
  auto schema = MakeSchema(1, 0, 1);
  SimilarityMeasure sim(schema);
  std::vector<Item> far = {{0, 1, {10.0}, {}}, {1, 1, {10.0}, {}}};
  Item q{kQueryItemId, 1, {0.0}, {}};
  const std::vector<double> cov = {1.0, 1.0};
  EXPECT_EQ(ThrownCode([&] {
              EstimateCurvature(far, cov, q, sim,
                                Lambdas(0, 0, 0, UtilityMode::kContent));
            }),
            ErrorCode::kDegenerateSample);
}

}  // namespace
}  // namespace cfstream
