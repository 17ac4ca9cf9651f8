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

#include "cfstream/similarity.h"

#include <limits>
#include <memory>
#include <random>
#include <vector>

#include "cfstream/error.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace cfstream {
namespace {

using ::cfstream::testing::MakeSchema;
using ::cfstream::testing::RandomItem;
using ::cfstream::testing::ReferenceSimilarity;
using ::cfstream::testing::ThrownCode;

TEST(SimilarityTest, IdenticalItemsAreFullySimilar) {
  auto schema = MakeSchema(3, 2, 2);
  SimilarityMeasure sim(schema);
  Item a{0, 1, {1.0, 5.0, 9.0}, {0, 2}};
  EXPECT_EQ(sim.Similarity(a, a), 1.0);
  EXPECT_EQ(sim.Distance(a, a), 0.0);
}

TEST(SimilarityTest, MixedPairFromDefinition) {
  // One continuous feature on [0, 10] at 2 and 7, one equal categorical:
  // (1 - 5/10 + 1) / 2.
  auto schema = MakeSchema(1, 1, 2);
  SimilarityMeasure sim(schema);
  Item a{0, 1, {2.0}, {1}};
  Item b{1, 2, {7.0}, {1}};
  EXPECT_DOUBLE_EQ(sim.Similarity(a, b), (0.5 + 1.0) / 2.0);
}

TEST(SimilarityTest, MaximallyDifferentItemsScoreZero) {
  auto schema = MakeSchema(2, 2, 2);
  SimilarityMeasure sim(schema);
  Item a{0, 1, {0.0, 10.0}, {0, 1}};
  Item b{1, 1, {10.0, 0.0}, {1, 0}};
  EXPECT_EQ(sim.Similarity(a, b), 0.0);
  EXPECT_EQ(sim.Distance(a, b), 1.0);
}

TEST(SimilarityTest, OutOfRangeValuesAreClamped) {
  auto schema = MakeSchema(1, 0, 1);
  SimilarityMeasure sim(schema);
  Item a{0, 1, {-50.0}, {}};
  Item b{1, 1, {0.0}, {}};
  Item c{2, 1, {1e9}, {}};
  Item d{3, 1, {10.0}, {}};
  EXPECT_EQ(sim.Similarity(a, b), 1.0);
  EXPECT_EQ(sim.Similarity(c, d), 1.0);
  EXPECT_EQ(sim.Similarity(a, c), 0.0);
}

TEST(SimilarityTest, ConstantFeatureNeverSeparates) {
  auto schema = std::make_shared<const Schema>(
      std::vector<FeatureSpec>{{"x", FeatureKind::kContinuous, 3.0, 3.0},
                               {"c", FeatureKind::kCategorical, 0, 0}},
      "y", 2);
  SimilarityMeasure sim(schema);
  Item a{0, 1, {3.0}, {0}};
  Item b{1, 1, {7.0}, {1}};
  EXPECT_DOUBLE_EQ(sim.Similarity(a, b), 0.5);
  EXPECT_EQ(sim.Transport(a, b).continuous, 0.0);
}

TEST(SimilarityTest, WeightsFormWeightedMean) {
  auto schema = MakeSchema(1, 1, 2);
  SimilarityMeasure sim(schema, {3.0, 1.0});
  Item a{0, 1, {2.0}, {0}};
  Item b{1, 1, {7.0}, {1}};
  EXPECT_DOUBLE_EQ(sim.Similarity(a, b), 3.0 * 0.5 / 4.0);
}

TEST(SimilarityTest, RejectsBadWeights) {
  auto schema = MakeSchema(1, 1, 2);
  EXPECT_EQ(ThrownCode([&] { SimilarityMeasure(schema, {1.0}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(ThrownCode([&] { SimilarityMeasure(schema, {-1.0, 1.0}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(ThrownCode([&] { SimilarityMeasure(schema, {0.0, 0.0}); }),
            ErrorCode::kInvalidArgument);
}

TEST(SimilarityTest, LayoutMismatchIsSchemaError) {
  auto schema = MakeSchema(2, 1, 2);
  SimilarityMeasure sim(schema);
  Item a{0, 1, {1.0, 2.0}, {0}};
  Item b{1, 1, {1.0}, {0}};
  EXPECT_EQ(ThrownCode([&] { sim.Similarity(a, b); }),
            ErrorCode::kSchemaMismatch);
  EXPECT_EQ(ThrownCode([&] { sim.Transport(a, b); }),
            ErrorCode::kSchemaMismatch);
}

// Property: symmetric, in [0, 1], unit on the diagonal, complementary to
// the distance and equal to the definition, including boundary values.
TEST(SimilarityPropertyTest, MatchesReferenceOnFuzzedPairs) {
  std::mt19937_64 rng(2024);
  const double boundary[] = {0.0, 10.0, -1.0, 11.0, 5.0};
  for (int trial = 0; trial < 5000; ++trial) {
    const int continuous = static_cast<int>(rng() % 4);
    const int categorical = continuous == 0 ? 1 + static_cast<int>(rng() % 3)
                                            : static_cast<int>(rng() % 3);
    auto schema = MakeSchema(continuous, categorical, 2);
    SimilarityMeasure sim(schema);
    Item a = RandomItem(rng, *schema, 0);
    Item b = RandomItem(rng, *schema, 1);
    for (double& v : a.continuous) {
      if (rng() % 4 == 0) v = boundary[rng() % 5];
    }
    const double ab = sim.Similarity(a, b);
    EXPECT_EQ(ab, sim.Similarity(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_EQ(sim.Similarity(a, a), 1.0);
    EXPECT_EQ(sim.Distance(a, b) + ab, 1.0);
    EXPECT_NEAR(ab, ReferenceSimilarity(a, b, *schema), 1e-12);
  }
}

TEST(TransportTest, IdentityIsZero) {
  auto schema = MakeSchema(2, 2, 2);
  SimilarityMeasure sim(schema);
  Item a{0, 1, {3.0, 4.0}, {1, 2}};
  TransportComponents t = sim.Transport(a, a);
  EXPECT_EQ(t.continuous, 0.0);
  EXPECT_EQ(t.categorical, 0.0);
}

TEST(TransportTest, SplitsByFeatureKind) {
  // Normalized differences 0.3 and 0.9 plus one categorical mismatch.
  auto schema = MakeSchema(2, 1, 2);
  SimilarityMeasure sim(schema);
  Item e{0, 1, {1.0, 0.5}, {0}};
  Item q{1, 1, {4.0, 9.5}, {2}};
  TransportComponents t = sim.Transport(e, q);
  EXPECT_NEAR(t.continuous, 1.2, 1e-12);
  EXPECT_EQ(t.categorical, 1.0);
}

TEST(TransportTest, NoCategoricalFeaturesMeansNoMismatch) {
  auto schema = MakeSchema(3, 0, 2);
  SimilarityMeasure sim(schema);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    Item e = RandomItem(rng, *schema, 0);
    Item q = RandomItem(rng, *schema, 1);
    EXPECT_EQ(sim.Transport(e, q).categorical, 0.0);
  }
}

TEST(TransportTest, NormalizeMapsRangeToUnitInterval) {
  auto schema = MakeSchema(1, 0, 1);
  SimilarityMeasure sim(schema);
  EXPECT_EQ(sim.Normalize(0, 0.0), 0.0);
  EXPECT_EQ(sim.Normalize(0, 10.0), 1.0);
  EXPECT_EQ(sim.Normalize(0, 25.0), 1.0);
  EXPECT_DOUBLE_EQ(sim.Normalize(0, 2.5), 0.25);
}

}  // namespace
}  // namespace cfstream
