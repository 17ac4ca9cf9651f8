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

// Hand-rolled generators and independent reference implementations shared
// by the unit, integration and acceptance tests.

#ifndef CFSTREAM_TESTS_SUPPORT_TEST_SUPPORT_H_
#define CFSTREAM_TESTS_SUPPORT_TEST_SUPPORT_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cfstream/domain.h"
#include "cfstream/error.h"
#include "cfstream/matroid.h"
#include "cfstream/similarity.h"

namespace cfstream::testing {

// Code of the cfstream::Error thrown by `fn`, or nothing.
template <typename Fn>
std::optional<ErrorCode> ThrownCode(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// A small mixed schema: `continuous` features in [0, 10] and `categorical`
// features with `levels` levels.
std::shared_ptr<const Schema> MakeSchema(int continuous, int categorical,
                                         int labels);

Item RandomItem(std::mt19937_64& rng, const Schema& schema, ItemId id,
                int levels = 3);

std::vector<Item> RandomItems(std::mt19937_64& rng, const Schema& schema,
                              std::size_t n, int levels = 3);

// Items whose label histogram gives every label at least `min_per_label`
// items (n >= labels * min_per_label).
std::vector<Item> RandomItemsCovering(std::mt19937_64& rng,
                                      const Schema& schema, std::size_t n,
                                      int min_per_label, int levels = 3);

// A random spec with sum(alpha) <= k, alpha <= beta <= k, and alpha_l no
// larger than `available[l]` when given.
ConstraintSpec RandomSpec(std::mt19937_64& rng, int labels, int k,
                          std::span<const int> available = {});

std::vector<int> LabelHistogram(std::span<const Item> items, int labels);

// Gower similarity written out from its definition.
double ReferenceSimilarity(const Item& a, const Item& b, const Schema& schema);

// f1, f2, f3 and the hybrid sum written out from their definitions. The
// determinant comes from Eigen's LU decomposition.
struct ReferenceUtility {
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;
  double hybrid = 0.0;
};
ReferenceUtility ReferenceUtilities(std::span<const Item> members,
                                    std::span<const double> coverage,
                                    const Item& query,
                                    const SimilarityMeasure& sim,
                                    const UtilityConfig& config);

// The component of `ref` the config's mode selects.
double ReferenceValue(const ReferenceUtility& ref, const UtilityConfig& config);

// Best utility over all bit-mask subsets satisfying the constraints, scored
// with ReferenceUtilities. `coverage` is per item. Empty when nothing is
// feasible.
std::optional<double> ReferenceOptimum(std::span<const Item> items,
                                       std::span<const double> coverage,
                                       const Item& query,
                                       const SimilarityMeasure& sim,
                                       const ConstraintSpec& spec,
                                       const UtilityConfig& config);

// Brute-force E1/E2 check: whether some superset of the counts, adding
// items of labels with spare supply, reaches a member of the solution
// space. Supply is unbounded.
bool ReferenceExtensible(std::span<const int> counts,
                         const ConstraintSpec& spec);

// Minimum (weight, id) member e' with S + e - e' extensible for an arrival
// of label `arriving`, found by trying every member.
std::optional<IndexEntry> BruteForceMinGood(std::span<const IndexEntry> members,
                                            const ConstraintSpec& spec,
                                            Label arriving);

struct FuzzTally {
  std::uint64_t checked = 0;
  std::uint64_t mismatches = 0;
};

// Random walks of inserts and evictions on ExtensibilityState + SwapIndex
// pairs; at each state an arrival that cannot be added directly is drawn
// and MinGoodMember is compared with BruteForceMinGood. Weights come from a
// small grid so ties are frequent. Stops after `pairs` comparisons.
FuzzTally FuzzSwapIndex(std::uint64_t seed, std::uint64_t pairs);

struct MatroidTally {
  std::uint64_t independent_sets = 0;
  std::uint64_t downward_failures = 0;
  std::uint64_t augmentation_failures = 0;
  std::uint64_t can_extend_failures = 0;
};

// Exhaustive check over all subsets of items with the given labels: the
// extensible family is closed under removal, satisfies augmentation, and
// CanExtend on the reached state agrees with ReferenceExtensible.
MatroidTally CheckMatroidAxioms(std::span<const Label> labels,
                                const ConstraintSpec& spec);

// Drives a SketchEvaluator and a ScratchEvaluator through the same random
// sequence of `ops` inserts, replacements and removals (at most `max_size`
// members) and returns the largest absolute gap between their f values,
// checking both f(S) after every op and every candidate f(S + e).
double SketchScratchMaxGap(std::uint64_t seed, int ops, std::size_t max_size,
                           const UtilityConfig& config);

// Bit mask enumeration helpers.
std::vector<int> CountsOfMask(std::uint32_t mask, std::span<const Item> items,
                              int labels);

}  // namespace cfstream::testing

#endif  // CFSTREAM_TESTS_SUPPORT_TEST_SUPPORT_H_
