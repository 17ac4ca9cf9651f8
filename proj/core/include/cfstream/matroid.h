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

// Extensibility matroid bookkeeping and the swap index.
//
// A set S is extensible (some feasible superset exists) iff
//   (E1) c_l <= beta_l for every label l, and
//   (E2) C = sum_l max(c_l, alpha_l) <= k,
// where c_l = |S n D_l|. The extensible sets form a matroid.

#ifndef CFSTREAM_MATROID_H_
#define CFSTREAM_MATROID_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cfstream/domain.h"

namespace cfstream {

// Which labels may lose a member so that an arriving item of label l fits.
enum class GoodLabelCase {
  kOnlyArriving,        // c_l == beta_l: only l
  kAll,                 // C < k or c_l < alpha_l: every label
  kArrivingAndSurplus,  // l and every l' with c_l' > alpha_l'
};

class ExtensibilityState {
 public:
  explicit ExtensibilityState(ConstraintSpec spec);

  // (c_l < alpha_l) or (alpha_l <= c_l < beta_l and C < k). O(1).
  bool CanExtend(Label label) const;
  // Throws kIllegalInsert unless CanExtend(label).
  void ApplyInsert(Label label);
  // Throws kIllegalEvict when c_l == 0.
  void ApplyEvict(Label label);

  // Precondition: an item of `arriving` cannot be added directly.
  GoodLabelCase GoodLabels(Label arriving) const;
  // Whether removing a member of `evicted` makes room for `arriving`.
  bool IsGood(Label evicted, Label arriving) const;

  int count(Label label) const { return counts_[LabelIndex(label)]; }
  std::span<const int> counts() const { return counts_; }
  int capacity_use() const { return capacity_use_; }
  int size() const { return size_; }
  const ConstraintSpec& spec() const { return spec_; }

  // Recomputes C from the counts and checks E1/E2.
  bool Audit() const;

  // E1 and E2 evaluated directly on a count vector.
  static bool IsExtensible(std::span<const int> counts,
                           const ConstraintSpec& spec);

 private:
  void CheckLabel(Label label) const;

  ConstraintSpec spec_;
  std::vector<int> counts_;
  int capacity_use_ = 0;
  int size_ = 0;
};

struct IndexEntry {
  ItemId id = 0;
  double weight = 0.0;
  Label label = 0;
};

// Priority structure over the members of S, keyed by stored weight with
// ties broken by smaller id:
//   W    all members,
//   W_l  members of label l,
//   W'   labels with c_l > alpha_l, keyed by the minimum of W_l.
// Updates and queries are O(log k).
class SwapIndex {
 public:
  explicit SwapIndex(ConstraintSpec spec);
  SwapIndex(const SwapIndex& other);
  SwapIndex& operator=(const SwapIndex& other);
  SwapIndex(SwapIndex&&) noexcept = default;
  SwapIndex& operator=(SwapIndex&&) noexcept = default;

  // Throws kInconsistentIndex on a duplicate id or bad label.
  void Insert(ItemId id, double weight, Label label);
  // Throws kInconsistentIndex for an id that is not indexed.
  void Evict(ItemId id);

  // Minimum-weight member whose eviction lets an item of `arriving` in,
  // given the matching extensibility state. Empty when no such member
  // exists.
  std::optional<IndexEntry> MinGoodMember(const ExtensibilityState& state,
                                          Label arriving) const;

  std::optional<IndexEntry> MinOverall() const;
  std::optional<IndexEntry> MinOfLabel(Label label) const;

  std::size_t size() const { return all_.size(); }
  bool contains(ItemId id) const { return entries_.count(id) != 0; }
  // Number of key comparisons performed so far (complexity probes).
  std::uint64_t comparisons() const { return *comparisons_; }

  // Rebuilds every queue from the member table and compares. Throws
  // kInconsistentIndex on any mismatch.
  void Audit() const;

 private:
  using Key = std::tuple<double, ItemId, Label>;

  struct KeyLess {
    std::uint64_t* counter;
    bool operator()(const Key& a, const Key& b) const {
      ++*counter;
      if (std::get<0>(a) != std::get<0>(b)) {
        return std::get<0>(a) < std::get<0>(b);
      }
      return std::get<1>(a) < std::get<1>(b);
    }
  };
  using Queue = std::set<Key, KeyLess>;

  void RefreshSurplus(Label label);
  static IndexEntry ToEntry(const Key& key) {
    return {std::get<1>(key), std::get<0>(key), std::get<2>(key)};
  }

  ConstraintSpec spec_;
  std::unique_ptr<std::uint64_t> comparisons_;
  Queue all_;
  std::vector<Queue> by_label_;
  Queue surplus_;
  std::vector<std::optional<Key>> surplus_key_;
  std::unordered_map<ItemId, Key> entries_;
};

}  // namespace cfstream

#endif  // CFSTREAM_MATROID_H_
