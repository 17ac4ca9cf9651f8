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

#include "cfstream/matroid.h"

#include <algorithm>
#include <string>
#include <utility>

#include "cfstream/error.h"

namespace cfstream {

// ---------------------------------------------------------------------------
// ExtensibilityState

ExtensibilityState::ExtensibilityState(ConstraintSpec spec)
    : spec_(std::move(spec)), counts_(spec_.lower.size(), 0) {
  if (spec_.upper.size() != spec_.lower.size()) {
    throw Error(ErrorCode::kMalformedSpec, "bound vectors differ in length");
  }
  for (int a : spec_.lower) capacity_use_ += a;
}

void ExtensibilityState::CheckLabel(Label label) const {
  if (label < 1 || label > static_cast<int>(counts_.size())) {
    throw Error(ErrorCode::kUnknownLabel,
                "label " + std::to_string(label) + " is not in the spec");
  }
}

bool ExtensibilityState::CanExtend(Label label) const {
  CheckLabel(label);
  const std::size_t l = LabelIndex(label);
  const int c = counts_[l];
  return c < spec_.lower[l] ||
         (spec_.lower[l] <= c && c < spec_.upper[l] && capacity_use_ < spec_.k);
}

void ExtensibilityState::ApplyInsert(Label label) {
  if (!CanExtend(label)) {
    throw Error(ErrorCode::kIllegalInsert,
                "adding label " + std::to_string(label) +
                    " would break extensibility");
  }
  const std::size_t l = LabelIndex(label);
  ++counts_[l];
  ++size_;
  if (counts_[l] > spec_.lower[l]) ++capacity_use_;
}

void ExtensibilityState::ApplyEvict(Label label) {
  CheckLabel(label);
  const std::size_t l = LabelIndex(label);
  if (counts_[l] == 0) {
    throw Error(ErrorCode::kIllegalEvict,
                "no member of label " + std::to_string(label) + " to evict");
  }
  if (counts_[l] > spec_.lower[l]) --capacity_use_;
  --counts_[l];
  --size_;
}

GoodLabelCase ExtensibilityState::GoodLabels(Label arriving) const {
  CheckLabel(arriving);
  const std::size_t l = LabelIndex(arriving);
  if (counts_[l] == spec_.upper[l]) return GoodLabelCase::kOnlyArriving;
  if (capacity_use_ < spec_.k || counts_[l] < spec_.lower[l]) {
    return GoodLabelCase::kAll;
  }
  return GoodLabelCase::kArrivingAndSurplus;
}

bool ExtensibilityState::IsGood(Label evicted, Label arriving) const {
  switch (GoodLabels(arriving)) {
    case GoodLabelCase::kOnlyArriving:
      return evicted == arriving;
    case GoodLabelCase::kAll:
      return true;
    case GoodLabelCase::kArrivingAndSurplus:
      return evicted == arriving ||
             counts_[LabelIndex(evicted)] > spec_.lower[LabelIndex(evicted)];
  }
  return false;
}

bool ExtensibilityState::Audit() const {
  int c = 0;
  int n = 0;
  for (std::size_t l = 0; l < counts_.size(); ++l) {
    if (counts_[l] < 0) return false;
    c += std::max(counts_[l], spec_.lower[l]);
    n += counts_[l];
  }
  return c == capacity_use_ && n == size_ && IsExtensible(counts_, spec_);
}

bool ExtensibilityState::IsExtensible(std::span<const int> counts,
                                      const ConstraintSpec& spec) {
  long long c = 0;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    if (counts[l] > spec.upper[l]) return false;
    c += std::max(counts[l], spec.lower[l]);
  }
  return c <= spec.k;
}

// ---------------------------------------------------------------------------
// SwapIndex

SwapIndex::SwapIndex(ConstraintSpec spec)
    : spec_(std::move(spec)),
      comparisons_(std::make_unique<std::uint64_t>(0)),
      all_(KeyLess{comparisons_.get()}),
      surplus_(KeyLess{comparisons_.get()}),
      surplus_key_(spec_.lower.size()) {
  by_label_.reserve(spec_.lower.size());
  for (std::size_t l = 0; l < spec_.lower.size(); ++l) {
    by_label_.emplace_back(KeyLess{comparisons_.get()});
  }
}

SwapIndex::SwapIndex(const SwapIndex& other)
    : spec_(other.spec_),
      comparisons_(std::make_unique<std::uint64_t>(*other.comparisons_)),
      all_(other.all_.begin(), other.all_.end(), KeyLess{comparisons_.get()}),
      surplus_(other.surplus_.begin(), other.surplus_.end(),
               KeyLess{comparisons_.get()}),
      surplus_key_(other.surplus_key_),
      entries_(other.entries_) {
  by_label_.reserve(other.by_label_.size());
  for (const Queue& q : other.by_label_) {
    by_label_.emplace_back(q.begin(), q.end(), KeyLess{comparisons_.get()});
  }
}

SwapIndex& SwapIndex::operator=(const SwapIndex& other) {
  if (this != &other) {
    SwapIndex copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void SwapIndex::Insert(ItemId id, double weight, Label label) {
  if (label < 1 || label > static_cast<int>(by_label_.size())) {
    throw Error(ErrorCode::kInconsistentIndex, "index insert: bad label");
  }
  Key key{weight, id, label};
  if (!entries_.emplace(id, key).second) {
    throw Error(ErrorCode::kInconsistentIndex,
                "index insert: duplicate id " + std::to_string(id));
  }
  all_.insert(key);
  by_label_[LabelIndex(label)].insert(key);
  RefreshSurplus(label);
}

void SwapIndex::Evict(ItemId id) {
  auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kInconsistentIndex,
                "index evict: unknown id " + std::to_string(id));
  }
  const Key key = it->second;
  const Label label = std::get<2>(key);
  entries_.erase(it);
  all_.erase(key);
  by_label_[LabelIndex(label)].erase(key);
  RefreshSurplus(label);
}

void SwapIndex::RefreshSurplus(Label label) {
  const std::size_t l = LabelIndex(label);
  std::optional<Key>& current = surplus_key_[l];
  const Queue& queue = by_label_[l];
  std::optional<Key> wanted;
  if (static_cast<int>(queue.size()) > spec_.lower[l]) {
    const Key& top = *queue.begin();
    wanted = Key{std::get<0>(top), std::get<1>(top), label};
  }
  if (current == wanted) return;
  if (current) surplus_.erase(*current);
  if (wanted) surplus_.insert(*wanted);
  current = wanted;
}

std::optional<IndexEntry> SwapIndex::MinOverall() const {
  if (all_.empty()) return std::nullopt;
  return ToEntry(*all_.begin());
}

std::optional<IndexEntry> SwapIndex::MinOfLabel(Label label) const {
  const Queue& q = by_label_[LabelIndex(label)];
  if (q.empty()) return std::nullopt;
  return ToEntry(*q.begin());
}

std::optional<IndexEntry> SwapIndex::MinGoodMember(
    const ExtensibilityState& state, Label arriving) const {
  switch (state.GoodLabels(arriving)) {
    case GoodLabelCase::kOnlyArriving:
      return MinOfLabel(arriving);
    case GoodLabelCase::kAll:
      return MinOverall();
    case GoodLabelCase::kArrivingAndSurplus: {
      std::optional<IndexEntry> own = MinOfLabel(arriving);
      if (surplus_.empty()) return own;
      IndexEntry other = ToEntry(*surplus_.begin());
      if (!own) return other;
      KeyLess less{comparisons_.get()};
      Key a{own->weight, own->id, own->label};
      Key b{other.weight, other.id, other.label};
      return less(b, a) ? other : *own;
    }
  }
  return std::nullopt;
}

void SwapIndex::Audit() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInconsistentIndex, "index audit: " + what);
  };
  if (all_.size() != entries_.size()) fail("W size differs from members");
  std::size_t per_label = 0;
  for (std::size_t l = 0; l < by_label_.size(); ++l) {
    per_label += by_label_[l].size();
    for (const Key& key : by_label_[l]) {
      auto it = entries_.find(std::get<1>(key));
      if (it == entries_.end() || it->second != key ||
          LabelIndex(std::get<2>(key)) != l) {
        fail("W_l holds a stale or foreign entry");
      }
      if (all_.find(key) == all_.end()) fail("W_l entry missing from W");
    }
    std::optional<Key> wanted;
    if (static_cast<int>(by_label_[l].size()) > spec_.lower[l]) {
      const Key& top = *by_label_[l].begin();
      wanted = Key{std::get<0>(top), std::get<1>(top),
                   static_cast<Label>(l + 1)};
    }
    if (surplus_key_[l] != wanted) fail("W' key differs from min of W_l");
    if (wanted && surplus_.find(*wanted) == surplus_.end()) {
      fail("W' misses a surplus label");
    }
  }
  if (per_label != all_.size()) fail("member in more than one W_l");
  std::size_t surplus_labels = 0;
  for (const auto& k : surplus_key_) surplus_labels += k.has_value();
  if (surplus_labels != surplus_.size()) fail("W' holds extra labels");
}

}  // namespace cfstream
