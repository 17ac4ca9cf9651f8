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

// Core data model: schemas, stream items, constraint and utility settings,
// and the explanation returned to callers.

#ifndef CFSTREAM_DOMAIN_H_
#define CFSTREAM_DOMAIN_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cfstream {

using ItemId = std::uint64_t;
// Labels are dense integers 1..L.
using Label = int;

// Id carried by query items that are not part of the stream.
inline constexpr ItemId kQueryItemId = std::numeric_limits<ItemId>::max();

// Documented cognitive-load cap on explanation size. Not enforced.
inline constexpr int kRecommendedMaxK = 25;

inline std::size_t LabelIndex(Label label) {
  return static_cast<std::size_t>(label - 1);
}

enum class FeatureKind { kContinuous, kCategorical };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  // Normalization range, continuous features only. min == max marks a
  // constant feature whose distance contribution is always zero.
  double min = 0.0;
  double max = 0.0;

  bool operator==(const FeatureSpec&) const = default;
};

class Schema {
 public:
  // Throws Error(kMalformedSpec) on duplicate names, empty feature list,
  // non-positive label count or inverted ranges.
  Schema(std::vector<FeatureSpec> features, std::string label_name,
         int label_count);

  const std::vector<FeatureSpec>& features() const { return features_; }
  const std::string& label_name() const { return label_name_; }
  int label_count() const { return label_count_; }

  std::size_t continuous_count() const { return continuous_.size(); }
  std::size_t categorical_count() const { return categorical_.size(); }

  // Feature spec of the i-th continuous / categorical value of an Item.
  const FeatureSpec& continuous_feature(std::size_t i) const {
    return features_[continuous_[i]];
  }
  const FeatureSpec& categorical_feature(std::size_t i) const {
    return features_[categorical_[i]];
  }

  // Index into Item::continuous or Item::categorical for a schema feature.
  std::size_t slot(std::size_t feature_index) const {
    return slots_[feature_index];
  }

  std::optional<std::size_t> FindFeature(std::string_view name) const;

  bool operator==(const Schema& other) const {
    return features_ == other.features_ && label_name_ == other.label_name_ &&
           label_count_ == other.label_count_;
  }

 private:
  std::vector<FeatureSpec> features_;
  std::string label_name_;
  int label_count_;
  std::vector<std::size_t> continuous_;
  std::vector<std::size_t> categorical_;
  std::vector<std::size_t> slots_;
};

// One stream element. Categorical values are interned symbol codes, see
// CategoryDictionary.
struct Item {
  ItemId id = 0;
  Label label = 1;
  std::vector<double> continuous;
  std::vector<std::int32_t> categorical;

  bool operator==(const Item&) const = default;
};

// Throws kSchemaMismatch for wrong vector lengths and kUnknownLabel for a
// label outside [1, L].
void ValidateItem(const Item& item, const Schema& schema);

struct ConstraintSpec {
  int k = 0;
  std::vector<int> lower;  // alpha_l, indexed by LabelIndex
  std::vector<int> upper;  // beta_l

  int label_count() const { return static_cast<int>(lower.size()); }
  int lower_bound(Label l) const { return lower[LabelIndex(l)]; }
  int upper_bound(Label l) const { return upper[LabelIndex(l)]; }

  bool operator==(const ConstraintSpec&) const = default;
};

// Accepts iff vector lengths equal L, 0 <= alpha_l <= beta_l and
// sum(alpha) <= k. Throws kMalformedSpec or kInfeasibleConstraints.
void ValidateConstraints(const ConstraintSpec& spec, int label_count);
void ValidateConstraints(const ConstraintSpec& spec, const Schema& schema);

enum class UtilityMode { kContent, kSampling, kClustering, kHybrid };

std::string_view UtilityModeName(UtilityMode mode);
// Accepts "content", "sampling", "clustering", "hybrid".
UtilityMode ParseUtilityMode(std::string_view name);

struct UtilityConfig {
  double lambda1 = 0.5;
  double lambda2 = 0.5;
  double lambda3 = 0.5;
  // Swap threshold lambda of the streaming swap rule. Empty means "select
  // from the estimated curvature on a warm-up prefix".
  std::optional<double> swap_threshold;
  UtilityMode mode = UtilityMode::kHybrid;
  double diag_jitter = 1e-6;
  double decay = 0.5;
  int reservoir_size = 32;
  std::uint64_t seed = 0;
};

// Throws kInvalidArgument when a lambda leaves [0, 1], the swap threshold is
// not positive, decay is outside (0, 1) or the reservoir is empty.
void ValidateUtilityConfig(const UtilityConfig& config);

struct UtilityBreakdown {
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;
  // Value of the configured utility: f1 + f2 + f3 in hybrid mode, otherwise
  // the single selected component.
  double total = 0.0;
};

struct ExplanationMember {
  Item item;
  double weight = 0.0;
  double sim_to_query = 0.0;
  double coverage = 0.0;
};

struct Explanation {
  std::vector<ExplanationMember> members;
  double utility = 0.0;
  UtilityBreakdown breakdown;
  std::vector<int> label_counts;
  bool feasible = false;
};

std::vector<int> CountLabels(std::span<const ExplanationMember> members,
                             int label_count);

// Membership in the solution space: |S| <= k and alpha_l <= c_l <= beta_l.
bool SatisfiesConstraints(std::span<const int> label_counts, std::size_t size,
                          const ConstraintSpec& spec);

// |{l : c_l outside [alpha_l, beta_l]}| + (1 if |S| > k).
int CountConstraintViolations(std::span<const int> label_counts,
                              std::size_t size, const ConstraintSpec& spec);

// Recomputes label counts from the members and checks them, the size bound
// and the feasible flag against the constraint spec.
bool AuditExplanation(const Explanation& explanation,
                      const ConstraintSpec& spec);

// Interns categorical symbols per categorical slot so items can carry
// compact integer codes.
class CategoryDictionary {
 public:
  explicit CategoryDictionary(std::size_t categorical_count = 0);

  std::int32_t Intern(std::size_t slot, std::string_view symbol);
  std::optional<std::int32_t> Find(std::size_t slot,
                                   std::string_view symbol) const;
  // Returns the symbol for a code; unknown codes render as "#<code>".
  std::string Name(std::size_t slot, std::int32_t code) const;

  std::size_t size(std::size_t slot) const { return names_[slot].size(); }

 private:
  std::vector<std::vector<std::string>> names_;
  std::vector<std::unordered_map<std::string, std::int32_t>> codes_;
};

// Single-consumer pull interface over a stream of items.
class ItemSource {
 public:
  virtual ~ItemSource() = default;
  virtual std::optional<Item> Next() = 0;
};

class VectorItemSource : public ItemSource {
 public:
  explicit VectorItemSource(std::span<const Item> items) : items_(items) {}

  std::optional<Item> Next() override {
    if (next_ >= items_.size()) return std::nullopt;
    return items_[next_++];
  }

 private:
  std::span<const Item> items_;
  std::size_t next_ = 0;
};

}  // namespace cfstream

#endif  // CFSTREAM_DOMAIN_H_
