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

#include "cfstream/domain.h"

#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "cfstream/error.h"

namespace cfstream {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInfeasibleConstraints:
      return "InfeasibleConstraints";
    case ErrorCode::kMalformedSpec:
      return "MalformedSpec";
    case ErrorCode::kSchemaMismatch:
      return "SchemaMismatch";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kUnknownLabel:
      return "UnknownLabel";
    case ErrorCode::kDeterminantFailure:
      return "DeterminantFailure";
    case ErrorCode::kDegenerateSample:
      return "DegenerateSample";
    case ErrorCode::kCurvatureOutOfRange:
      return "CurvatureOutOfRange";
    case ErrorCode::kIllegalInsert:
      return "IllegalInsert";
    case ErrorCode::kIllegalEvict:
      return "IllegalEvict";
    case ErrorCode::kNoEvictionCandidate:
      return "NoEvictionCandidate";
    case ErrorCode::kInconsistentIndex:
      return "InconsistentIndex";
    case ErrorCode::kInternalInconsistency:
      return "InternalInconsistency";
    case ErrorCode::kInfeasibleStream:
      return "InfeasibleStream";
    case ErrorCode::kEmptyExplanation:
      return "EmptyExplanation";
    case ErrorCode::kInstanceTooLarge:
      return "InstanceTooLarge";
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kIoError:
      return "IoError";
  }
  return "Unknown";
}

Schema::Schema(std::vector<FeatureSpec> features, std::string label_name,
               int label_count)
    : features_(std::move(features)),
      label_name_(std::move(label_name)),
      label_count_(label_count) {
  if (features_.empty()) {
    throw Error(ErrorCode::kMalformedSpec, "schema needs at least one feature");
  }
  if (label_count_ < 1) {
    throw Error(ErrorCode::kMalformedSpec, "label count must be positive");
  }
  if (label_name_.empty()) {
    throw Error(ErrorCode::kMalformedSpec, "label column name is empty");
  }
  std::set<std::string> names;
  slots_.resize(features_.size());
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const FeatureSpec& f = features_[i];
    if (f.name.empty()) {
      throw Error(ErrorCode::kMalformedSpec, "feature name is empty");
    }
    if (!names.insert(f.name).second || f.name == label_name_) {
      throw Error(ErrorCode::kMalformedSpec,
                  "duplicate feature name '" + f.name + "'");
    }
    if (f.kind == FeatureKind::kContinuous) {
      if (!std::isfinite(f.min) || !std::isfinite(f.max) || f.min > f.max) {
        throw Error(ErrorCode::kMalformedSpec,
                    "feature '" + f.name + "' has an invalid range");
      }
      slots_[i] = continuous_.size();
      continuous_.push_back(i);
    } else {
      slots_[i] = categorical_.size();
      categorical_.push_back(i);
    }
  }
}

std::optional<std::size_t> Schema::FindFeature(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

void ValidateItem(const Item& item, const Schema& schema) {
  if (item.continuous.size() != schema.continuous_count() ||
      item.categorical.size() != schema.categorical_count()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "item " + std::to_string(item.id) +
                    " does not match the schema's feature layout");
  }
  if (item.label < 1 || item.label > schema.label_count()) {
    throw Error(ErrorCode::kUnknownLabel,
                "item " + std::to_string(item.id) + " has label " +
                    std::to_string(item.label) + " outside [1, " +
                    std::to_string(schema.label_count()) + "]");
  }
}

void ValidateConstraints(const ConstraintSpec& spec, int label_count) {
  if (spec.k < 1) {
    throw Error(ErrorCode::kMalformedSpec, "k must be positive");
  }
  if (static_cast<int>(spec.lower.size()) != label_count ||
      static_cast<int>(spec.upper.size()) != label_count) {
    throw Error(ErrorCode::kMalformedSpec,
                "bound vectors must have one entry per label (" +
                    std::to_string(label_count) + ")");
  }
  long long lower_sum = 0;
  for (int l = 0; l < label_count; ++l) {
    if (spec.lower[l] < 0 || spec.upper[l] < spec.lower[l]) {
      throw Error(ErrorCode::kMalformedSpec,
                  "label " + std::to_string(l + 1) +
                      " needs 0 <= lower <= upper");
    }
    lower_sum += spec.lower[l];
  }
  if (lower_sum > spec.k) {
    throw Error(ErrorCode::kInfeasibleConstraints,
                "sum of lower bounds " + std::to_string(lower_sum) +
                    " exceeds k = " + std::to_string(spec.k));
  }
}

void ValidateConstraints(const ConstraintSpec& spec, const Schema& schema) {
  ValidateConstraints(spec, schema.label_count());
}

std::string_view UtilityModeName(UtilityMode mode) {
  switch (mode) {
    case UtilityMode::kContent:
      return "content";
    case UtilityMode::kSampling:
      return "sampling";
    case UtilityMode::kClustering:
      return "clustering";
    case UtilityMode::kHybrid:
      return "hybrid";
  }
  return "hybrid";
}

UtilityMode ParseUtilityMode(std::string_view name) {
  if (name == "content") return UtilityMode::kContent;
  if (name == "sampling") return UtilityMode::kSampling;
  if (name == "clustering") return UtilityMode::kClustering;
  if (name == "hybrid") return UtilityMode::kHybrid;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown utility mode '" + std::string(name) + "'");
}

void ValidateUtilityConfig(const UtilityConfig& config) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(config.lambda1) || !in_unit(config.lambda2) ||
      !in_unit(config.lambda3)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda1..3 must lie in [0, 1]");
  }
  if (config.swap_threshold && !(*config.swap_threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "swap threshold must be > 0");
  }
  if (!(config.decay > 0.0 && config.decay < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "decay must lie in (0, 1)");
  }
  if (!(config.diag_jitter > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "diagonal jitter must be > 0");
  }
  if (config.reservoir_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "reservoir size must be >= 1");
  }
}

std::vector<int> CountLabels(std::span<const ExplanationMember> members,
                             int label_count) {
  std::vector<int> counts(label_count, 0);
  for (const ExplanationMember& m : members) {
    if (m.item.label >= 1 && m.item.label <= label_count) {
      ++counts[LabelIndex(m.item.label)];
    }
  }
  return counts;
}

bool SatisfiesConstraints(std::span<const int> label_counts, std::size_t size,
                          const ConstraintSpec& spec) {
  if (size > static_cast<std::size_t>(spec.k)) return false;
  if (label_counts.size() != spec.lower.size()) return false;
  for (std::size_t l = 0; l < label_counts.size(); ++l) {
    if (label_counts[l] < spec.lower[l] || label_counts[l] > spec.upper[l]) {
      return false;
    }
  }
  return true;
}

int CountConstraintViolations(std::span<const int> label_counts,
                              std::size_t size, const ConstraintSpec& spec) {
  int violations = size > static_cast<std::size_t>(spec.k) ? 1 : 0;
  for (std::size_t l = 0; l < spec.lower.size(); ++l) {
    const int c = l < label_counts.size() ? label_counts[l] : 0;
    if (c < spec.lower[l] || c > spec.upper[l]) ++violations;
  }
  return violations;
}

bool AuditExplanation(const Explanation& explanation,
                      const ConstraintSpec& spec) {
  std::vector<int> counts =
      CountLabels(explanation.members, spec.label_count());
  if (counts != explanation.label_counts) return false;
  int total = std::accumulate(counts.begin(), counts.end(), 0);
  if (static_cast<std::size_t>(total) != explanation.members.size()) {
    return false;
  }
  std::set<ItemId> ids;
  for (const ExplanationMember& m : explanation.members) {
    if (!ids.insert(m.item.id).second) return false;
  }
  return explanation.feasible ==
         SatisfiesConstraints(counts, explanation.members.size(), spec);
}

CategoryDictionary::CategoryDictionary(std::size_t categorical_count)
    : names_(categorical_count), codes_(categorical_count) {}

std::int32_t CategoryDictionary::Intern(std::size_t slot,
                                        std::string_view symbol) {
  if (slot >= names_.size()) {
    names_.resize(slot + 1);
    codes_.resize(slot + 1);
  }
  auto [it, inserted] = codes_[slot].try_emplace(
      std::string(symbol), static_cast<std::int32_t>(names_[slot].size()));
  if (inserted) names_[slot].emplace_back(symbol);
  return it->second;
}

std::optional<std::int32_t> CategoryDictionary::Find(
    std::size_t slot, std::string_view symbol) const {
  if (slot >= codes_.size()) return std::nullopt;
  auto it = codes_[slot].find(std::string(symbol));
  if (it == codes_[slot].end()) return std::nullopt;
  return it->second;
}

std::string CategoryDictionary::Name(std::size_t slot,
                                     std::int32_t code) const {
  if (slot < names_.size() && code >= 0 &&
      static_cast<std::size_t>(code) < names_[slot].size()) {
    return names_[slot][code];
  }
  return "#" + std::to_string(code);
}

}  // namespace cfstream
