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

#include <algorithm>
#include <cmath>
#include <utility>

#include "cfstream/error.h"

namespace cfstream {

SimilarityMeasure::SimilarityMeasure(std::shared_ptr<const Schema> schema)
    : SimilarityMeasure(schema,
                        std::vector<double>(schema->features().size(), 1.0)) {}

SimilarityMeasure::SimilarityMeasure(std::shared_ptr<const Schema> schema,
                                     std::vector<double> weights)
    : schema_(std::move(schema)) {
  const Schema& s = *schema_;
  if (weights.size() != s.features().size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "one similarity weight per feature is required");
  }
  double weight_sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "similarity weights must be finite and non-negative");
    }
    weight_sum += w;
  }
  if (!(weight_sum > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "at least one similarity weight must be positive");
  }

  min_.resize(s.continuous_count());
  max_.resize(s.continuous_count());
  inv_range_.resize(s.continuous_count());
  cont_weight_.resize(s.continuous_count());
  cat_weight_.resize(s.categorical_count());
  for (std::size_t i = 0; i < s.features().size(); ++i) {
    const FeatureSpec& f = s.features()[i];
    std::size_t slot = s.slot(i);
    if (f.kind == FeatureKind::kContinuous) {
      min_[slot] = f.min;
      max_[slot] = f.max;
      inv_range_[slot] = f.max > f.min ? 1.0 / (f.max - f.min) : 0.0;
      cont_weight_[slot] = weights[i];
    } else {
      cat_weight_[slot] = weights[i];
    }
  }
  // Summed in the order Similarity() accumulates, so sim(e, e) is exactly 1.
  for (double w : cont_weight_) weight_sum_ += w;
  for (double w : cat_weight_) weight_sum_ += w;
}

void SimilarityMeasure::CheckLayout(const Item& a, const Item& b) const {
  const std::size_t nc = min_.size();
  const std::size_t nk = cat_weight_.size();
  if (a.continuous.size() != nc || b.continuous.size() != nc ||
      a.categorical.size() != nk || b.categorical.size() != nk) {
    throw Error(ErrorCode::kSchemaMismatch,
                "items do not match the similarity schema");
  }
}

double SimilarityMeasure::Normalize(std::size_t slot, double value) const {
  double clamped = std::clamp(value, min_[slot], max_[slot]);
  return (clamped - min_[slot]) * inv_range_[slot];
}

double SimilarityMeasure::Similarity(const Item& a, const Item& b) const {
  CheckLayout(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < min_.size(); ++i) {
    double diff = std::abs(Normalize(i, a.continuous[i]) -
                           Normalize(i, b.continuous[i]));
    acc += cont_weight_[i] * (1.0 - std::min(diff, 1.0));
  }
  for (std::size_t i = 0; i < cat_weight_.size(); ++i) {
    if (a.categorical[i] == b.categorical[i]) acc += cat_weight_[i];
  }
  return std::clamp(acc / weight_sum_, 0.0, 1.0);
}

TransportComponents SimilarityMeasure::Transport(const Item& e,
                                                 const Item& q) const {
  CheckLayout(e, q);
  TransportComponents out;
  for (std::size_t i = 0; i < min_.size(); ++i) {
    out.continuous +=
        std::abs(Normalize(i, e.continuous[i]) - Normalize(i, q.continuous[i]));
  }
  for (std::size_t i = 0; i < cat_weight_.size(); ++i) {
    if (e.categorical[i] != q.categorical[i]) out.categorical += 1.0;
  }
  return out;
}

}  // namespace cfstream
