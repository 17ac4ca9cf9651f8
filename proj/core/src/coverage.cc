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

#include "cfstream/coverage.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cfstream/error.h"
#include "cfstream/random.h"

namespace cfstream {

CoverageModel::CoverageModel(SimilarityMeasure similarity, int label_count,
                             double decay, int reservoir_size,
                             std::uint64_t seed)
    : similarity_(std::move(similarity)),
      decay_(decay),
      capacity_(static_cast<std::size_t>(std::max(reservoir_size, 1))),
      reservoirs_(static_cast<std::size_t>(label_count)),
      seen_(static_cast<std::size_t>(label_count), 0),
      rng_(DeriveSeed(seed, kReservoirStream)) {
  if (label_count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "coverage needs >= 1 label");
  }
}

CoverageModel::CoverageModel(SimilarityMeasure similarity, int label_count,
                             const UtilityConfig& config)
    : CoverageModel(std::move(similarity), label_count, config.decay,
                    config.reservoir_size, config.seed) {}

void CoverageModel::Observe(const Item& item) {
  if (item.label < 1 || item.label > label_count()) {
    throw Error(ErrorCode::kUnknownLabel, "coverage: label out of range");
  }
  const std::size_t l = LabelIndex(item.label);
  std::uint64_t n = ++seen_[l];
  std::vector<Item>& reservoir = reservoirs_[l];
  if (reservoir.size() < capacity_) {
    reservoir.push_back(item);
    return;
  }
  std::uint64_t j = UniformIndex(rng_, n);
  if (j < capacity_) reservoir[j] = item;
}

double CoverageModel::MaxSimilarity(Label label, const Item& item) const {
  double best = 0.0;
  for (const Item& other : reservoirs_[LabelIndex(label)]) {
    best = std::max(best, similarity_.Similarity(other, item));
    if (best >= 1.0) break;
  }
  return best;
}

double CoverageModel::Coverage(const Item& item) const {
  double total = 0.0;
  for (int l = 1; l <= label_count(); ++l) {
    total += std::pow(decay_, 1.0 - MaxSimilarity(l, item));
  }
  return total;
}

std::vector<double> ComputeArrivalCoverage(std::span<const Item> items,
                                           const SimilarityMeasure& similarity,
                                           int label_count,
                                           const UtilityConfig& config) {
  CoverageModel model(similarity, label_count, config);
  std::vector<double> out;
  out.reserve(items.size());
  for (const Item& item : items) {
    model.Observe(item);
    out.push_back(model.Coverage(item));
  }
  return out;
}

}  // namespace cfstream
