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

#ifndef CFSTREAM_COVERAGE_H_
#define CFSTREAM_COVERAGE_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cfstream/domain.h"
#include "cfstream/similarity.h"

namespace cfstream {

// Clustering-based coverage of an item over all labels:
//
//   cov(e) = sum_l decay^(1 - simHat(l, e))
//
// where simHat(l, e) is the best similarity between e and the items of
// label l held in a fixed-size uniform reservoir of the stream seen so far.
// An empty reservoir contributes decay^1.
class CoverageModel {
 public:
  CoverageModel(SimilarityMeasure similarity, int label_count, double decay,
                int reservoir_size, std::uint64_t seed);
  CoverageModel(SimilarityMeasure similarity, int label_count,
                const UtilityConfig& config);

  // Offers an arriving item to its label's reservoir (reservoir sampling).
  void Observe(const Item& item);

  double Coverage(const Item& item) const;
  double MaxSimilarity(Label label, const Item& item) const;

  const std::vector<Item>& reservoir(Label label) const {
    return reservoirs_[LabelIndex(label)];
  }
  std::uint64_t seen(Label label) const { return seen_[LabelIndex(label)]; }
  int label_count() const { return static_cast<int>(reservoirs_.size()); }
  double decay() const { return decay_; }

 private:
  SimilarityMeasure similarity_;
  double decay_;
  std::size_t capacity_;
  std::vector<std::vector<Item>> reservoirs_;
  std::vector<std::uint64_t> seen_;
  std::mt19937_64 rng_;
};

// Coverage of every item in stream order, each frozen at its own arrival
// (observe, then evaluate). Equals what a streaming session computes for the
// same stream and config, so offline algorithms can score sets with the same
// utility function.
std::vector<double> ComputeArrivalCoverage(std::span<const Item> items,
                                           const SimilarityMeasure& similarity,
                                           int label_count,
                                           const UtilityConfig& config);

}  // namespace cfstream

#endif  // CFSTREAM_COVERAGE_H_
