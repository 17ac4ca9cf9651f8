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

// Comparison algorithms. All of them score with the same utility (coverage
// frozen at arrival, see ComputeArrivalCoverage) so their values are
// directly comparable with the streaming session.

#ifndef CFSTREAM_BASELINES_H_
#define CFSTREAM_BASELINES_H_

#include <cstdint>
#include <span>

#include "cfstream/domain.h"
#include "cfstream/session.h"
#include "cfstream/similarity.h"

namespace cfstream {

// Multi-pass greedy: repeatedly adds the extensible item with the largest
// marginal gain (ties to the smaller id) until |S| = k or nothing fits, then
// fills missing lower bounds with the best remaining items of each label.
// Throws kInfeasibleStream when a label has fewer than alpha_l items.
RunResult OfflineGreedy(std::span<const Item> items, const Item& query,
                        const SimilarityMeasure& sim,
                        const ConstraintSpec& spec,
                        const UtilityConfig& config);

// Round-robin over labels 1..L taking the most similar unused item of each
// label, skipping labels that cannot be extended. Stops at k items or when a
// whole round adds nothing. `config` only scores the result.
RunResult KnnRotation(std::span<const Item> items, const Item& query,
                      const SimilarityMeasure& sim, const ConstraintSpec& spec,
                      const UtilityConfig& config);

// Inserts while the set stays extensible; otherwise, with probability 1/2,
// replaces a uniformly random member of S. Preserve sets are kept as in the
// streaming session and top up lower bounds at the end while |S| < k.
RunResult RandomSwap(std::span<const Item> items, const Item& query,
                     const SimilarityMeasure& sim, const ConstraintSpec& spec,
                     const UtilityConfig& config, std::uint64_t seed);

// The streaming session on the matroid {|S| <= k, c_l <= beta_l} with no
// preserve sets or augmentation.
RunResult RelaxedStreaming(std::span<const Item> items, const Item& query,
                           const SimilarityMeasure& sim,
                           const ConstraintSpec& spec,
                           const UtilityConfig& config,
                           const SessionOptions& options = {});

struct SieveOptions {
  double epsilon = 0.1;
};

// Threshold sieves (1 + eps)^i in [m, 2 k m], m the running maximum
// singleton value. Sieve S_v admits e when |S_v| < k and
// f(e | S_v) >= (v / 2 - f(S_v)) / (k - |S_v|). Returns the best sieve.
// Labels are ignored; `spec` is used for reporting only.
RunResult SieveNoConstraint(std::span<const Item> items, const Item& query,
                            const SimilarityMeasure& sim,
                            const ConstraintSpec& spec,
                            const UtilityConfig& config,
                            const SieveOptions& options = {});

}  // namespace cfstream

#endif  // CFSTREAM_BASELINES_H_
