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

// Metrics, the exhaustive oracle and the sliding-window variant.

#ifndef CFSTREAM_EVAL_H_
#define CFSTREAM_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cfstream/domain.h"
#include "cfstream/session.h"
#include "cfstream/similarity.h"

namespace cfstream {

// Mean over members of d_con(e, q) + d_cat(e, q). Throws kEmptyExplanation.
double TransportCost(const Explanation& explanation, const Item& query,
                     const SimilarityMeasure& sim);

struct ViolationCounts {
  // Sum over arrivals of labels above beta_l on the maintained set.
  std::uint64_t stream_upper = 0;
  // Labels outside [alpha_l, beta_l] at the end, plus one if |S| > k.
  int final_total = 0;
  std::uint64_t total() const {
    return stream_upper + static_cast<std::uint64_t>(final_total);
  }
};

ViolationCounts CountViolations(const RunStats& stats,
                                const Explanation& explanation,
                                const ConstraintSpec& spec);

// f of the explanation's members recomputed from scratch in id order, the
// same order the oracle scores in.
double ScoreMembers(const Explanation& explanation, const Item& query,
                    const SimilarityMeasure& sim, const UtilityConfig& config);

inline constexpr std::size_t kOracleMaxItems = 15;
inline constexpr int kOracleMaxK = 5;

struct OracleResult {
  std::vector<ItemId> ids;  // ascending
  Explanation explanation;
  double value = 0.0;
  std::uint64_t feasible_sets = 0;
};

// Exhaustive maximum of f over the solution space. Coverage is frozen at
// arrival in the given stream order. Ties go to the lexicographically
// smallest id set. Throws kInstanceTooLarge above 15 items or k > 5 and
// kInfeasibleStream when no subset is feasible.
OracleResult BruteForceOracle(std::span<const Item> items, const Item& query,
                              const SimilarityMeasure& sim,
                              const ConstraintSpec& spec,
                              const UtilityConfig& config);

struct WindowOptions {
  std::size_t window = 1;
  int checkpoints = 20;
  // Pools up to this size are searched exhaustively, larger ones greedily.
  std::size_t exhaustive_limit = 15;
};

struct WindowTrajectory {
  std::vector<double> fraction;  // share of the stream processed
  std::vector<double> utility;   // f of the retained set
};

// Batch reselection: every `window` arrivals, S becomes the best extensible
// subset of S + batch with |S| <= k. f(S) is emitted at evenly spaced
// checkpoints.
WindowTrajectory SlidingWindowRun(std::span<const Item> items,
                                  const Item& query,
                                  const SimilarityMeasure& sim,
                                  const ConstraintSpec& spec,
                                  const UtilityConfig& config,
                                  const WindowOptions& options = {});

}  // namespace cfstream

#endif  // CFSTREAM_EVAL_H_
