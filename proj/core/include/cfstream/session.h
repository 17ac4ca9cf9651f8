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

// One-pass swap streaming under the extensibility matroid, with preserve
// sets and lower-bound augmentation at the end of the stream.
//
// Per arrival e of label l:
//   w(e) = f(S + e) - f(S)
//   S + e extensible            -> insert e
//   else e' = min-weight good member;
//        w(e) >= (1 + lambda) w(e') -> swap e' for e
//        otherwise                  -> reject
// Independently, the first alpha_l arrivals of label l are kept in P_l.
// Finalize() tops up every label below alpha_l from P_l.

#ifndef CFSTREAM_SESSION_H_
#define CFSTREAM_SESSION_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "cfstream/coverage.h"
#include "cfstream/domain.h"
#include "cfstream/evaluator.h"
#include "cfstream/matroid.h"
#include "cfstream/similarity.h"

namespace cfstream {

struct SessionOptions {
  // false: from-scratch utilities, recounted extensibility and a linear
  // scan for the eviction candidate.
  bool use_sketch = true;
  // Run the matroid with alpha = 0 and skip preserve sets/augmentation.
  bool drop_lower_bounds = false;
  // Run the matroid with beta_l = k.
  bool drop_upper_bounds = false;
  bool record_timings = false;
  // Per-arrival count of labels above beta_l on the maintained set.
  bool record_trace = false;
  // Audit the matroid state and swap index after every arrival.
  bool audit = false;
};

struct RunStats {
  std::uint64_t items = 0;
  std::uint64_t accepted = 0;
  std::uint64_t swaps = 0;
  std::uint64_t rejects = 0;
  std::uint64_t utility_calls = 0;
  std::uint64_t total_nanos = 0;
  std::vector<std::uint64_t> per_item_nanos;
  std::vector<int> violation_trace;
  // Sum over arrivals of |{l : c_l > beta_l}|.
  std::uint64_t stream_upper = 0;
  // |{l : final count outside [alpha_l, beta_l]}| + [|S| > k].
  int final_violations = 0;
  double swap_threshold = 1.0;
  std::optional<double> curvature;
};

enum class ArrivalKind { kAccepted, kSwapped, kRejected };

struct ArrivalOutcome {
  ArrivalKind kind = ArrivalKind::kRejected;
  double weight = 0.0;
  std::optional<ItemId> evicted;
  bool preserved = false;
};

class QuerySession {
 public:
  // A missing config.swap_threshold is taken as 1.
  QuerySession(SimilarityMeasure sim, Item query, ConstraintSpec spec,
               UtilityConfig config, SessionOptions options = {});

  QuerySession(const QuerySession& other);
  QuerySession& operator=(const QuerySession&) = delete;
  QuerySession(QuerySession&&) noexcept = default;

  ArrivalOutcome ProcessItem(const Item& item);

  // Augmented copy of the current state; never throws on missing labels,
  // the result is flagged infeasible instead.
  Explanation Snapshot() const;
  // Throws kInfeasibleStream when some label had fewer than alpha_l
  // arrivals.
  Explanation Finalize();

  // Switches the utility used for future arrivals and re-derives f for the
  // current members. Stored weights are kept.
  void Reconfigure(const UtilityConfig& config);

  // Successor session under new constraints that continues from the current
  // stream position: current members are re-admitted by weight while
  // extensible and the preserve sets are trimmed to the new alpha.
  QuerySession Fork(const ConstraintSpec& spec) const;

  RunStats stats() const;
  const ConstraintSpec& spec() const { return spec_; }
  const ConstraintSpec& engine_spec() const { return state_.spec(); }
  const UtilityConfig& config() const { return config_; }
  const SessionOptions& options() const { return options_; }
  const Item& query() const { return evaluator_->query(); }
  const SimilarityMeasure& similarity() const { return sim_; }
  double swap_threshold() const { return lambda_; }
  std::size_t size() const { return evaluator_->size(); }
  const ExtensibilityState& state() const { return state_; }
  const SwapIndex& index() const { return index_; }
  const UtilityEvaluator& evaluator() const { return *evaluator_; }
  double weight(ItemId id) const { return weights_.at(id); }

  struct Preserved {
    Item item;
    double coverage = 0.0;
    double weight = 0.0;
  };
  const std::vector<Preserved>& preserved(Label label) const {
    return preserve_[LabelIndex(label)];
  }

  // Mutable statistics hook for drivers (curvature of the warm-up).
  void set_curvature(double curvature) { stats_.curvature = curvature; }

 private:
  std::optional<IndexEntry> FindEvictionCandidate(Label arriving) const;
  bool RecountExtensible(Label label) const;
  int CountUpperViolations() const;
  Explanation Augment(bool strict) const;

  SimilarityMeasure sim_;
  ConstraintSpec spec_;  // reporting constraints
  UtilityConfig config_;
  SessionOptions options_;
  double lambda_ = 1.0;
  ExtensibilityState state_;  // engine constraints
  SwapIndex index_;
  std::unique_ptr<UtilityEvaluator> evaluator_;
  CoverageModel coverage_;
  std::unordered_map<ItemId, std::size_t> slot_of_;
  std::unordered_map<ItemId, double> weights_;
  std::vector<std::vector<Preserved>> preserve_;
  std::vector<std::uint64_t> arrivals_;
  RunStats stats_;
};

// Constraints the matroid actually runs on for the given options.
ConstraintSpec EngineSpec(const ConstraintSpec& spec,
                          const SessionOptions& options);

struct SwapThresholdChoice {
  double lambda = 1.0;
  std::optional<double> curvature;  // empty when the sample is degenerate
};

// Estimates the curvature of f on a warm-up sample and applies the
// selection rule. A degenerate sample yields lambda = 1.
SwapThresholdChoice AutoSwapThreshold(std::span<const Item> warmup,
                                      const Item& query,
                                      const SimilarityMeasure& sim,
                                      int label_count,
                                      const UtilityConfig& config);

inline constexpr std::size_t kWarmupItems = 512;

struct RunResult {
  Explanation explanation;
  RunStats stats;
};

// Drives a session over the whole source and finalizes it. When
// config.swap_threshold is unset, the first min(512, n) items are buffered
// to pick lambda before processing starts.
RunResult RunStream(ItemSource& source, const SimilarityMeasure& sim,
                    const Item& query, const ConstraintSpec& spec,
                    const UtilityConfig& config,
                    const SessionOptions& options = {});
RunResult RunStream(std::span<const Item> items, const SimilarityMeasure& sim,
                    const Item& query, const ConstraintSpec& spec,
                    const UtilityConfig& config,
                    const SessionOptions& options = {});

// Members sorted by id with their weights, label counts and feasibility
// against `spec`. `value` is taken as the utility of the members.
Explanation AssembleExplanation(
    std::span<const MemberRecord> members,
    const std::unordered_map<ItemId, double>& weights,
    const UtilityBreakdown& value, const ConstraintSpec& spec);

// Builds an Explanation for a fixed member list, scoring from scratch in the
// given order.
Explanation MakeExplanation(std::span<const MemberRecord> members,
                            std::span<const double> weights,
                            const Item& query, const SimilarityMeasure& sim,
                            const ConstraintSpec& spec,
                            const UtilityConfig& config);

}  // namespace cfstream

#endif  // CFSTREAM_SESSION_H_
