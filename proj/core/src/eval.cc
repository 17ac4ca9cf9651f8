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

#include "cfstream/eval.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>

#include "cfstream/coverage.h"
#include "cfstream/error.h"
#include "cfstream/evaluator.h"
#include "cfstream/matroid.h"
#include "cfstream/utility.h"

namespace cfstream {

double TransportCost(const Explanation& explanation, const Item& query,
                     const SimilarityMeasure& sim) {
  if (explanation.members.empty()) {
    throw Error(ErrorCode::kEmptyExplanation,
                "transport cost of an empty explanation");
  }
  double total = 0.0;
  for (const ExplanationMember& m : explanation.members) {
    TransportComponents t = sim.Transport(m.item, query);
    total += t.continuous + t.categorical;
  }
  return total / static_cast<double>(explanation.members.size());
}

ViolationCounts CountViolations(const RunStats& stats,
                                const Explanation& explanation,
                                const ConstraintSpec& spec) {
  ViolationCounts out;
  out.stream_upper = stats.stream_upper;
  std::vector<int> counts =
      CountLabels(explanation.members, spec.label_count());
  out.final_total =
      CountConstraintViolations(counts, explanation.members.size(), spec);
  return out;
}

double ScoreMembers(const Explanation& explanation, const Item& query,
                    const SimilarityMeasure& sim,
                    const UtilityConfig& config) {
  std::vector<const ExplanationMember*> sorted;
  for (const ExplanationMember& m : explanation.members) sorted.push_back(&m);
  std::sort(sorted.begin(), sorted.end(),
            [](const ExplanationMember* a, const ExplanationMember* b) {
              return a->item.id < b->item.id;
            });
  std::vector<Item> items;
  std::vector<double> coverage;
  for (const ExplanationMember* m : sorted) {
    items.push_back(m->item);
    coverage.push_back(m->coverage);
  }
  return EvaluateUtility(items, coverage, query, sim, config).total;
}

namespace {

// Pool of candidate members with all similarities precomputed, so that a
// subset can be scored without touching the features again.
class SubsetScorer {
 public:
  SubsetScorer(std::vector<MemberRecord> pool, const Item& query,
               const SimilarityMeasure& sim, const UtilityConfig& config)
      : pool_(std::move(pool)), config_(config) {
    std::vector<Item> items;
    for (const MemberRecord& m : pool_) items.push_back(m.item);
    all_ = ComputeMemberSimilarities(items, query, sim, true);
  }

  UtilityBreakdown Score(std::span<const std::size_t> subset) const {
    const std::size_t m = subset.size();
    MemberSimilarities sims;
    sims.to_query.resize(m);
    sims.pairwise.resize(m * m);
    std::vector<ItemId> ids(m);
    std::vector<double> coverage(m);
    for (std::size_t i = 0; i < m; ++i) {
      sims.to_query[i] = all_.to_query[subset[i]];
      ids[i] = pool_[subset[i]].item.id;
      coverage[i] = pool_[subset[i]].coverage;
      for (std::size_t j = 0; j < m; ++j) {
        sims.pairwise[i * m + j] = all_.pair(subset[i], subset[j]);
      }
    }
    return EvaluateUtility(sims, ids, coverage, config_);
  }

  const MemberRecord& record(std::size_t i) const { return pool_[i]; }
  std::size_t size() const { return pool_.size(); }

 private:
  std::vector<MemberRecord> pool_;
  UtilityConfig config_;
  MemberSimilarities all_;
};

// Depth-first enumeration in lexicographic order of index sets, pruned on
// the upper bounds. Strict improvement keeps the first maximizer.
struct Enumeration {
  const SubsetScorer& scorer;
  const ConstraintSpec& spec;
  bool require_feasible;  // full solution space vs extensible sets
  std::vector<std::size_t> current;
  std::vector<int> counts;
  std::optional<std::vector<std::size_t>> best;
  double best_value = 0.0;
  std::uint64_t visited = 0;

  void Consider() {
    const bool ok =
        require_feasible
            ? SatisfiesConstraints(counts, current.size(), spec)
            : ExtensibilityState::IsExtensible(counts, spec);
    if (!ok) return;
    ++visited;
    const double value = scorer.Score(current).total;
    if (!best || value > best_value) {
      best = current;
      best_value = value;
    }
  }

  void Run(std::size_t from) {
    Consider();
    if (static_cast<int>(current.size()) >= spec.k) return;
    for (std::size_t i = from; i < scorer.size(); ++i) {
      const std::size_t l = LabelIndex(scorer.record(i).item.label);
      if (counts[l] >= spec.upper[l]) continue;
      current.push_back(i);
      ++counts[l];
      Run(i + 1);
      --counts[l];
      current.pop_back();
    }
  }
};

}  // namespace

OracleResult BruteForceOracle(std::span<const Item> items, const Item& query,
                              const SimilarityMeasure& sim,
                              const ConstraintSpec& spec,
                              const UtilityConfig& config) {
  if (items.size() > kOracleMaxItems || spec.k > kOracleMaxK) {
    throw Error(ErrorCode::kInstanceTooLarge,
                "oracle is limited to " + std::to_string(kOracleMaxItems) +
                    " items and k <= " + std::to_string(kOracleMaxK) +
                    ", got " + std::to_string(items.size()) +
                    " items and k = " + std::to_string(spec.k));
  }
  ValidateConstraints(spec, sim.schema());
  std::vector<double> coverage = ComputeArrivalCoverage(
      items, sim, sim.schema().label_count(), config);
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&items](std::size_t a, std::size_t b) {
    return items[a].id < items[b].id;
  });
  std::vector<MemberRecord> pool;
  for (std::size_t i : order) {
    pool.push_back({items[i], sim.Similarity(items[i], query), coverage[i]});
  }
  SubsetScorer scorer(pool, query, sim, config);
  Enumeration search{scorer, spec, true, {},
                     std::vector<int>(spec.lower.size(), 0), std::nullopt};
  search.Run(0);
  if (!search.best) {
    throw Error(ErrorCode::kInfeasibleStream,
                "no subset of the items satisfies the constraints");
  }

  OracleResult out;
  out.value = search.best_value;
  out.feasible_sets = search.visited;
  std::vector<MemberRecord> members;
  std::unordered_map<ItemId, double> weights;
  for (std::size_t i : *search.best) {
    members.push_back(scorer.record(i));
    out.ids.push_back(scorer.record(i).item.id);
  }
  out.explanation = AssembleExplanation(members, weights,
                                        scorer.Score(*search.best), spec);
  return out;
}

namespace {

std::vector<std::size_t> GreedySelect(const SubsetScorer& scorer,
                                      const ConstraintSpec& spec) {
  std::vector<std::size_t> chosen;
  std::vector<bool> used(scorer.size(), false);
  ExtensibilityState state(spec);
  double current = 0.0;
  while (static_cast<int>(chosen.size()) < spec.k) {
    std::optional<std::size_t> best;
    double best_value = 0.0;
    for (std::size_t i = 0; i < scorer.size(); ++i) {
      if (used[i] || !state.CanExtend(scorer.record(i).item.label)) continue;
      chosen.push_back(i);
      const double value = scorer.Score(chosen).total;
      chosen.pop_back();
      if (!best || value > best_value) {
        best = i;
        best_value = value;
      }
    }
    if (!best || !(best_value > current)) break;
    used[*best] = true;
    state.ApplyInsert(scorer.record(*best).item.label);
    chosen.push_back(*best);
    current = best_value;
  }
  return chosen;
}

}  // namespace

WindowTrajectory SlidingWindowRun(std::span<const Item> items,
                                  const Item& query,
                                  const SimilarityMeasure& sim,
                                  const ConstraintSpec& spec,
                                  const UtilityConfig& config,
                                  const WindowOptions& options) {
  if (options.window < 1 || options.checkpoints < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "window and checkpoint count must be >= 1");
  }
  ValidateConstraints(spec, sim.schema());
  const std::size_t n = items.size();
  std::vector<double> coverage =
      ComputeArrivalCoverage(items, sim, sim.schema().label_count(), config);

  std::vector<MemberRecord> retained;
  std::vector<std::size_t> batch;
  double retained_value = 0.0;
  WindowTrajectory out;
  int next_checkpoint = 1;
  auto checkpoint_position = [&](int j) {
    return static_cast<std::size_t>(
        std::ceil(static_cast<double>(n) * j / options.checkpoints));
  };

  for (std::size_t i = 0; i < n; ++i) {
    batch.push_back(i);
    if (batch.size() == options.window || i + 1 == n) {
      std::vector<MemberRecord> pool = retained;
      for (std::size_t b : batch) {
        pool.push_back(
            {items[b], sim.Similarity(items[b], query), coverage[b]});
      }
      batch.clear();
      SubsetScorer scorer(std::move(pool), query, sim, config);
      std::vector<std::size_t> chosen;
      if (scorer.size() <= options.exhaustive_limit) {
        Enumeration search{scorer,
                           spec,
                           false,
                           {},
                           std::vector<int>(spec.lower.size(), 0),
                           std::nullopt};
        search.Run(0);
        if (search.best) chosen = *search.best;
      } else {
        chosen = GreedySelect(scorer, spec);
      }
      retained.clear();
      for (std::size_t c : chosen) retained.push_back(scorer.record(c));
      retained_value = chosen.empty() ? 0.0 : scorer.Score(chosen).total;
    }
    while (next_checkpoint <= options.checkpoints &&
           checkpoint_position(next_checkpoint) <= i + 1) {
      out.fraction.push_back(static_cast<double>(next_checkpoint) /
                             options.checkpoints);
      out.utility.push_back(retained_value);
      ++next_checkpoint;
    }
  }
  while (next_checkpoint <= options.checkpoints) {
    out.fraction.push_back(static_cast<double>(next_checkpoint) /
                           options.checkpoints);
    out.utility.push_back(retained_value);
    ++next_checkpoint;
  }
  return out;
}

}  // namespace cfstream
