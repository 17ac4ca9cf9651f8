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

#include "cfstream/baselines.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cfstream/coverage.h"
#include "cfstream/error.h"
#include "cfstream/evaluator.h"
#include "cfstream/matroid.h"
#include "cfstream/random.h"

namespace cfstream {
namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t NanosSince(Clock::time_point start) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() -
                                                           start)
          .count());
}

int UpperViolations(std::span<const int> counts, const ConstraintSpec& spec) {
  int v = 0;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    if (counts[l] > spec.upper[l]) ++v;
  }
  return v;
}

RunResult Finish(UtilityEvaluator& eval,
                 const std::unordered_map<ItemId, double>& weights,
                 const ConstraintSpec& spec, RunStats stats) {
  RunResult result;
  result.explanation =
      AssembleExplanation(eval.members(), weights, eval.Current(), spec);
  stats.utility_calls += eval.utility_calls();
  stats.final_violations =
      CountConstraintViolations(result.explanation.label_counts,
                                result.explanation.members.size(), spec);
  result.stats = std::move(stats);
  return result;
}

}  // namespace

RunResult OfflineGreedy(std::span<const Item> items, const Item& query,
                        const SimilarityMeasure& sim,
                        const ConstraintSpec& spec,
                        const UtilityConfig& config) {
  ValidateConstraints(spec, sim.schema());
  const auto start = Clock::now();
  const int num_labels = sim.schema().label_count();
  std::vector<double> coverage =
      ComputeArrivalCoverage(items, sim, num_labels, config);
  SketchEvaluator eval(sim, query, config);
  ExtensibilityState state(spec);
  std::vector<bool> used(items.size(), false);
  std::unordered_map<ItemId, double> weights;

  while (static_cast<int>(eval.size()) < spec.k) {
    const double before = eval.Current().total;
    std::optional<std::size_t> best;
    double best_gain = 0.0;
    Candidate best_candidate;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (used[i] || !state.CanExtend(items[i].label)) continue;
      Candidate c = eval.Evaluate(items[i], coverage[i]);
      const double gain = c.value.total - before;
      if (!best || gain > best_gain ||
          (gain == best_gain && items[i].id < items[*best].id)) {
        best = i;
        best_gain = gain;
        best_candidate = std::move(c);
      }
    }
    if (!best) break;
    used[*best] = true;
    state.ApplyInsert(items[*best].label);
    weights[items[*best].id] = best_gain;
    eval.Append(std::move(best_candidate));
  }
  // A label still below alpha_l could always be extended, so it ran out of
  // items.
  for (Label l = 1; l <= spec.label_count(); ++l) {
    if (state.count(l) < spec.lower_bound(l)) {
      throw Error(ErrorCode::kInfeasibleStream,
                  "label " + std::to_string(l) + " has fewer than " +
                      std::to_string(spec.lower_bound(l)) + " items");
    }
  }

  RunStats stats;
  stats.items = items.size();
  stats.accepted = eval.size();
  stats.total_nanos = NanosSince(start);
  return Finish(eval, weights, spec, std::move(stats));
}

RunResult KnnRotation(std::span<const Item> items, const Item& query,
                      const SimilarityMeasure& sim, const ConstraintSpec& spec,
                      const UtilityConfig& config) {
  ValidateConstraints(spec, sim.schema());
  const auto start = Clock::now();
  const int num_labels = sim.schema().label_count();
  std::vector<double> coverage =
      ComputeArrivalCoverage(items, sim, num_labels, config);

  struct Ranked {
    double sim;
    std::size_t index;
  };
  std::vector<std::vector<Ranked>> by_label(num_labels);
  for (std::size_t i = 0; i < items.size(); ++i) {
    by_label[LabelIndex(items[i].label)].push_back(
        {sim.Similarity(items[i], query), i});
  }
  for (std::vector<Ranked>& list : by_label) {
    std::sort(list.begin(), list.end(),
              [&items](const Ranked& a, const Ranked& b) {
                if (a.sim != b.sim) return a.sim > b.sim;
                return items[a.index].id < items[b.index].id;
              });
  }

  ExtensibilityState state(spec);
  std::vector<std::size_t> next(num_labels, 0);
  std::vector<MemberRecord> members;
  std::vector<double> weights;
  bool progress = true;
  while (progress && static_cast<int>(members.size()) < spec.k) {
    progress = false;
    for (Label l = 1; l <= num_labels; ++l) {
      if (static_cast<int>(members.size()) >= spec.k) break;
      std::size_t& cursor = next[LabelIndex(l)];
      const std::vector<Ranked>& list = by_label[LabelIndex(l)];
      if (cursor >= list.size() || !state.CanExtend(l)) continue;
      const Ranked& r = list[cursor++];
      state.ApplyInsert(l);
      members.push_back({items[r.index], r.sim, coverage[r.index]});
      weights.push_back(r.sim);
      progress = true;
    }
  }

  RunResult result;
  result.explanation =
      MakeExplanation(members, weights, query, sim, spec, config);
  result.stats.items = items.size();
  result.stats.accepted = members.size();
  result.stats.total_nanos = NanosSince(start);
  result.stats.final_violations =
      CountConstraintViolations(result.explanation.label_counts,
                                result.explanation.members.size(), spec);
  return result;
}

RunResult RandomSwap(std::span<const Item> items, const Item& query,
                     const SimilarityMeasure& sim, const ConstraintSpec& spec,
                     const UtilityConfig& config, std::uint64_t seed) {
  ValidateConstraints(spec, sim.schema());
  const auto start = Clock::now();
  const int num_labels = sim.schema().label_count();
  CoverageModel coverage(sim, num_labels, config);
  SketchEvaluator eval(sim, query, config);
  std::mt19937_64 rng(DeriveSeed(seed, kRandomSwapStream));
  std::vector<int> counts(num_labels, 0);
  std::unordered_map<ItemId, double> weights;
  struct Preserved {
    Item item;
    double coverage;
    double weight;
  };
  std::vector<std::vector<Preserved>> preserve(num_labels);
  RunStats stats;

  for (const Item& item : items) {
    ValidateItem(item, sim.schema());
    coverage.Observe(item);
    const double cov = coverage.Coverage(item);
    const double before = eval.Current().total;
    Candidate c = eval.Evaluate(item, cov);
    const double w = c.value.total - before;
    const std::size_t l = LabelIndex(item.label);

    ++counts[l];
    const bool extensible = ExtensibilityState::IsExtensible(counts, spec);
    --counts[l];
    if (extensible) {
      eval.Append(std::move(c));
      ++counts[l];
      weights[item.id] = w;
      ++stats.accepted;
    } else if (eval.size() > 0 && Uniform01(rng) < 0.5) {
      const std::size_t slot = UniformIndex(rng, eval.size());
      const Item& victim = eval.member(slot).item;
      --counts[LabelIndex(victim.label)];
      weights.erase(victim.id);
      eval.Replace(slot, std::move(c));
      ++counts[l];
      weights[item.id] = w;
      ++stats.swaps;
    } else {
      ++stats.rejects;
    }
    if (preserve[l].size() < static_cast<std::size_t>(spec.lower[l])) {
      preserve[l].push_back({item, cov, w});
    }
    stats.stream_upper +=
        static_cast<std::uint64_t>(UpperViolations(counts, spec));
    ++stats.items;
  }

  for (std::size_t l = 0; l < preserve.size(); ++l) {
    for (const Preserved& p : preserve[l]) {
      if (counts[l] >= spec.lower[l] ||
          static_cast<int>(eval.size()) >= spec.k) {
        break;
      }
      if (weights.count(p.item.id) != 0) continue;
      eval.Append(eval.Evaluate(p.item, p.coverage));
      weights[p.item.id] = p.weight;
      ++counts[l];
    }
  }
  stats.total_nanos = NanosSince(start);
  return Finish(eval, weights, spec, std::move(stats));
}

RunResult RelaxedStreaming(std::span<const Item> items, const Item& query,
                           const SimilarityMeasure& sim,
                           const ConstraintSpec& spec,
                           const UtilityConfig& config,
                           const SessionOptions& options) {
  SessionOptions relaxed = options;
  relaxed.drop_lower_bounds = true;
  return RunStream(items, sim, query, spec, config, relaxed);
}

RunResult SieveNoConstraint(std::span<const Item> items, const Item& query,
                            const SimilarityMeasure& sim,
                            const ConstraintSpec& spec,
                            const UtilityConfig& config,
                            const SieveOptions& options) {
  if (!(options.epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sieve epsilon must be > 0");
  }
  ValidateConstraints(spec, sim.schema());
  const auto start = Clock::now();
  const int num_labels = sim.schema().label_count();
  const int k = spec.k;
  const double log_base = std::log1p(options.epsilon);
  CoverageModel coverage(sim, num_labels, config);
  SketchEvaluator empty(sim, query, config);

  struct Sieve {
    double threshold;
    std::unique_ptr<SketchEvaluator> eval;
    std::unordered_map<ItemId, double> weights;
    std::vector<int> counts;
  };
  std::map<long, Sieve> sieves;
  double max_singleton = 0.0;
  std::uint64_t retired_calls = 0;
  RunStats stats;

  for (const Item& item : items) {
    ValidateItem(item, sim.schema());
    coverage.Observe(item);
    const double cov = coverage.Coverage(item);
    max_singleton =
        std::max(max_singleton, empty.Evaluate(item, cov).value.total);
    ++stats.items;
    if (!(max_singleton > 0.0)) continue;

    const long lo =
        static_cast<long>(std::ceil(std::log(max_singleton) / log_base));
    const long hi = static_cast<long>(
        std::floor(std::log(2.0 * k * max_singleton) / log_base));
    while (!sieves.empty() && sieves.begin()->first < lo) {
      retired_calls += sieves.begin()->second.eval->utility_calls();
      sieves.erase(sieves.begin());
    }
    for (long i = lo; i <= hi; ++i) {
      if (sieves.count(i) != 0) continue;
      sieves.emplace(
          i, Sieve{std::pow(1.0 + options.epsilon, static_cast<double>(i)),
                   std::make_unique<SketchEvaluator>(sim, query, config),
                   {},
                   std::vector<int>(num_labels, 0)});
    }

    const Sieve* best = nullptr;
    double best_value = 0.0;
    for (auto& [exponent, sieve] : sieves) {
      const int size = static_cast<int>(sieve.eval->size());
      if (size < k) {
        const double before = sieve.eval->Current().total;
        Candidate c = sieve.eval->Evaluate(item, cov);
        const double gain = c.value.total - before;
        if (gain >= (sieve.threshold / 2.0 - before) / (k - size)) {
          sieve.eval->Append(std::move(c));
          sieve.weights[item.id] = gain;
          ++sieve.counts[LabelIndex(item.label)];
        }
      }
      const double value = sieve.eval->Current().total;
      if (best == nullptr || value > best_value) {
        best = &sieve;
        best_value = value;
      }
    }
    if (best != nullptr) {
      stats.stream_upper +=
          static_cast<std::uint64_t>(UpperViolations(best->counts, spec));
    }
  }

  stats.utility_calls = retired_calls + empty.utility_calls();
  Sieve* best = nullptr;
  double best_value = 0.0;
  for (auto& [exponent, sieve] : sieves) {
    const double value = sieve.eval->Current().total;
    if (best == nullptr || value > best_value) {
      best = &sieve;
      best_value = value;
    }
    stats.utility_calls += sieve.eval->utility_calls();
  }
  stats.total_nanos = NanosSince(start);
  if (best == nullptr) {
    SketchEvaluator none(sim, query, config);
    return Finish(none, {}, spec, std::move(stats));
  }
  stats.accepted = best->eval->size();
  RunResult result = Finish(*best->eval, best->weights, spec, RunStats{});
  result.stats = std::move(stats);
  result.stats.final_violations = CountConstraintViolations(
      result.explanation.label_counts, result.explanation.members.size(),
      spec);
  return result;
}

}  // namespace cfstream
