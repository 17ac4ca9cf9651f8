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

#include "cfstream/session.h"

#include <algorithm>
#include <chrono>
#include <string>
#include <utility>

#include "cfstream/error.h"
#include "cfstream/utility.h"

namespace cfstream {
namespace {

std::uint64_t NanosSince(std::chrono::steady_clock::time_point start) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now() - start)
          .count());
}

}  // namespace

Explanation AssembleExplanation(
    std::span<const MemberRecord> members,
    const std::unordered_map<ItemId, double>& weights,
    const UtilityBreakdown& value, const ConstraintSpec& spec) {
  Explanation out;
  out.members.reserve(members.size());
  for (const MemberRecord& m : members) {
    auto it = weights.find(m.item.id);
    out.members.push_back({m.item, it == weights.end() ? 0.0 : it->second,
                           m.sim_to_query, m.coverage});
  }
  std::sort(out.members.begin(), out.members.end(),
            [](const ExplanationMember& a, const ExplanationMember& b) {
              return a.item.id < b.item.id;
            });
  out.breakdown = value;
  out.utility = value.total;
  out.label_counts = CountLabels(out.members, spec.label_count());
  out.feasible =
      SatisfiesConstraints(out.label_counts, out.members.size(), spec);
  return out;
}

ConstraintSpec EngineSpec(const ConstraintSpec& spec,
                          const SessionOptions& options) {
  ConstraintSpec engine = spec;
  if (options.drop_lower_bounds) {
    std::fill(engine.lower.begin(), engine.lower.end(), 0);
  }
  if (options.drop_upper_bounds) {
    std::fill(engine.upper.begin(), engine.upper.end(), engine.k);
  }
  return engine;
}

QuerySession::QuerySession(SimilarityMeasure sim, Item query,
                           ConstraintSpec spec, UtilityConfig config,
                           SessionOptions options)
    : sim_(std::move(sim)),
      spec_(std::move(spec)),
      config_(std::move(config)),
      options_(options),
      lambda_(config_.swap_threshold.value_or(1.0)),
      state_((ValidateConstraints(spec_, sim_.schema()),
              EngineSpec(spec_, options_))),
      index_(state_.spec()),
      coverage_(sim_, sim_.schema().label_count(), config_),
      preserve_(spec_.lower.size()),
      arrivals_(spec_.lower.size(), 0) {
  ValidateUtilityConfig(config_);
  config_.swap_threshold = lambda_;
  ValidateItem(query, sim_.schema());
  evaluator_ = MakeEvaluator(options_.use_sketch, sim_, std::move(query),
                             config_);
  stats_.swap_threshold = lambda_;
}

QuerySession::QuerySession(const QuerySession& other)
    : sim_(other.sim_),
      spec_(other.spec_),
      config_(other.config_),
      options_(other.options_),
      lambda_(other.lambda_),
      state_(other.state_),
      index_(other.index_),
      evaluator_(other.evaluator_->Clone()),
      coverage_(other.coverage_),
      slot_of_(other.slot_of_),
      weights_(other.weights_),
      preserve_(other.preserve_),
      arrivals_(other.arrivals_),
      stats_(other.stats_) {}

bool QuerySession::RecountExtensible(Label label) const {
  std::vector<int> counts(spec_.lower.size(), 0);
  for (const MemberRecord& m : evaluator_->members()) {
    ++counts[LabelIndex(m.item.label)];
  }
  ++counts[LabelIndex(label)];
  return ExtensibilityState::IsExtensible(counts, state_.spec());
}

std::optional<IndexEntry> QuerySession::FindEvictionCandidate(
    Label arriving) const {
  if (options_.use_sketch) return index_.MinGoodMember(state_, arriving);
  std::vector<int> counts(spec_.lower.size(), 0);
  for (const MemberRecord& m : evaluator_->members()) {
    ++counts[LabelIndex(m.item.label)];
  }
  ++counts[LabelIndex(arriving)];
  std::optional<IndexEntry> best;
  for (const MemberRecord& m : evaluator_->members()) {
    const std::size_t l = LabelIndex(m.item.label);
    --counts[l];
    const bool good = ExtensibilityState::IsExtensible(counts, state_.spec());
    ++counts[l];
    if (!good) continue;
    const double w = weights_.at(m.item.id);
    if (!best || w < best->weight ||
        (w == best->weight && m.item.id < best->id)) {
      best = IndexEntry{m.item.id, w, m.item.label};
    }
  }
  return best;
}

int QuerySession::CountUpperViolations() const {
  int violations = 0;
  std::span<const int> counts = state_.counts();
  for (std::size_t l = 0; l < counts.size(); ++l) {
    if (counts[l] > spec_.upper[l]) ++violations;
  }
  return violations;
}

ArrivalOutcome QuerySession::ProcessItem(const Item& item) {
  ValidateItem(item, sim_.schema());
  const auto start = std::chrono::steady_clock::now();

  coverage_.Observe(item);
  const double cov = coverage_.Coverage(item);
  const double before = evaluator_->Current().total;
  Candidate candidate = evaluator_->Evaluate(item, cov);
  const double w = candidate.value.total - before;
  const Label label = item.label;

  ArrivalOutcome outcome;
  outcome.weight = w;
  const bool extensible = options_.use_sketch ? state_.CanExtend(label)
                                              : RecountExtensible(label);
  if (extensible) {
    slot_of_[item.id] = evaluator_->size();
    evaluator_->Append(std::move(candidate));
    state_.ApplyInsert(label);
    index_.Insert(item.id, w, label);
    weights_[item.id] = w;
    outcome.kind = ArrivalKind::kAccepted;
    ++stats_.accepted;
  } else {
    std::optional<IndexEntry> victim = FindEvictionCandidate(label);
    if (victim && w >= (1.0 + lambda_) * victim->weight) {
      const std::size_t slot = slot_of_.at(victim->id);
      evaluator_->Replace(slot, std::move(candidate));
      state_.ApplyEvict(victim->label);
      state_.ApplyInsert(label);
      index_.Evict(victim->id);
      index_.Insert(item.id, w, label);
      slot_of_.erase(victim->id);
      slot_of_[item.id] = slot;
      weights_.erase(victim->id);
      weights_[item.id] = w;
      outcome.kind = ArrivalKind::kSwapped;
      outcome.evicted = victim->id;
      ++stats_.swaps;
    } else {
      outcome.kind = ArrivalKind::kRejected;
      ++stats_.rejects;
    }
  }

  const std::size_t l = LabelIndex(label);
  ++arrivals_[l];
  if (preserve_[l].size() <
      static_cast<std::size_t>(state_.spec().lower[l])) {
    preserve_[l].push_back({item, cov, w});
    outcome.preserved = true;
  }

  const int upper = CountUpperViolations();
  stats_.stream_upper += static_cast<std::uint64_t>(upper);
  if (options_.record_trace) stats_.violation_trace.push_back(upper);
  ++stats_.items;

  if (options_.audit) {
    if (!state_.Audit()) {
      throw Error(ErrorCode::kInternalInconsistency,
                  "extensibility state audit failed after item " +
                      std::to_string(item.id));
    }
    index_.Audit();
  }

  const std::uint64_t nanos = NanosSince(start);
  stats_.total_nanos += nanos;
  if (options_.record_timings) stats_.per_item_nanos.push_back(nanos);
  return outcome;
}

Explanation QuerySession::Augment(bool strict) const {
  std::unique_ptr<UtilityEvaluator> eval = evaluator_->Clone();
  std::unordered_map<ItemId, double> weights = weights_;
  std::vector<int> counts(state_.counts().begin(), state_.counts().end());
  for (std::size_t l = 0; l < counts.size(); ++l) {
    int need = state_.spec().lower[l] - counts[l];
    for (const Preserved& p : preserve_[l]) {
      if (need <= 0) break;
      if (weights.count(p.item.id) != 0) continue;
      eval->Append(eval->Evaluate(p.item, p.coverage));
      weights[p.item.id] = p.weight;
      ++counts[l];
      --need;
    }
    if (need > 0 && strict) {
      throw Error(ErrorCode::kInfeasibleStream,
                  "label " + std::to_string(l + 1) + " had " +
                      std::to_string(arrivals_[l]) +
                      " arrivals, fewer than its lower bound " +
                      std::to_string(state_.spec().lower[l]));
    }
  }
  return AssembleExplanation(eval->members(), weights, eval->Current(), spec_);
}

Explanation QuerySession::Snapshot() const { return Augment(false); }

Explanation QuerySession::Finalize() {
  Explanation out = Augment(true);
  stats_.final_violations = CountConstraintViolations(
      out.label_counts, out.members.size(), spec_);
  return out;
}

void QuerySession::Reconfigure(const UtilityConfig& config) {
  ValidateUtilityConfig(config);
  config_ = config;
  lambda_ = config_.swap_threshold.value_or(lambda_);
  config_.swap_threshold = lambda_;
  stats_.swap_threshold = lambda_;
  evaluator_->Reconfigure(config_);
}

QuerySession QuerySession::Fork(const ConstraintSpec& spec) const {
  QuerySession next(sim_, evaluator_->query(), spec, config_, options_);
  next.coverage_ = coverage_;
  next.arrivals_ = arrivals_;
  next.stats_.curvature = stats_.curvature;

  std::vector<const MemberRecord*> order;
  for (const MemberRecord& m : evaluator_->members()) order.push_back(&m);
  std::sort(order.begin(), order.end(),
            [this](const MemberRecord* a, const MemberRecord* b) {
              const double wa = weights_.at(a->item.id);
              const double wb = weights_.at(b->item.id);
              if (wa != wb) return wa > wb;
              return a->item.id < b->item.id;
            });
  for (const MemberRecord* m : order) {
    const Label label = m->item.label;
    if (!next.state_.CanExtend(label)) continue;
    const double w = weights_.at(m->item.id);
    next.slot_of_[m->item.id] = next.evaluator_->size();
    next.evaluator_->Append(next.evaluator_->Evaluate(m->item, m->coverage));
    next.state_.ApplyInsert(label);
    next.index_.Insert(m->item.id, w, label);
    next.weights_[m->item.id] = w;
  }
  for (std::size_t l = 0; l < next.preserve_.size(); ++l) {
    const std::size_t cap =
        static_cast<std::size_t>(next.state_.spec().lower[l]);
    for (const Preserved& p : preserve_[l]) {
      if (next.preserve_[l].size() >= cap) break;
      next.preserve_[l].push_back(p);
    }
  }
  return next;
}

RunStats QuerySession::stats() const {
  RunStats out = stats_;
  out.utility_calls = evaluator_->utility_calls();
  return out;
}

SwapThresholdChoice AutoSwapThreshold(std::span<const Item> warmup,
                                      const Item& query,
                                      const SimilarityMeasure& sim,
                                      int label_count,
                                      const UtilityConfig& config) {
  SwapThresholdChoice choice;
  if (warmup.empty()) return choice;
  std::vector<double> coverage =
      ComputeArrivalCoverage(warmup, sim, label_count, config);
  CurvatureOptions options;
  options.seed = config.seed;
  try {
    double c = EstimateCurvature(warmup, coverage, query, sim, config, options);
    choice.curvature = c;
    choice.lambda = SwapThresholdForCurvature(c);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateSample) throw;
  }
  return choice;
}

RunResult RunStream(ItemSource& source, const SimilarityMeasure& sim,
                    const Item& query, const ConstraintSpec& spec,
                    const UtilityConfig& config,
                    const SessionOptions& options) {
  UtilityConfig cfg = config;
  std::vector<Item> buffer;
  std::optional<double> curvature;
  if (!cfg.swap_threshold) {
    while (buffer.size() < kWarmupItems) {
      std::optional<Item> next = source.Next();
      if (!next) break;
      buffer.push_back(std::move(*next));
    }
    SwapThresholdChoice choice = AutoSwapThreshold(
        buffer, query, sim, sim.schema().label_count(), cfg);
    cfg.swap_threshold = choice.lambda;
    curvature = choice.curvature;
  }
  QuerySession session(sim, query, spec, cfg, options);
  if (curvature) session.set_curvature(*curvature);
  for (const Item& item : buffer) session.ProcessItem(item);
  buffer.clear();
  buffer.shrink_to_fit();
  while (std::optional<Item> next = source.Next()) session.ProcessItem(*next);
  RunResult result;
  result.explanation = session.Finalize();
  result.stats = session.stats();
  return result;
}

RunResult RunStream(std::span<const Item> items, const SimilarityMeasure& sim,
                    const Item& query, const ConstraintSpec& spec,
                    const UtilityConfig& config,
                    const SessionOptions& options) {
  VectorItemSource source(items);
  return RunStream(source, sim, query, spec, config, options);
}

Explanation MakeExplanation(std::span<const MemberRecord> members,
                            std::span<const double> weights,
                            const Item& query, const SimilarityMeasure& sim,
                            const ConstraintSpec& spec,
                            const UtilityConfig& config) {
  std::vector<Item> items;
  std::vector<double> coverage;
  std::unordered_map<ItemId, double> weight_of;
  for (std::size_t i = 0; i < members.size(); ++i) {
    items.push_back(members[i].item);
    coverage.push_back(members[i].coverage);
    weight_of[members[i].item.id] = i < weights.size() ? weights[i] : 0.0;
  }
  UtilityBreakdown value = EvaluateUtility(items, coverage, query, sim, config);
  std::vector<MemberRecord> records(members.begin(), members.end());
  for (MemberRecord& r : records) {
    r.sim_to_query = sim.Similarity(r.item, query);
  }
  return AssembleExplanation(records, weight_of, value, spec);
}

}  // namespace cfstream
