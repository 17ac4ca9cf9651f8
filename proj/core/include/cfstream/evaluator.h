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

// Stateful utility evaluation over an evolving member set.
//
// Two interchangeable implementations:
//  - SketchEvaluator caches the aggregates the utilities are built from
//    (sum of query similarities, pairwise similarity rows and their ordered
//    sum, a Cholesky factor of the DPP kernel, the coverage-weighted sum), so
//    f(S + e) costs one similarity row and one triangular solve.
//  - ScratchEvaluator recomputes everything from the member list on every
//    call. It is the "without sketch" ablation and the oracle the sketch is
//    tested against.
//
// Members live in slots; Remove() moves the last member into the vacated
// slot. A utility call is one evaluation of f on some set.

#ifndef CFSTREAM_EVALUATOR_H_
#define CFSTREAM_EVALUATOR_H_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cfstream/domain.h"
#include "cfstream/similarity.h"
#include "cfstream/utility.h"

namespace cfstream {

struct MemberRecord {
  Item item;
  double sim_to_query = 0.0;
  double coverage = 0.0;  // frozen at the member's arrival
};

// A prepared evaluation of f(S + e). Carries the similarity row so that
// committing the candidate does not recompute it.
struct Candidate {
  MemberRecord record;
  std::vector<double> sims;      // sim to each current member, slot order
  std::vector<double> chol_row;  // L^{-1} k_e, sketch only
  double pivot = 0.0;            // Schur complement of e in K
  UtilityBreakdown value;        // f(S + e)
};

class UtilityEvaluator {
 public:
  UtilityEvaluator(SimilarityMeasure sim, Item query, UtilityConfig config);
  virtual ~UtilityEvaluator() = default;

  // f(S). Cached (free) for the sketch; one utility call for scratch.
  virtual UtilityBreakdown Current() = 0;
  // f(S + e); one utility call.
  virtual Candidate Evaluate(const Item& item, double coverage) = 0;
  // Commits a candidate produced by Evaluate() on the current set.
  virtual void Append(Candidate candidate) = 0;
  // Replaces the member in `slot` by a candidate produced by Evaluate() on
  // the current set. The sketch re-derives f with one utility call.
  virtual void Replace(std::size_t slot, Candidate candidate) = 0;
  virtual void Remove(std::size_t slot) = 0;
  // Switches to a new utility config, rebuilding any cached aggregates from
  // the current members (their coverage stays frozen).
  virtual void Reconfigure(const UtilityConfig& config) = 0;
  virtual std::unique_ptr<UtilityEvaluator> Clone() const = 0;

  std::size_t size() const { return members_.size(); }
  const MemberRecord& member(std::size_t slot) const { return members_[slot]; }
  std::span<const MemberRecord> members() const { return members_; }
  std::uint64_t utility_calls() const { return utility_calls_; }
  const UtilityConfig& config() const { return config_; }
  const Item& query() const { return query_; }
  const SimilarityMeasure& similarity() const { return sim_; }

 protected:
  SimilarityMeasure sim_;
  Item query_;
  UtilityConfig config_;
  UtilityNeeds needs_;
  std::vector<MemberRecord> members_;
  std::uint64_t utility_calls_ = 0;
};

class SketchEvaluator : public UtilityEvaluator {
 public:
  SketchEvaluator(SimilarityMeasure sim, Item query, UtilityConfig config);

  UtilityBreakdown Current() override { return value_; }
  Candidate Evaluate(const Item& item, double coverage) override;
  void Append(Candidate candidate) override;
  void Replace(std::size_t slot, Candidate candidate) override;
  void Remove(std::size_t slot) override;
  void Reconfigure(const UtilityConfig& config) override;
  std::unique_ptr<UtilityEvaluator> Clone() const override;

  // Cached aggregates, exposed for audits.
  double sum_to_query() const { return sum_to_query_; }
  double pair_total() const { return pair_total_; }
  double log_det() const { return log_det_; }
  double pair(std::size_t i, std::size_t j) const { return pair_rows_[i][j]; }

 private:
  UtilityBreakdown ValueFrom(std::size_t n, double sum, double pairs,
                             double log_det, double weighted) const;
  void RebuildFactor();
  void RebuildAll();

  std::vector<std::vector<double>> pair_rows_;
  std::vector<std::vector<double>> chol_;  // lower-triangular rows
  double sum_to_query_ = 0.0;
  double pair_total_ = 0.0;
  double log_det_ = 0.0;
  double weighted_coverage_ = 0.0;
  UtilityBreakdown value_;
};

class ScratchEvaluator : public UtilityEvaluator {
 public:
  ScratchEvaluator(SimilarityMeasure sim, Item query, UtilityConfig config);

  UtilityBreakdown Current() override;
  Candidate Evaluate(const Item& item, double coverage) override;
  void Append(Candidate candidate) override;
  void Replace(std::size_t slot, Candidate candidate) override;
  void Remove(std::size_t slot) override;
  void Reconfigure(const UtilityConfig& config) override;
  std::unique_ptr<UtilityEvaluator> Clone() const override;

 private:
  UtilityBreakdown EvaluateMembers(std::span<const MemberRecord> members);
};

std::unique_ptr<UtilityEvaluator> MakeEvaluator(bool use_sketch,
                                                SimilarityMeasure sim,
                                                Item query,
                                                UtilityConfig config);

}  // namespace cfstream

#endif  // CFSTREAM_EVALUATOR_H_
