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

#include "cfstream/evaluator.h"

#include <cmath>
#include <utility>

#include "cfstream/error.h"

namespace cfstream {

UtilityEvaluator::UtilityEvaluator(SimilarityMeasure sim, Item query,
                                   UtilityConfig config)
    : sim_(std::move(sim)),
      query_(std::move(query)),
      config_(std::move(config)),
      needs_(NeedsFor(config_)) {}

// ---------------------------------------------------------------------------
// SketchEvaluator

SketchEvaluator::SketchEvaluator(SimilarityMeasure sim, Item query,
                                 UtilityConfig config)
    : UtilityEvaluator(std::move(sim), std::move(query), std::move(config)) {}

UtilityBreakdown SketchEvaluator::ValueFrom(std::size_t n, double sum,
                                            double pairs, double log_det,
                                            double weighted) const {
  UtilityBreakdown out;
  if (n == 0) return out;
  const double nn = static_cast<double>(n);
  if (needs_.f1) {
    out.f1 = config_.lambda1 == 0.0
                 ? sum
                 : sum - config_.lambda1 / (nn * nn) * pairs;
  }
  if (needs_.f2) {
    out.f2 = config_.lambda2 == 0.0
                 ? sum
                 : sum - config_.lambda2 / nn * std::exp(log_det);
  }
  if (needs_.f3) {
    out.f3 = config_.lambda3 == 0.0 ? sum
                                    : sum + config_.lambda3 / nn * weighted;
  }
  switch (config_.mode) {
    case UtilityMode::kContent:
      out.total = out.f1;
      break;
    case UtilityMode::kSampling:
      out.total = out.f2;
      break;
    case UtilityMode::kClustering:
      out.total = out.f3;
      break;
    case UtilityMode::kHybrid:
      out.total = out.f1 + out.f2 + out.f3;
      break;
  }
  return out;
}

Candidate SketchEvaluator::Evaluate(const Item& item, double coverage) {
  ++utility_calls_;
  Candidate c;
  c.record.item = item;
  c.record.coverage = coverage;
  c.record.sim_to_query = sim_.Similarity(item, query_);
  const std::size_t n = members_.size();

  double pairs = pair_total_;
  if (needs_.pairs) {
    c.sims.resize(n);
    double row_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      c.sims[i] = sim_.Similarity(item, members_[i].item);
      row_sum += c.sims[i];
    }
    pairs += 2.0 * row_sum;
  }

  double log_det = log_det_;
  if (needs_.determinant) {
    // Forward solve L y = k_e; the new pivot is the Schur complement.
    c.chol_row.resize(n);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double v = KernelEntry(c.sims[i]);
      const std::vector<double>& row = chol_[i];
      for (std::size_t t = 0; t < i; ++t) v -= row[t] * c.chol_row[t];
      v /= row[i];
      c.chol_row[i] = v;
      norm += v * v;
    }
    c.pivot = 1.0 + DiagonalJitter(item.id, config_) - norm;
    if (!(c.pivot > 0.0) || !std::isfinite(c.pivot)) {
      throw Error(ErrorCode::kDeterminantFailure,
                  "kernel is not positive definite after adding item " +
                      std::to_string(item.id));
    }
    log_det += std::log(c.pivot);
  }

  c.value = ValueFrom(n + 1, sum_to_query_ + c.record.sim_to_query, pairs,
                      log_det,
                      weighted_coverage_ +
                          c.record.sim_to_query * c.record.coverage);
  return c;
}

void SketchEvaluator::Append(Candidate c) {
  const std::size_t n = members_.size();
  if (needs_.pairs) {
    if (c.sims.size() != n) {
      throw Error(ErrorCode::kInternalInconsistency,
                  "candidate was prepared against a different member set");
    }
    double row_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pair_rows_[i].push_back(c.sims[i]);
      row_sum += c.sims[i];
    }
    std::vector<double> row = std::move(c.sims);
    row.push_back(1.0);
    pair_rows_.push_back(std::move(row));
    pair_total_ += 2.0 * row_sum;
  }
  if (needs_.determinant) {
    std::vector<double> row = std::move(c.chol_row);
    row.push_back(std::sqrt(c.pivot));
    chol_.push_back(std::move(row));
    log_det_ += std::log(c.pivot);
  }
  sum_to_query_ += c.record.sim_to_query;
  weighted_coverage_ += c.record.sim_to_query * c.record.coverage;
  members_.push_back(std::move(c.record));
  value_ = c.value;
}

void SketchEvaluator::Replace(std::size_t slot, Candidate c) {
  const std::size_t n = members_.size();
  if (slot >= n) {
    throw Error(ErrorCode::kInternalInconsistency, "replace: bad slot");
  }
  const MemberRecord& old = members_[slot];
  sum_to_query_ += c.record.sim_to_query - old.sim_to_query;
  weighted_coverage_ += c.record.sim_to_query * c.record.coverage -
                        old.sim_to_query * old.coverage;
  if (needs_.pairs) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == slot) continue;
      pair_total_ += 2.0 * (c.sims[i] - pair_rows_[slot][i]);
      pair_rows_[i][slot] = c.sims[i];
    }
    c.sims[slot] = 1.0;
    pair_rows_[slot] = std::move(c.sims);
  }
  members_[slot] = std::move(c.record);
  if (needs_.determinant) RebuildFactor();
  ++utility_calls_;
  value_ = ValueFrom(n, sum_to_query_, pair_total_, log_det_,
                     weighted_coverage_);
}

void SketchEvaluator::Remove(std::size_t slot) {
  const std::size_t n = members_.size();
  if (slot >= n) {
    throw Error(ErrorCode::kInternalInconsistency, "remove: bad slot");
  }
  const std::size_t last = n - 1;
  const MemberRecord& old = members_[slot];
  sum_to_query_ -= old.sim_to_query;
  weighted_coverage_ -= old.sim_to_query * old.coverage;
  if (needs_.pairs) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i != slot) pair_total_ -= 2.0 * pair_rows_[slot][i];
    }
    if (slot != last) pair_rows_[slot] = std::move(pair_rows_[last]);
    pair_rows_.pop_back();
    for (std::vector<double>& row : pair_rows_) {
      row[slot] = row[last];
      row.pop_back();
    }
  }
  if (slot != last) members_[slot] = std::move(members_[last]);
  members_.pop_back();
  if (needs_.determinant) RebuildFactor();
  value_ = ValueFrom(members_.size(), sum_to_query_, pair_total_, log_det_,
                     weighted_coverage_);
}

void SketchEvaluator::RebuildFactor() {
  const std::size_t n = members_.size();
  chol_.assign(n, {});
  log_det_ = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double>& row = chol_[i];
    row.resize(i + 1);
    for (std::size_t j = 0; j <= i; ++j) {
      double v = i == j ? 1.0 + DiagonalJitter(members_[i].item.id, config_)
                        : KernelEntry(pair_rows_[i][j]);
      const std::vector<double>& other = chol_[j];
      for (std::size_t t = 0; t < j; ++t) v -= row[t] * other[t];
      if (i == j) {
        if (!(v > 0.0) || !std::isfinite(v)) {
          throw Error(ErrorCode::kDeterminantFailure,
                      "kernel matrix is not positive definite");
        }
        row[i] = std::sqrt(v);
        log_det_ += std::log(v);
      } else {
        row[j] = v / other[j];
      }
    }
  }
}

void SketchEvaluator::RebuildAll() {
  const std::size_t n = members_.size();
  sum_to_query_ = 0.0;
  weighted_coverage_ = 0.0;
  for (MemberRecord& m : members_) {
    m.sim_to_query = sim_.Similarity(m.item, query_);
    sum_to_query_ += m.sim_to_query;
    weighted_coverage_ += m.sim_to_query * m.coverage;
  }
  pair_rows_.clear();
  pair_total_ = 0.0;
  if (needs_.pairs) {
    pair_rows_.assign(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double s = sim_.Similarity(members_[i].item, members_[j].item);
        pair_rows_[i][j] = s;
        pair_rows_[j][i] = s;
        pair_total_ += 2.0 * s;
      }
    }
  }
  chol_.clear();
  log_det_ = 0.0;
  if (needs_.determinant) RebuildFactor();
  value_ = ValueFrom(n, sum_to_query_, pair_total_, log_det_,
                     weighted_coverage_);
}

void SketchEvaluator::Reconfigure(const UtilityConfig& config) {
  config_ = config;
  needs_ = NeedsFor(config_);
  RebuildAll();
}

std::unique_ptr<UtilityEvaluator> SketchEvaluator::Clone() const {
  return std::make_unique<SketchEvaluator>(*this);
}

// ---------------------------------------------------------------------------
// ScratchEvaluator

ScratchEvaluator::ScratchEvaluator(SimilarityMeasure sim, Item query,
                                   UtilityConfig config)
    : UtilityEvaluator(std::move(sim), std::move(query), std::move(config)) {}

UtilityBreakdown ScratchEvaluator::EvaluateMembers(
    std::span<const MemberRecord> members) {
  ++utility_calls_;
  std::vector<Item> items;
  std::vector<double> coverage;
  items.reserve(members.size());
  coverage.reserve(members.size());
  for (const MemberRecord& m : members) {
    items.push_back(m.item);
    coverage.push_back(m.coverage);
  }
  return EvaluateUtility(items, coverage, query_, sim_, config_);
}

UtilityBreakdown ScratchEvaluator::Current() {
  return EvaluateMembers(members_);
}

Candidate ScratchEvaluator::Evaluate(const Item& item, double coverage) {
  Candidate c;
  c.record.item = item;
  c.record.coverage = coverage;
  c.record.sim_to_query = sim_.Similarity(item, query_);
  std::vector<MemberRecord> with = members_;
  with.push_back(c.record);
  c.value = EvaluateMembers(with);
  return c;
}

void ScratchEvaluator::Append(Candidate c) {
  members_.push_back(std::move(c.record));
}

void ScratchEvaluator::Replace(std::size_t slot, Candidate c) {
  if (slot >= members_.size()) {
    throw Error(ErrorCode::kInternalInconsistency, "replace: bad slot");
  }
  members_[slot] = std::move(c.record);
}

void ScratchEvaluator::Remove(std::size_t slot) {
  if (slot >= members_.size()) {
    throw Error(ErrorCode::kInternalInconsistency, "remove: bad slot");
  }
  if (slot + 1 != members_.size()) members_[slot] = std::move(members_.back());
  members_.pop_back();
}

void ScratchEvaluator::Reconfigure(const UtilityConfig& config) {
  config_ = config;
  needs_ = NeedsFor(config_);
}

std::unique_ptr<UtilityEvaluator> ScratchEvaluator::Clone() const {
  return std::make_unique<ScratchEvaluator>(*this);
}

std::unique_ptr<UtilityEvaluator> MakeEvaluator(bool use_sketch,
                                                SimilarityMeasure sim,
                                                Item query,
                                                UtilityConfig config) {
  if (use_sketch) {
    return std::make_unique<SketchEvaluator>(std::move(sim), std::move(query),
                                             std::move(config));
  }
  return std::make_unique<ScratchEvaluator>(std::move(sim), std::move(query),
                                            std::move(config));
}

}  // namespace cfstream
