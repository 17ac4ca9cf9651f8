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

// Counterfactual utilities evaluated from scratch on explicit member lists,
// plus curvature estimation and the swap-threshold rule.
//
// With s(e) = sim(e, q) and n = |S|:
//
//   content    f1(S) = sum s(e) - lambda1 / n^2 * sum_{e} sum_{e' != e} sim(e, e')
//   sampling   f2(S) = sum s(e) - lambda2 / n * det(K_S),
//              K_ij = 1 / (1 + dist(e_i, e_j)), K_ii = 1 + jitter_i
//   clustering f3(S) = sum s(e) + lambda3 / n * sum s(e) cov(e)
//   hybrid     f(S)  = f1 + f2 + f3
//
// The pairwise sum runs over ordered pairs. Every utility of the empty set
// is 0.

#ifndef CFSTREAM_UTILITY_H_
#define CFSTREAM_UTILITY_H_

#include <cstdint>
#include <span>
#include <vector>

#include "cfstream/domain.h"
#include "cfstream/similarity.h"

namespace cfstream {

// Which aggregates a utility mode reads. Components whose lambda is zero
// reduce to sum s(e) and need no pairwise data.
struct UtilityNeeds {
  bool pairs = false;        // pairwise similarity sum (content)
  bool determinant = false;  // DPP kernel determinant (sampling)
  bool coverage = false;     // coverage-weighted sum (clustering)
  bool f1 = false;
  bool f2 = false;
  bool f3 = false;
};
UtilityNeeds NeedsFor(const UtilityConfig& config);

// Similarity data of an explicit member list.
struct MemberSimilarities {
  std::vector<double> to_query;  // s(e_i)
  std::vector<double> pairwise;  // row-major n x n, unit diagonal

  std::size_t size() const { return to_query.size(); }
  double pair(std::size_t i, std::size_t j) const {
    return pairwise[i * size() + j];
  }
};

MemberSimilarities ComputeMemberSimilarities(std::span<const Item> members,
                                             const Item& query,
                                             const SimilarityMeasure& sim,
                                             bool with_pairs = true);

// Deterministic diagonal jitter in (0, diag_jitter], a function of the seed
// and the member id only.
double DiagonalJitter(ItemId id, const UtilityConfig& config);

// K entry for a similarity value: 1 / (1 + (1 - sim)).
inline double KernelEntry(double sim) { return 1.0 / (2.0 - sim); }

// log det(K_S) by Cholesky factorization. Throws kDeterminantFailure when a
// pivot is not strictly positive and finite.
double KernelLogDeterminant(const MemberSimilarities& sims,
                            std::span<const ItemId> ids,
                            const UtilityConfig& config);

double ContentUtility(const MemberSimilarities& sims,
                      const UtilityConfig& config);
double SamplingUtility(const MemberSimilarities& sims,
                       std::span<const ItemId> ids,
                       const UtilityConfig& config);
double ClusteringUtility(std::span<const double> to_query,
                         std::span<const double> coverage,
                         const UtilityConfig& config);

// All components the configured mode uses; the others are reported as 0.
UtilityBreakdown EvaluateUtility(const MemberSimilarities& sims,
                                 std::span<const ItemId> ids,
                                 std::span<const double> coverage,
                                 const UtilityConfig& config);

// Convenience overload that computes the similarities first.
UtilityBreakdown EvaluateUtility(std::span<const Item> members,
                                 std::span<const double> coverage,
                                 const Item& query,
                                 const SimilarityMeasure& sim,
                                 const UtilityConfig& config);

// f(S + e) - f(S), both evaluated from scratch.
double MarginalGain(const Item& item, double item_coverage,
                    std::span<const Item> members,
                    std::span<const double> coverage, const Item& query,
                    const SimilarityMeasure& sim, const UtilityConfig& config);

struct CurvatureOptions {
  int subsets = 64;
  int max_subset_size = 25;
  int candidates_per_subset = 32;
  std::uint64_t seed = 0;
};

// Empirical curvature 1 - min f(e|S) / f(e) over random subsets S of the
// sample and sampled e outside S with f(e) > 0, clamped to [0, 1]. Values
// within 1e-9 of zero are reported as 0. Throws kDegenerateSample when no
// sampled item has positive singleton value.
double EstimateCurvature(std::span<const Item> sample,
                         std::span<const double> coverage, const Item& query,
                         const SimilarityMeasure& sim,
                         const UtilityConfig& config,
                         const CurvatureOptions& options = {});

// 0.717 when 5.585 / (1 - curvature) > 7.75, otherwise 1.0. Throws
// kCurvatureOutOfRange unless 0 <= curvature < 1.
double SelectSwapThreshold(double curvature);

// SelectSwapThreshold extended to curvature 1 (the rule's limit, 0.717).
double SwapThresholdForCurvature(double curvature);

// rho(lambda) = 2 (1 + lambda)^2 / lambda - lambda / (1 + lambda)^2; its
// minimum over lambda > 0 is 7.75 at lambda = 1.
double ApproximationRatio(double lambda);

}  // namespace cfstream

#endif  // CFSTREAM_UTILITY_H_
