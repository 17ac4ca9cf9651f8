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

#include "cfstream/utility.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cfstream/error.h"
#include "cfstream/random.h"

namespace cfstream {

UtilityNeeds NeedsFor(const UtilityConfig& config) {
  UtilityNeeds needs;
  const bool hybrid = config.mode == UtilityMode::kHybrid;
  needs.f1 = hybrid || config.mode == UtilityMode::kContent;
  needs.f2 = hybrid || config.mode == UtilityMode::kSampling;
  needs.f3 = hybrid || config.mode == UtilityMode::kClustering;
  needs.determinant = needs.f2 && config.lambda2 > 0.0;
  needs.pairs = (needs.f1 && config.lambda1 > 0.0) || needs.determinant;
  needs.coverage = needs.f3 && config.lambda3 > 0.0;
  return needs;
}

MemberSimilarities ComputeMemberSimilarities(std::span<const Item> members,
                                             const Item& query,
                                             const SimilarityMeasure& sim,
                                             bool with_pairs) {
  MemberSimilarities out;
  const std::size_t n = members.size();
  out.to_query.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.to_query[i] = sim.Similarity(members[i], query);
  }
  if (with_pairs) {
    out.pairwise.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      out.pairwise[i * n + i] = 1.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        double s = sim.Similarity(members[i], members[j]);
        out.pairwise[i * n + j] = s;
        out.pairwise[j * n + i] = s;
      }
    }
  }
  return out;
}

double DiagonalJitter(ItemId id, const UtilityConfig& config) {
  std::uint64_t h =
      SplitMix64(DeriveSeed(config.seed, kJitterStream) ^ SplitMix64(id));
  double u = static_cast<double>((h >> 11) + 1) * 0x1.0p-53;  // (0, 1]
  return config.diag_jitter * u;
}

double KernelLogDeterminant(const MemberSimilarities& sims,
                            std::span<const ItemId> ids,
                            const UtilityConfig& config) {
  const std::size_t n = sims.size();
  // Lower-triangular factor, row-major.
  std::vector<double> chol(n * n, 0.0);
  double log_det = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double v = i == j ? 1.0 + DiagonalJitter(ids[i], config)
                        : KernelEntry(sims.pair(i, j));
      for (std::size_t t = 0; t < j; ++t) v -= chol[i * n + t] * chol[j * n + t];
      if (i == j) {
        if (!(v > 0.0) || !std::isfinite(v)) {
          throw Error(ErrorCode::kDeterminantFailure,
                      "kernel matrix is not positive definite");
        }
        chol[i * n + i] = std::sqrt(v);
        log_det += std::log(v);
      } else {
        chol[i * n + j] = v / chol[j * n + j];
      }
    }
  }
  return log_det;
}

namespace {

double SumToQuery(const MemberSimilarities& sims) {
  return std::accumulate(sims.to_query.begin(), sims.to_query.end(), 0.0);
}

double OrderedPairSum(const MemberSimilarities& sims) {
  const std::size_t n = sims.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) total += sims.pair(i, j);
  }
  return 2.0 * total;
}

}  // namespace

double ContentUtility(const MemberSimilarities& sims,
                      const UtilityConfig& config) {
  const std::size_t n = sims.size();
  if (n == 0) return 0.0;
  double sum = SumToQuery(sims);
  if (config.lambda1 == 0.0) return sum;
  double nn = static_cast<double>(n);
  return sum - config.lambda1 / (nn * nn) * OrderedPairSum(sims);
}

double SamplingUtility(const MemberSimilarities& sims,
                       std::span<const ItemId> ids,
                       const UtilityConfig& config) {
  const std::size_t n = sims.size();
  if (n == 0) return 0.0;
  double sum = SumToQuery(sims);
  if (config.lambda2 == 0.0) return sum;
  double det = std::exp(KernelLogDeterminant(sims, ids, config));
  return sum - config.lambda2 / static_cast<double>(n) * det;
}

double ClusteringUtility(std::span<const double> to_query,
                         std::span<const double> coverage,
                         const UtilityConfig& config) {
  const std::size_t n = to_query.size();
  if (n == 0) return 0.0;
  double sum = std::accumulate(to_query.begin(), to_query.end(), 0.0);
  if (config.lambda3 == 0.0) return sum;
  double weighted = 0.0;
  for (std::size_t i = 0; i < n; ++i) weighted += to_query[i] * coverage[i];
  return sum + config.lambda3 / static_cast<double>(n) * weighted;
}

UtilityBreakdown EvaluateUtility(const MemberSimilarities& sims,
                                 std::span<const ItemId> ids,
                                 std::span<const double> coverage,
                                 const UtilityConfig& config) {
  UtilityBreakdown out;
  const UtilityNeeds needs = NeedsFor(config);
  if (needs.f1) out.f1 = ContentUtility(sims, config);
  if (needs.f2) out.f2 = SamplingUtility(sims, ids, config);
  if (needs.f3) out.f3 = ClusteringUtility(sims.to_query, coverage, config);
  switch (config.mode) {
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

UtilityBreakdown EvaluateUtility(std::span<const Item> members,
                                 std::span<const double> coverage,
                                 const Item& query,
                                 const SimilarityMeasure& sim,
                                 const UtilityConfig& config) {
  const UtilityNeeds needs = NeedsFor(config);
  MemberSimilarities sims =
      ComputeMemberSimilarities(members, query, sim, needs.pairs);
  std::vector<ItemId> ids;
  ids.reserve(members.size());
  for (const Item& m : members) ids.push_back(m.id);
  return EvaluateUtility(sims, ids, coverage, config);
}

double MarginalGain(const Item& item, double item_coverage,
                    std::span<const Item> members,
                    std::span<const double> coverage, const Item& query,
                    const SimilarityMeasure& sim, const UtilityConfig& config) {
  std::vector<Item> with(members.begin(), members.end());
  with.push_back(item);
  std::vector<double> cov(coverage.begin(), coverage.end());
  cov.push_back(item_coverage);
  double after = EvaluateUtility(with, cov, query, sim, config).total;
  double before = EvaluateUtility(members, coverage, query, sim, config).total;
  return after - before;
}

double EstimateCurvature(std::span<const Item> sample,
                         std::span<const double> coverage, const Item& query,
                         const SimilarityMeasure& sim,
                         const UtilityConfig& config,
                         const CurvatureOptions& options) {
  const std::size_t n = sample.size();
  if (n == 0) {
    throw Error(ErrorCode::kDegenerateSample, "curvature sample is empty");
  }
  std::vector<double> singleton(n);
  bool any_positive = false;
  for (std::size_t i = 0; i < n; ++i) {
    singleton[i] =
        EvaluateUtility(sample.subspan(i, 1), coverage.subspan(i, 1), query,
                        sim, config)
            .total;
    any_positive = any_positive || singleton[i] > 0.0;
  }
  if (!any_positive) {
    throw Error(ErrorCode::kDegenerateSample,
                "no sampled item has a positive singleton utility");
  }
  if (n == 1) return 0.0;

  std::mt19937_64 rng(DeriveSeed(options.seed, kCurvatureStream));
  std::vector<std::size_t> order(n);
  std::vector<Item> subset;
  std::vector<double> subset_cov;
  double min_ratio = 1.0;
  const std::size_t max_size = std::min<std::size_t>(
      std::max(options.max_subset_size, 1), n - 1);
  for (int t = 0; t < options.subsets; ++t) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Partial Fisher-Yates: the first m entries form S, the rest are
    // candidate arrivals.
    std::size_t m = 1 + UniformIndex(rng, max_size);
    for (std::size_t i = 0; i < n - 1; ++i) {
      std::size_t j = i + UniformIndex(rng, n - i);
      std::swap(order[i], order[j]);
    }
    subset.clear();
    subset_cov.clear();
    for (std::size_t i = 0; i < m; ++i) {
      subset.push_back(sample[order[i]]);
      subset_cov.push_back(coverage[order[i]]);
    }
    double base = EvaluateUtility(subset, subset_cov, query, sim, config).total;
    int evaluated = 0;
    for (std::size_t i = m; i < n && evaluated < options.candidates_per_subset;
         ++i) {
      std::size_t e = order[i];
      if (!(singleton[e] > 0.0)) continue;
      subset.push_back(sample[e]);
      subset_cov.push_back(coverage[e]);
      double with =
          EvaluateUtility(subset, subset_cov, query, sim, config).total;
      subset.pop_back();
      subset_cov.pop_back();
      min_ratio = std::min(min_ratio, (with - base) / singleton[e]);
      ++evaluated;
    }
  }
  double curvature = std::clamp(1.0 - min_ratio, 0.0, 1.0);
  return curvature < 1e-9 ? 0.0 : curvature;
}

double SelectSwapThreshold(double curvature) {
  if (!(curvature >= 0.0 && curvature < 1.0)) {
    throw Error(ErrorCode::kCurvatureOutOfRange,
                "curvature must lie in [0, 1)");
  }
  // Strict comparison; the relative slack keeps the exact boundary
  // 1 - 5.585 / 7.75 on the lambda = 1 side despite rounding.
  return 5.585 / (1.0 - curvature) > 7.75 * (1.0 + 1e-12) ? 0.717 : 1.0;
}

double SwapThresholdForCurvature(double curvature) {
  if (curvature >= 1.0) return 0.717;
  return SelectSwapThreshold(std::max(curvature, 0.0));
}

double ApproximationRatio(double lambda) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be positive");
  }
  double a = (1.0 + lambda) * (1.0 + lambda);
  return 2.0 * a / lambda - lambda / a;
}

}  // namespace cfstream
