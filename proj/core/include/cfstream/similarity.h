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

#ifndef CFSTREAM_SIMILARITY_H_
#define CFSTREAM_SIMILARITY_H_

#include <memory>
#include <vector>

#include "cfstream/domain.h"

namespace cfstream {

struct TransportComponents {
  double continuous = 0.0;   // l1 over normalized continuous values
  double categorical = 0.0;  // number of mismatching categorical features
};

// Gower similarity over mixed continuous/categorical features.
//
// A continuous feature contributes 1 - |a - b| / (max - min) after both
// values are clamped to the schema range; a constant feature (min == max)
// always contributes 1. A categorical feature contributes 1 on equality and
// 0 otherwise. The result is the weighted mean of the contributions, so it
// lies in [0, 1], is symmetric, and sim(e, e) == 1.
class SimilarityMeasure {
 public:
  explicit SimilarityMeasure(std::shared_ptr<const Schema> schema);
  // `weights` has one non-negative entry per schema feature (schema order).
  SimilarityMeasure(std::shared_ptr<const Schema> schema,
                    std::vector<double> weights);

  double Similarity(const Item& a, const Item& b) const;
  double Distance(const Item& a, const Item& b) const {
    return 1.0 - Similarity(a, b);
  }

  TransportComponents Transport(const Item& e, const Item& q) const;

  // Value of a continuous slot mapped to [0, 1]; constant features map to 0.
  double Normalize(std::size_t continuous_slot, double value) const;

  const Schema& schema() const { return *schema_; }
  const std::shared_ptr<const Schema>& schema_ptr() const { return schema_; }

 private:
  void CheckLayout(const Item& a, const Item& b) const;

  std::shared_ptr<const Schema> schema_;
  std::vector<double> min_;
  std::vector<double> max_;
  std::vector<double> inv_range_;  // 0 for constant features
  std::vector<double> cont_weight_;
  std::vector<double> cat_weight_;
  double weight_sum_ = 0.0;
};

}  // namespace cfstream

#endif  // CFSTREAM_SIMILARITY_H_
