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

// Seeded synthetic labeled stream with a drift point.
//
// Labels follow p_l proportional to 1/l. Each label owns a Gaussian cluster
// (per-dimension sigma, means drawn in [0.2, 0.8]) over continuous features
// in [0, 1], and a preferred level for every categorical feature (drawn with
// probability 0.7, otherwise uniform). From the drift point on:
//   label mode skewed:   p_1 and p_L are exchanged;
//   feature mode skewed: every cluster mean moves 3 sigma towards the
//                        middle of the range.
// Emitted values are clamped to the schema range.

#ifndef CFSTREAM_SYNTH_H_
#define CFSTREAM_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "cfstream/domain.h"

namespace cfstream {

enum class DriftMode { kNormal, kSkewed };

std::string_view DriftModeName(DriftMode mode);
DriftMode ParseDriftMode(std::string_view name);

struct SynthConfig {
  std::size_t n = 10000;
  int labels = 4;
  int continuous = 4;
  int categorical = 2;
  int levels = 4;
  DriftMode feature_mode = DriftMode::kNormal;
  DriftMode label_mode = DriftMode::kNormal;
  std::optional<std::size_t> drift_point;  // default n / 2
  std::uint64_t seed = 1;
  double sigma = 0.1;
};

void ValidateSynthConfig(const SynthConfig& config);

// Features x1..xd (continuous, [0, 1]) then c1..cm (categorical), label
// column "label".
std::shared_ptr<const Schema> SynthSchema(const SynthConfig& config);

// Categorical symbols "v0".."v{levels-1}" interned so names match codes.
CategoryDictionary SynthDictionary(const SynthConfig& config);

// Pre-drift label probabilities.
std::vector<double> SynthLabelPrior(const SynthConfig& config);

class SynthStream : public ItemSource {
 public:
  explicit SynthStream(const SynthConfig& config);

  std::optional<Item> Next() override;

  // Item drawn from a label's cluster, before or after the drift point,
  // using the caller's generator.
  Item Draw(Label label, bool drifted, std::mt19937_64& rng) const;
  std::size_t drift_point() const { return drift_point_; }
  const std::vector<double>& cluster_mean(Label label) const {
    return means_[LabelIndex(label)];
  }

 private:
  Label DrawLabel(bool drifted);

  SynthConfig config_;
  std::size_t drift_point_;
  std::vector<std::vector<double>> means_;
  std::vector<std::vector<std::int32_t>> preferred_;
  std::vector<double> prior_;
  std::vector<double> drifted_prior_;
  std::mt19937_64 rng_;
  std::size_t next_ = 0;
};

std::vector<Item> GenerateSynth(const SynthConfig& config);

// A query drawn from label 1's pre-drift cluster with its own seed stream,
// id kQueryItemId.
Item SynthQuery(const SynthConfig& config);

}  // namespace cfstream

#endif  // CFSTREAM_SYNTH_H_
