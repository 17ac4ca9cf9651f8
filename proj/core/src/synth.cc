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

#include "cfstream/synth.h"

#include <algorithm>
#include <string>
#include <utility>

#include "cfstream/error.h"
#include "cfstream/random.h"

namespace cfstream {
namespace {

constexpr double kPreferredLevelProbability = 0.7;
constexpr double kDriftShiftSigmas = 3.0;

std::uint64_t MeansSeed(std::uint64_t seed) {
  return DeriveSeed(seed, kSynthStream + 1);
}
std::uint64_t QuerySeed(std::uint64_t seed) {
  return DeriveSeed(seed, kSynthStream + 2);
}

}  // namespace

std::string_view DriftModeName(DriftMode mode) {
  return mode == DriftMode::kNormal ? "normal" : "skewed";
}

DriftMode ParseDriftMode(std::string_view name) {
  if (name == "normal") return DriftMode::kNormal;
  if (name == "skewed") return DriftMode::kSkewed;
  throw Error(ErrorCode::kInvalidArgument,
              "drift mode must be normal or skewed, got '" +
                  std::string(name) + "'");
}

void ValidateSynthConfig(const SynthConfig& c) {
  if (c.n < 1 || c.labels < 1 || c.continuous < 0 || c.categorical < 0 ||
      c.continuous + c.categorical < 1 ||
      (c.categorical > 0 && c.levels < 1) || !(c.sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid generator config");
  }
}

std::shared_ptr<const Schema> SynthSchema(const SynthConfig& config) {
  ValidateSynthConfig(config);
  std::vector<FeatureSpec> features;
  for (int i = 1; i <= config.continuous; ++i) {
    features.push_back(
        {"x" + std::to_string(i), FeatureKind::kContinuous, 0.0, 1.0});
  }
  for (int i = 1; i <= config.categorical; ++i) {
    features.push_back(
        {"c" + std::to_string(i), FeatureKind::kCategorical, 0.0, 0.0});
  }
  return std::make_shared<const Schema>(std::move(features), "label",
                                        config.labels);
}

CategoryDictionary SynthDictionary(const SynthConfig& config) {
  CategoryDictionary dict(static_cast<std::size_t>(config.categorical));
  for (int s = 0; s < config.categorical; ++s) {
    for (int v = 0; v < config.levels; ++v) {
      dict.Intern(static_cast<std::size_t>(s), "v" + std::to_string(v));
    }
  }
  return dict;
}

std::vector<double> SynthLabelPrior(const SynthConfig& config) {
  std::vector<double> p(static_cast<std::size_t>(config.labels));
  double total = 0.0;
  for (int l = 1; l <= config.labels; ++l) total += 1.0 / l;
  for (int l = 1; l <= config.labels; ++l) p[LabelIndex(l)] = 1.0 / l / total;
  return p;
}

SynthStream::SynthStream(const SynthConfig& config)
    : config_(config),
      drift_point_(config.drift_point.value_or(config.n / 2)),
      prior_(SynthLabelPrior(config)),
      rng_(DeriveSeed(config.seed, kSynthStream)) {
  ValidateSynthConfig(config_);
  std::mt19937_64 means_rng(MeansSeed(config_.seed));
  for (int l = 0; l < config_.labels; ++l) {
    std::vector<double> mean(static_cast<std::size_t>(config_.continuous));
    for (double& m : mean) m = 0.2 + 0.6 * Uniform01(means_rng);
    means_.push_back(std::move(mean));
    std::vector<std::int32_t> preferred(
        static_cast<std::size_t>(config_.categorical));
    for (std::int32_t& p : preferred) {
      p = static_cast<std::int32_t>(UniformIndex(
          means_rng, static_cast<std::uint64_t>(config_.levels)));
    }
    preferred_.push_back(std::move(preferred));
  }
  drifted_prior_ = prior_;
  if (config_.label_mode == DriftMode::kSkewed) {
    std::swap(drifted_prior_.front(), drifted_prior_.back());
  }
}

Label SynthStream::DrawLabel(bool drifted) {
  const std::vector<double>& p = drifted ? drifted_prior_ : prior_;
  double u = Uniform01(rng_);
  for (std::size_t l = 0; l + 1 < p.size(); ++l) {
    if (u < p[l]) return static_cast<Label>(l + 1);
    u -= p[l];
  }
  return static_cast<Label>(p.size());
}

Item SynthStream::Draw(Label label, bool drifted,
                       std::mt19937_64& rng) const {
  std::normal_distribution<double> noise(0.0, config_.sigma);
  Item item;
  item.label = label;
  const std::vector<double>& mean = means_[LabelIndex(label)];
  for (double m : mean) {
    if (drifted && config_.feature_mode == DriftMode::kSkewed) {
      const double shift = kDriftShiftSigmas * config_.sigma;
      m += m < 0.5 ? shift : -shift;
    }
    item.continuous.push_back(std::clamp(m + noise(rng), 0.0, 1.0));
  }
  for (std::int32_t preferred : preferred_[LabelIndex(label)]) {
    if (Uniform01(rng) < kPreferredLevelProbability) {
      item.categorical.push_back(preferred);
    } else {
      item.categorical.push_back(static_cast<std::int32_t>(
          UniformIndex(rng, static_cast<std::uint64_t>(config_.levels))));
    }
  }
  return item;
}

std::optional<Item> SynthStream::Next() {
  if (next_ >= config_.n) return std::nullopt;
  const bool drifted = next_ >= drift_point_;
  const Label label = DrawLabel(drifted);
  Item item = Draw(label, drifted, rng_);
  item.id = next_++;
  return item;
}

std::vector<Item> GenerateSynth(const SynthConfig& config) {
  SynthStream stream(config);
  std::vector<Item> out;
  out.reserve(config.n);
  while (std::optional<Item> item = stream.Next()) {
    out.push_back(std::move(*item));
  }
  return out;
}

Item SynthQuery(const SynthConfig& config) {
  SynthStream stream(config);
  std::mt19937_64 rng(QuerySeed(config.seed));
  Item q = stream.Draw(1, false, rng);
  q.id = kQueryItemId;
  return q;
}

}  // namespace cfstream
