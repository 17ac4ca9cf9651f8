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

// Seed derivation helpers. Every randomized component draws from its own
// stream so that, e.g., the random-swap baseline and the coverage reservoirs
// never perturb each other for the same user seed.

#ifndef CFSTREAM_RANDOM_H_
#define CFSTREAM_RANDOM_H_

#include <cstdint>
#include <random>

namespace cfstream {

inline constexpr std::uint64_t kReservoirStream = 0x7265736572766f69ULL;
inline constexpr std::uint64_t kJitterStream = 0x6a69747465720000ULL;
inline constexpr std::uint64_t kCurvatureStream = 0x6375727661747572ULL;
inline constexpr std::uint64_t kRandomSwapStream = 0x72616e646f6d7377ULL;
inline constexpr std::uint64_t kSynthStream = 0x73796e7468000000ULL;

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(seed ^ SplitMix64(stream));
}

// Uniform integer in [0, n). Modulo bias is below 2^-40 for the n used here.
inline std::uint64_t UniformIndex(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

// Uniform double in [0, 1).
inline double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cfstream

#endif  // CFSTREAM_RANDOM_H_
