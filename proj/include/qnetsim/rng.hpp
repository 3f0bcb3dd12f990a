// Copyright 2026 The qnetsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QNETSIM_RNG_HPP
#define QNETSIM_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace qnetsim {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based stream derivation.
///
/// Word i of the seed material is splitmix64(master ^ splitmix64(index) + i * phi),
/// i = 0..3, fed as eight 32-bit halves through std::seed_seq into a
/// std::mt19937_64. The mapping depends only on (master_seed, index), so
/// every repetition owns a reproducible stream regardless of which worker
/// runs it or in which order.
/// 64-bit key identifying stream `index` of `master_seed`.
constexpr std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return master_seed ^ splitmix64(index);
}

inline Rng derive_stream(std::uint64_t master_seed, std::uint64_t index) {
  const std::uint64_t key = stream_key(master_seed, index);
  std::array<std::uint32_t, 8> words{};
  for (std::uint64_t i = 0; i < 4; ++i) {
    const std::uint64_t w = splitmix64(key + i * 0x9E3779B97F4A7C15ULL);
    words[2 * i] = static_cast<std::uint32_t>(w);
    words[2 * i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Gen>
inline double uniform01(Gen& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Exponential variate with the given mean (inverse transform).
template <class Gen>
inline double sample_exponential(Gen& gen, double mean) {
  return -mean * std::log1p(-uniform01(gen));
}

}  // namespace qnetsim

#endif  // QNETSIM_RNG_HPP
