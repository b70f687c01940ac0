// Copyright 2026 The femtocache Authors
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

#ifndef FEMTOCACHE_RNG_HPP_
#define FEMTOCACHE_RNG_HPP_

#include <cstdint>
#include <random>

namespace femtocache {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to decorrelate seeds derived from a common base.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for substream `stream` (and optional `index`) of a run seeded with `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                    std::uint64_t index = 0) {
  return mix64(mix64(mix64(base) ^ (stream * 0xd1b54a32d192ed03ULL)) ^ index);
}

inline Rng make_rng(std::uint64_t base, std::uint64_t stream,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(base, stream, index));
}

// Uniform on (0, 1]; safe as the argument of a logarithm.
inline double uniform_open_closed(Rng& rng) {
  return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Named substreams. Keeping the request and setup streams separate from the
// broadcast and policy streams is what makes different policies see the same
// users, links and request sequence for a given seed.
namespace streams {
inline constexpr std::uint64_t kSetup = 1;
inline constexpr std::uint64_t kRequests = 2;
inline constexpr std::uint64_t kBroadcast = 3;
inline constexpr std::uint64_t kPolicy = 4;
inline constexpr std::uint64_t kMonteCarlo = 5;
}  // namespace streams

}  // namespace femtocache

#endif  // FEMTOCACHE_RNG_HPP_
