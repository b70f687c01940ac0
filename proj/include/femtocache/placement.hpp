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

#ifndef FEMTOCACHE_PLACEMENT_HPP_
#define FEMTOCACHE_PLACEMENT_HPP_

// Cache placement: a 0-1 knapsack over the alive files with the estimated
// intensities as item values, re-solved only when a detector has fired.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "femtocache/popularity.hpp"

namespace femtocache::placement {

struct PlacementItem {
  std::size_t file = 0;
  int size = 1;        // storage units, > 0
  double value = 0.0;  // estimated intensity, > 0
};

struct PlacementProblem {
  std::vector<PlacementItem> items;  // distinct file ids
  int capacity = 0;

  void validate() const;
};

struct KnapsackSolution {
  std::vector<std::size_t> files;  // ascending
  double value = 0.0;
  int used = 0;
};

// Values closer than this (relative) are treated as equal when breaking
// ties between optima.
inline constexpr double kValueTieTolerance = 1e-9;

// Exact optimum by dynamic programming over capacity. Among optimal subsets
// the lexicographically smallest ascending id list is returned. Throws
// EmptyAliveSet when there are no items.
KnapsackSolution solve_knapsack(const PlacementProblem& problem);

// Items for every alive file, valued by its estimate.
PlacementProblem make_problem(std::span<const int> sizes,
                              std::span<const double> estimates,
                              const popularity::AliveSet& alive, int capacity);

struct CacheState {
  int capacity = 0;
  std::vector<std::size_t> contents;  // ascending
  std::int64_t epoch = 0;             // round of the last re-solve

  bool contains(std::size_t file) const;
  int used(std::span<const int> sizes) const;
};

// Re-solves when any alarm flag is set and stamps the result with `epoch`;
// otherwise returns `cache` unchanged. Propagates EmptyAliveSet.
CacheState update_cache(const CacheState& cache, std::span<const bool> alarms,
                        std::span<const double> estimates,
                        const popularity::AliveSet& alive,
                        std::span<const int> sizes, std::int64_t epoch);

struct FetchDelta {
  std::vector<std::size_t> added;
  std::vector<std::size_t> removed;
  std::int64_t backhaul = 0;  // total size of added files
};

FetchDelta fetch_delta(const CacheState& before, const CacheState& after,
                       std::span<const int> sizes);

}  // namespace femtocache::placement

#endif  // FEMTOCACHE_PLACEMENT_HPP_
