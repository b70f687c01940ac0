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

#include "femtocache/placement.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "femtocache/error.hpp"

namespace femtocache::placement {

void PlacementProblem::validate() const {
  if (capacity < 0) throw InvalidArgument("cache capacity must be >= 0");
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].size <= 0) throw InvalidArgument("item sizes must be > 0");
    if (!(items[i].value > 0.0)) {
      throw InvalidArgument("item values must be > 0");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (items[j].file == items[i].file) {
        throw InvalidArgument("duplicate file in placement problem");
      }
    }
  }
}

namespace {

bool same_value(double a, double b) {
  return std::abs(a - b) <=
         kValueTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

KnapsackSolution solve_knapsack(const PlacementProblem& problem) {
  problem.validate();
  if (problem.items.empty()) throw EmptyAliveSet("no alive file to cache");

  std::vector<PlacementItem> items = problem.items;
  std::sort(items.begin(), items.end(),
            [](const PlacementItem& a, const PlacementItem& b) {
              return a.file < b.file;
            });
  const std::size_t n = items.size();
  const auto cap = static_cast<std::size_t>(problem.capacity);

  // best[i][c]: optimum over items i.. with capacity c.
  std::vector<std::vector<double>> best(n + 1,
                                        std::vector<double>(cap + 1, 0.0));
  for (std::size_t i = n; i-- > 0;) {
    const auto s = static_cast<std::size_t>(items[i].size);
    for (std::size_t c = 0; c <= cap; ++c) {
      double v = best[i + 1][c];
      if (s <= c) v = std::max(v, items[i].value + best[i + 1][c - s]);
      best[i][c] = v;
    }
  }

  // Walking forward and taking each item whenever it is still optimal yields
  // the lexicographically smallest optimal id list.
  KnapsackSolution solution;
  std::size_t c = cap;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = static_cast<std::size_t>(items[i].size);
    if (s <= c && same_value(items[i].value + best[i + 1][c - s], best[i][c])) {
      solution.files.push_back(items[i].file);
      solution.value += items[i].value;
      solution.used += items[i].size;
      c -= s;
    }
  }
  return solution;
}

PlacementProblem make_problem(std::span<const int> sizes,
                              std::span<const double> estimates,
                              const popularity::AliveSet& alive,
                              int capacity) {
  PlacementProblem problem;
  problem.capacity = capacity;
  for (std::size_t f : alive.members) {
    if (f >= sizes.size() || f >= estimates.size()) {
      throw InvalidArgument("alive file without size or estimate");
    }
    problem.items.push_back({f, sizes[f], estimates[f]});
  }
  return problem;
}

bool CacheState::contains(std::size_t file) const {
  return std::binary_search(contents.begin(), contents.end(), file);
}

int CacheState::used(std::span<const int> sizes) const {
  int total = 0;
  for (std::size_t f : contents) total += sizes[f];
  return total;
}

CacheState update_cache(const CacheState& cache, std::span<const bool> alarms,
                        std::span<const double> estimates,
                        const popularity::AliveSet& alive,
                        std::span<const int> sizes, std::int64_t epoch) {
  if (std::none_of(alarms.begin(), alarms.end(), [](bool b) { return b; })) {
    return cache;
  }
  const KnapsackSolution solution = solve_knapsack(
      make_problem(sizes, estimates, alive, cache.capacity));
  CacheState next;
  next.capacity = cache.capacity;
  next.contents = solution.files;
  next.epoch = epoch;
  return next;
}

FetchDelta fetch_delta(const CacheState& before, const CacheState& after,
                       std::span<const int> sizes) {
  FetchDelta delta;
  std::set_difference(after.contents.begin(), after.contents.end(),
                      before.contents.begin(), before.contents.end(),
                      std::back_inserter(delta.added));
  std::set_difference(before.contents.begin(), before.contents.end(),
                      after.contents.begin(), after.contents.end(),
                      std::back_inserter(delta.removed));
  for (std::size_t f : delta.added) delta.backhaul += sizes[f];
  return delta;
}

}  // namespace femtocache::placement
