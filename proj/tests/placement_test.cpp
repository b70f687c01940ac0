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

#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "femtocache/error.hpp"
#include "femtocache/oracles.hpp"

namespace femtocache::placement {
namespace {

// Ten-file catalogue: sizes and the three popularity phases.
const std::vector<int> kSizes{1, 1, 2, 5, 6, 3, 5, 4, 3, 7};
const std::vector<double> kBefore{5, 6, 3, 4, 6, 0.1, 1, 4, 7, 5};
const std::vector<double> kAfterFirst{5, 0.1, 3, 4, 6, 0.1, 1, 4, 7, 5};
constexpr std::size_t kA = 0, kB = 1, kI = 8;

PlacementProblem random_problem(Rng& rng, int max_items, int max_size,
                                int max_capacity) {
  PlacementProblem p;
  const int n = std::uniform_int_distribution<int>(1, max_items)(rng);
  p.capacity = std::uniform_int_distribution<int>(0, max_capacity)(rng);
  for (int f = 0; f < n; ++f) {
    p.items.push_back(
        {static_cast<std::size_t>(f),
         std::uniform_int_distribution<int>(1, max_size)(rng),
         std::uniform_int_distribution<int>(1, 6)(rng) * 0.5});
  }
  return p;
}

TEST(Knapsack, ReferenceCatalogueOptimum) {
  const auto alive = popularity::update_alive(kBefore, 0.5);
  const auto problem = make_problem(kSizes, kBefore, alive, 15);
  const auto dp = solve_knapsack(problem);
  const auto brute = oracles::brute_force_knapsack(problem);
  EXPECT_EQ(dp.files, (std::vector<std::size_t>{0, 1, 4, 7, 8}));
  EXPECT_EQ(dp.files, brute.files);
  EXPECT_DOUBLE_EQ(dp.value, 28.0);
  EXPECT_EQ(dp.used, 15);
}

TEST(Knapsack, TrivialCases) {
  PlacementProblem p{{{0, 2, 1.0}, {1, 3, 2.0}}, 0};
  auto s = solve_knapsack(p);
  EXPECT_TRUE(s.files.empty());
  EXPECT_EQ(s.value, 0.0);
  p = {{{0, 9, 5.0}}, 4};
  EXPECT_TRUE(solve_knapsack(p).files.empty());
  p.items.clear();
  EXPECT_THROW(solve_knapsack(p), EmptyAliveSet);
}

TEST(Knapsack, RejectsInvalidItems) {
  PlacementProblem p{{{0, 0, 1.0}}, 5};
  EXPECT_THROW(solve_knapsack(p), InvalidArgument);
  p = {{{0, 1, 0.0}}, 5};
  EXPECT_THROW(solve_knapsack(p), InvalidArgument);
  p = {{{0, 1, 1.0}, {0, 2, 1.0}}, 5};
  EXPECT_THROW(solve_knapsack(p), InvalidArgument);
  p = {{{0, 1, 1.0}}, -1};
  EXPECT_THROW(solve_knapsack(p), InvalidArgument);
}

TEST(Knapsack, TiesGoToTheSmallestIdList) {
  // {0, 3} and {1, 2} both reach 4 with capacity 4.
  PlacementProblem p{{{3, 2, 2.0}, {2, 2, 2.0}, {1, 2, 2.0}, {0, 2, 2.0}}, 4};
  EXPECT_EQ(solve_knapsack(p).files, (std::vector<std::size_t>{0, 1}));
}

TEST(Knapsack, MatchesBruteForceOnRandomInstances) {
  Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_problem(rng, 15, 20, 30);
    const auto dp = solve_knapsack(p);
    const auto brute = oracles::brute_force_knapsack(p);
    ASSERT_EQ(dp.files, brute.files) << "instance " << i;
    ASSERT_NEAR(dp.value, brute.value, 1e-9);
    ASSERT_LE(dp.used, p.capacity);
  }
}

TEST(Knapsack, ValueNondecreasingInCapacity) {
  Rng rng(22);
  for (int i = 0; i < 100; ++i) {
    auto p = random_problem(rng, 12, 8, 0);
    double previous = 0.0;
    for (int c = 0; c <= 40; ++c) {
      p.capacity = c;
      const double v = solve_knapsack(p).value;
      EXPECT_GE(v, previous - 1e-12);
      previous = v;
    }
  }
}

TEST(UpdateCache, NoAlarmKeepsEverything) {
  const auto alive = popularity::update_alive(kBefore, 0.5);
  CacheState cache{15, {0, 1, 4, 7, 8}, 3};
  const bool none[10] = {};
  const auto next = update_cache(cache, none, kBefore, alive, kSizes, 9);
  EXPECT_EQ(next.contents, cache.contents);
  EXPECT_EQ(next.epoch, 3);
}

TEST(UpdateCache, FirstChangeEvictsB) {
  CacheState cache{15, {0, 1, 4, 7, 8}, 0};
  bool flags[10] = {};
  flags[kB] = true;
  const auto alive = popularity::update_alive(kAfterFirst, 0.5);
  const auto next = update_cache(cache, flags, kAfterFirst, alive, kSizes, 7);
  EXPECT_FALSE(next.contains(kB));
  EXPECT_EQ(next.epoch, 7);
  EXPECT_LE(next.used(kSizes), 15);
  const auto brute = oracles::brute_force_knapsack(
      make_problem(kSizes, kAfterFirst, alive, 15));
  EXPECT_EQ(next.contents, brute.files);
}

TEST(UpdateCache, UnchangedOptimumAdvancesEpochOnly) {
  const auto alive = popularity::update_alive(kBefore, 0.5);
  CacheState cache{15, {0, 1, 4, 7, 8}, 2};
  bool flags[10] = {};
  flags[kA] = true;
  const auto next = update_cache(cache, flags, kBefore, alive, kSizes, 5);
  EXPECT_EQ(next.contents, cache.contents);
  EXPECT_EQ(next.epoch, 5);
  EXPECT_EQ(fetch_delta(cache, next, kSizes).backhaul, 0);
}

TEST(UpdateCache, EmptyAliveSetPropagates) {
  const auto alive = popularity::update_alive(kBefore, 100.0);
  CacheState cache{15, {0}, 0};
  bool flags[10] = {true};
  EXPECT_THROW(update_cache(cache, flags, kBefore, alive, kSizes, 1),
               EmptyAliveSet);
}

TEST(FetchDelta, Examples) {
  CacheState a{15, {kA, kB}, 0};
  EXPECT_EQ(fetch_delta(a, a, kSizes).backhaul, 0);
  EXPECT_TRUE(fetch_delta(a, a, kSizes).added.empty());

  CacheState b{15, {kA, kI}, 1};
  const auto d = fetch_delta(a, b, kSizes);
  EXPECT_EQ(d.added, (std::vector<std::size_t>{kI}));
  EXPECT_EQ(d.removed, (std::vector<std::size_t>{kB}));
  EXPECT_EQ(d.backhaul, 3);

  CacheState empty{15, {}, 0};
  EXPECT_EQ(fetch_delta(empty, b, kSizes).backhaul, 1 + 3);
}

}  // namespace
}  // namespace femtocache::placement
