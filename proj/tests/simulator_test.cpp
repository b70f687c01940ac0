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

#include "femtocache/simulator.hpp"

#include <algorithm>
#include <filesystem>
#include <vector>

#include <gtest/gtest.h>

#include "femtocache/config.hpp"
#include "femtocache/error.hpp"

namespace femtocache::simulator {
namespace {

using bandit::PolicyKind;

const std::filesystem::path kSource = FEMTOCACHE_SOURCE_DIR;

config::ScenarioConfig reference(std::int64_t horizon) {
  auto c = config::load_scenario(kSource / "configs/reference_scenario.json");
  c.horizon = horizon;
  return c;
}

TEST(Scenario, HorizonEqualToBootstrapHasNoRounds) {
  auto c = reference(200);
  const auto trace = run_scenario(c, 1, PolicyKind::kBandit);
  EXPECT_TRUE(trace.rounds.empty());
  EXPECT_EQ(trace.requests.size(), 200u);
  EXPECT_EQ(trace.slots_consumed, 200);
  const auto m = compute_metrics(trace, c);
  EXPECT_EQ(m.rounds, 0u);
  EXPECT_EQ(m.energy, 0.0);
  EXPECT_EQ(m.mean_utility, 0.0);
  EXPECT_EQ(tail_utility(trace, 0.2), 0.0);
}

TEST(Scenario, SingleArmHasNoRegret) {
  auto c = reference(1000);
  c.files.resize(1);
  c.powers = {2.0};
  const auto trace = run_scenario(c, 3, PolicyKind::kBandit);
  ASSERT_FALSE(trace.rounds.empty());
  EXPECT_EQ(compute_metrics(trace, c).cumulative_regret, 0.0);
}

TEST(Scenario, SlotAccountingAndEnergyConservation) {
  const auto c = reference(1500);
  for (auto kind : {PolicyKind::kBandit, PolicyKind::kEpsFixed}) {
    const auto trace = run_scenario(c, 5, kind);
    std::int64_t slots = trace.bootstrap_slots + trace.idle_slots;
    double energy = 0.0;
    std::int64_t expected_start = trace.bootstrap_slots;
    for (const auto& r : trace.rounds) {
      slots += r.duration;
      EXPECT_EQ(r.end_slot - r.start_slot, r.duration);
      EXPECT_GE(r.start_slot, expected_start);
      expected_start = r.end_slot;
      EXPECT_EQ(r.energy, r.power * r.duration);
      energy += r.power * r.duration;
    }
    EXPECT_EQ(slots, trace.slots_consumed);
    EXPECT_GE(trace.slots_consumed, c.horizon);
    EXPECT_EQ(compute_metrics(trace, c).energy, energy);
  }
}

TEST(Scenario, RegretLedgerMatchesTrace) {
  const auto trace = run_scenario(reference(1500), 2, PolicyKind::kBandit);
  double cumulative = 0.0;
  for (const auto& r : trace.rounds) {
    cumulative += r.oracle_expected - r.expected;
    EXPECT_EQ(r.cumulative_regret, cumulative);
  }
}

TEST(Scenario, SameSeedIsDeterministic) {
  const auto c = reference(1200);
  const auto a = run_scenario(c, 11, PolicyKind::kBandit);
  const auto b = run_scenario(c, 11, PolicyKind::kBandit);
  ASSERT_EQ(a.rounds.size(), b.rounds.size());
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    EXPECT_EQ(a.rounds[i].arm, b.rounds[i].arm);
    EXPECT_EQ(a.rounds[i].reward, b.rounds[i].reward);
  }
  EXPECT_EQ(a.requests, b.requests);
}

TEST(Scenario, PoliciesShareUsersAndRequests) {
  const auto c = reference(1200);
  const PolicyKind kinds[] = {PolicyKind::kBandit, PolicyKind::kGreedy,
                              PolicyKind::kOracle};
  const auto traces = run_baseline_suite(c, 4, kinds, Execution::kParallel);
  for (const auto& t : traces) {
    EXPECT_EQ(t.users, traces[0].users);
    EXPECT_EQ(t.user_beta, traces[0].user_beta);
    const std::size_t n = std::min(t.requests.size(), traces[0].requests.size());
    EXPECT_TRUE(std::equal(t.requests.begin(), t.requests.begin() + n,
                           traces[0].requests.begin()));
  }
  const auto serial = run_baseline_suite(c, 4, kinds, Execution::kSerial);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    EXPECT_EQ(serial[i].rounds.size(), traces[i].rounds.size());
    EXPECT_EQ(compute_metrics(serial[i], c).energy,
              compute_metrics(traces[i], c).energy);
  }
}

TEST(Scenario, StaticBaselinesKeepTheInitialCache) {
  auto c = reference(3500);
  const auto greedy = run_scenario(c, 1, PolicyKind::kGreedy);
  EXPECT_EQ(greedy.cache_events.size(), 1u);
  for (const auto& r : greedy.rounds) EXPECT_FALSE(r.cache_updated);
  c.baseline_cache = config::BaselineCache::kAdaptive;
  EXPECT_GT(run_scenario(c, 1, PolicyKind::kGreedy).cache_events.size(), 1u);
  EXPECT_GT(run_scenario(c, 1, PolicyKind::kBandit).cache_events.size(), 1u);
}

TEST(Scenario, OracleHasZeroRegret) {
  const auto c = reference(1500);
  const auto trace = run_scenario(c, 6, PolicyKind::kOracle);
  EXPECT_EQ(compute_metrics(trace, c).cumulative_regret, 0.0);
}

TEST(Metrics, DetectionsComeFromAlarmRows) {
  const auto c = reference(3500);
  const auto trace = run_scenario(c, 1, PolicyKind::kBandit);
  const auto m = compute_metrics(trace, c);
  ASSERT_EQ(m.detections.size(), true_changes(c).size());
  std::uint64_t false_alarms = 0;
  for (auto n : m.false_alarms) false_alarms += n;
  std::size_t detected = 0;
  for (const auto& d : m.detections) {
    if (!d.detected) continue;
    ++detected;
    EXPECT_EQ(d.delay, d.alarm_slot - d.change.slot);
    bool found = false;
    for (const auto& a : trace.alarms) {
      found |= a.file == d.change.file && a.slot == d.alarm_slot;
    }
    EXPECT_TRUE(found);
  }
  EXPECT_EQ(detected + false_alarms, trace.alarms.size());
}

TEST(Metrics, SegmentsFollowTheSchedule) {
  const auto c = reference(3500);
  const auto m = compute_metrics(run_scenario(c, 1, PolicyKind::kOracle), c);
  EXPECT_EQ(m.segment_starts, (std::vector<std::int64_t>{0, 1500, 3000}));
  EXPECT_EQ(m.modal_actions.size(), 3u);
}

TEST(Metrics, TailUtilityValidatesFraction) {
  const auto trace = run_scenario(reference(600), 1, PolicyKind::kBandit);
  EXPECT_THROW(tail_utility(trace, 0.0), InvalidArgument);
  EXPECT_THROW(tail_utility(trace, 1.5), InvalidArgument);
  EXPECT_NEAR(tail_utility(trace, 1.0),
              compute_metrics(trace, reference(600)).mean_utility, 1e-12);
}

config::VideoConfig small_video() {
  config::VideoConfig v;
  v.segments = 40;
  v.runs = 2000;
  v.sinr_db = {-10, 0, 5, 10, 20, 30};
  return v;
}

TEST(Video, PerfectChannelNeverMissesADeadline) {
  auto v = small_video();
  v.sinr_db = {200};
  for (const auto& row : run_video_experiment(v)) EXPECT_EQ(row.outage, 0.0);
}

TEST(Video, HugeDeadlineNeverMisses) {
  auto v = small_video();
  v.deadlines = {1e6};
  for (const auto& row : run_video_experiment(v)) EXPECT_EQ(row.outage, 0.0);
}

TEST(Video, CurvesAreMonotoneAndOrdered) {
  const auto v = small_video();
  const auto rows = run_video_experiment(v);
  ASSERT_EQ(rows.size(), v.deadlines.size() * v.sinr_db.size());
  const std::size_t n = v.sinr_db.size();
  for (std::size_t d = 0; d < v.deadlines.size(); ++d) {
    for (std::size_t i = 1; i < n; ++i) {
      EXPECT_LE(rows[d * n + i].outage, rows[d * n + i - 1].outage);
    }
    if (d > 0) {
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_LE(rows[d * n + i].outage, rows[(d - 1) * n + i].outage + 0.01);
      }
    }
  }
  EXPECT_EQ(run_video_experiment(v, Execution::kSerial).back().outage,
            rows.back().outage);
}

}  // namespace
}  // namespace femtocache::simulator
