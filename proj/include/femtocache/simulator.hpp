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

#ifndef FEMTOCACHE_SIMULATOR_HPP_
#define FEMTOCACHE_SIMULATOR_HPP_

// The two-phase protocol loop of one SBS: per-slot requests feed the change
// detectors; per round the cache is refreshed on alarms, an arm is chosen,
// and the file is broadcast until every requester is done or the deadline
// passes.
//
// Slot 0 .. T-1 is the initialization window. Rounds follow back to back
// from slot T until the horizon is reached (the last round may overrun it).
// The requesters of a round are the users with a pending request for the
// chosen file. With PendingRequests::kPreviousRound only requests made
// during the previous round are pending; with kUntilBroadcast a request
// stays pending until its file is broadcast. Either way the first round
// sees the requests of slot T - 1.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "femtocache/bandit.hpp"
#include "femtocache/config.hpp"
#include "femtocache/parallel.hpp"

namespace femtocache::simulator {

struct ArmSnapshot {
  bandit::ArmId arm;
  double expected = 0.0;  // analytic E[g] this round
  double mean_reward = 0.0;
  std::uint64_t plays = 0;
};

struct RoundRecord {
  std::int64_t round = 0;
  std::int64_t start_slot = 0;
  std::int64_t end_slot = 0;  // exclusive
  bandit::ArmId arm;
  double power = 0.0;
  bool forced = false;
  std::size_t requesters = 0;
  int duration = 0;
  double energy = 0.0;
  int recovered = 0;
  double reward = 0.0;
  double expected = 0.0;         // analytic E[g] of the chosen arm
  double oracle_expected = 0.0;  // best analytic E[g] over the cache
  double cumulative_regret = 0.0;
  std::vector<std::size_t> cache;   // contents used by this round
  std::vector<std::size_t> alarms;  // files that alarmed during the round
  bool cache_updated = false;       // re-solved at the end of the round
  bool decoupling_ok = true;
  std::vector<ArmSnapshot> arm_values;  // only with record_arm_values
};

struct AlarmRecord {
  std::size_t file = 0;
  std::int64_t slot = 0;
  std::int64_t change_slot = 0;
  double post_change_mean = 0.0;
  double statistic = 0.0;
};

struct CacheEvent {
  std::int64_t round = 0;  // 0 for the initial placement
  std::int64_t slot = 0;   // first slot served by the new contents
  std::vector<std::size_t> alive;
  std::vector<double> estimates;  // alive-test units, all files
  std::vector<std::size_t> contents;
  double value = 0.0;
  std::vector<std::size_t> added;
  std::vector<std::size_t> removed;
  std::int64_t backhaul = 0;
  bool solved = true;  // false when the alive set was empty
};

struct DetectorTraceRow {
  std::int64_t slot = 0;
  std::size_t file = 0;
  std::uint32_t count = 0;
  double statistic = 0.0;
  double running_mean = 0.0;
  bool alarm = false;
};

struct ScenarioTrace {
  std::string scenario_hash;
  std::uint64_t seed = 0;
  bandit::PolicyKind policy = bandit::PolicyKind::kBandit;
  std::uint64_t users = 0;
  std::vector<double> user_beta;
  std::int64_t bootstrap_slots = 0;
  std::int64_t idle_slots = 0;  // slots with nothing cached to send
  std::int64_t slots_consumed = 0;
  std::vector<RoundRecord> rounds;
  std::vector<AlarmRecord> alarms;
  std::vector<CacheEvent> cache_events;
  std::vector<std::vector<std::uint32_t>> requests;  // [slot][file]
  std::vector<DetectorTraceRow> detector_trace;
  std::vector<std::string> warnings;
};

ScenarioTrace run_scenario(const config::ScenarioConfig& config,
                           std::uint64_t seed, bandit::PolicyKind policy);
// First configured seed and the configured policy.
ScenarioTrace run_scenario(const config::ScenarioConfig& config);

// One trace per policy, all with the same seed and hence the same users,
// links and request sequence.
std::vector<ScenarioTrace> run_baseline_suite(
    const config::ScenarioConfig& config, std::uint64_t seed,
    std::span<const bandit::PolicyKind> kinds,
    Execution exec = Execution::kParallel);

// One trace per seed, in seed order.
std::vector<ScenarioTrace> run_replications(
    const config::ScenarioConfig& config, std::span<const std::uint64_t> seeds,
    bandit::PolicyKind policy, Execution exec = Execution::kParallel);

struct TrueChange {
  std::size_t file = 0;
  std::int64_t slot = 0;
  double before = 0.0;
  double after = 0.0;
};

// Schedule steps whose jump is at least the detector's minimum jump, in the
// popularity units of the file catalog.
std::vector<TrueChange> true_changes(const config::ScenarioConfig& config);

struct Detection {
  TrueChange change;
  bool detected = false;
  std::int64_t alarm_slot = 0;
  std::int64_t delay = 0;
};

struct ActionCount {
  bandit::ArmId arm;
  std::uint64_t rounds = 0;
};

struct Metrics {
  std::size_t rounds = 0;
  double mean_utility = 0.0;
  std::vector<double> running_utility;  // mean reward of rounds 1..r
  double cumulative_regret = 0.0;
  double energy = 0.0;
  std::int64_t packets = 0;
  std::int64_t backhaul = 0;  // excluding the initial fill
  std::int64_t initial_fill = 0;
  std::vector<Detection> detections;
  std::vector<std::uint64_t> false_alarms;  // per file
  std::vector<ActionCount> actions;          // ascending arm id
  // Segment boundaries are the true change slots; modal_actions[s] is the
  // most played arm among rounds starting in segment s.
  std::vector<std::int64_t> segment_starts;
  std::vector<std::optional<bandit::ArmId>> modal_actions;
};

Metrics compute_metrics(const ScenarioTrace& trace,
                        const config::ScenarioConfig& config);

// Mean realized reward over the last `fraction` of the rounds.
double tail_utility(const ScenarioTrace& trace, double fraction);

struct VideoPoint {
  double deadline = 0.0;
  double sinr_db = 0.0;
  double packet_outage = 0.0;
  double outage = 0.0;
};

// Rows ordered by deadline, then SINR.
std::vector<VideoPoint> run_video_experiment(const config::VideoConfig& config,
                                             Execution exec =
                                                 Execution::kParallel);

}  // namespace femtocache::simulator

#endif  // FEMTOCACHE_SIMULATOR_HPP_
