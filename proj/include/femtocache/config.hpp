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

#ifndef FEMTOCACHE_CONFIG_HPP_
#define FEMTOCACHE_CONFIG_HPP_

// Scenario and video-experiment configuration, read from JSON.
//
// Every object is closed: unknown keys are rejected. Omitted keys take the
// defaults below, and to_json() writes the fully resolved configuration so a
// run summary records every knob that was in effect.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "femtocache/bandit.hpp"
#include "femtocache/channel.hpp"
#include "femtocache/popularity.hpp"
#include "femtocache/rateless.hpp"

namespace femtocache::config {

inline constexpr int kSchemaVersion = 1;

// Units of the alive threshold and of the GLR minimum jump.
//   kPerUser:   catalog intensity units; the running mean of the counts is
//               divided by E[X] * rate_scale and the minimum jump is
//               multiplied by it;
//   kAggregate: raw per-slot request counts.
enum class AliveMode { kPerUser, kAggregate };

// Whether the greedy baselines share the change-triggered cache updates of
// the mortal UCB policy or keep the initial placement for the whole run.
enum class BaselineCache { kStatic, kAdaptive };

// Which requests make up the requester set of a round.
enum class PendingRequests { kPreviousRound, kUntilBroadcast };

struct ChannelConfig {
  double noise_power = 0.7;
  double min_rate_nats = 0.6931471805599453;  // one bit per channel use
  double beta_min = 0.5;                      // per-user beta, log-uniform
  double beta_max = 2.0;
  std::vector<channel::Interferer> interferers;  // fixed worst-case SBSs
};

struct DetectorConfig {
  popularity::GlrConfig glr;
  int bootstrap = 200;  // T
  double alive_threshold = 0.5;
  AliveMode alive_mode = AliveMode::kAggregate;
};

struct ScenarioConfig {
  std::string name = "scenario";
  channel::CellGeometry geometry{0.3, 38.0};
  ChannelConfig channel;
  std::vector<double> powers{1.0, 2.0, 4.0};
  std::vector<rateless::FileSpec> files;
  double kappa = 3.0;  // D = ceil(kappa * L')
  double delta = 0.95;  // recovery probability after L' packets
  double request_rate_scale = 0.05;
  PendingRequests pending = PendingRequests::kPreviousRound;
  DetectorConfig detector;
  int cache_capacity = 15;
  int resolve_interval = 1;  // re-solve on alarms every this many rounds
  BaselineCache baseline_cache = BaselineCache::kStatic;
  bandit::PolicyParams bandit;
  std::int64_t horizon = 5000;
  std::vector<std::uint64_t> seeds{1};
  bandit::PolicyKind policy = bandit::PolicyKind::kBandit;
  bool record_detector_trace = false;
  bool record_arm_values = false;

  // Throws ConfigError.
  void validate() const;
};

ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::filesystem::path& path);
nlohmann::json to_json(const ScenarioConfig& config);

// FNV-1a over the canonical JSON of the configuration without the run
// selection (seeds and policy), as 16 hex digits.
std::string scenario_hash(const ScenarioConfig& config);

struct VideoConfig {
  std::string name = "video";
  int segments = 100;
  int blocks = 2;
  int overhead = 0;
  std::vector<double> deadlines{2.5, 3.0, 4.0};  // per-segment multipliers
  std::vector<double> sinr_db;                   // grid, ascending
  double min_rate_nats = 0.6931471805599453;
  std::size_t runs = 10000;
  std::uint64_t seed = 1;

  int decode_threshold() const { return blocks + overhead; }
  void validate() const;
};

// The SINR grid may be given as a list ("sinr_db": [...]) or as
// {"start": a, "stop": b, "points": n}, evenly spaced and inclusive.
VideoConfig parse_video(const nlohmann::json& doc);
VideoConfig load_video(const std::filesystem::path& path);
nlohmann::json to_json(const VideoConfig& config);
std::string video_hash(const VideoConfig& config);

std::string fnv1a_hex(const std::string& text);

}  // namespace femtocache::config

#endif  // FEMTOCACHE_CONFIG_HPP_
