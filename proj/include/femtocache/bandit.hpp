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

#ifndef FEMTOCACHE_BANDIT_HPP_
#define FEMTOCACHE_BANDIT_HPP_

// Mortal-arms UCB over (file, power level) pairs, the greedy-family and
// oracle baselines, and regret bookkeeping.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "femtocache/rateless.hpp"
#include "femtocache/rng.hpp"

namespace femtocache::bandit {

struct ArmId {
  std::size_t file = 0;
  std::size_t power = 0;  // index into the power set

  auto operator<=>(const ArmId&) const = default;
};

struct ArmStats {
  std::uint64_t plays = 0;  // V
  double mean_reward = 0.0;
};

// mean + beta * sqrt(zeta * ln(round) / plays). The round is real-valued so
// the index can be evaluated between integer rounds.
double ucb_index(const ArmStats& stats, double round, double beta,
                 double zeta);

using ArmMap = std::map<ArmId, ArmStats>;

// Largest index among the arms; ties go to the lowest id. Throws NoLiveArms
// when `arms` is empty or an arm has never been played.
ArmId select_arm(const ArmMap& arms, std::int64_t round, double beta,
                 double zeta);

// Utility of a finished broadcast: recovered users per joule.
double round_reward(const rateless::BroadcastOutcome& outcome);

// Arms of the current cache plus the queue of arms still owed a forced play.
class ArmTable {
 public:
  explicit ArmTable(std::size_t power_levels, bool mortal = true);

  // Syncs the arms with the cache contents. When the contents differ from
  // the last sync, arms of evicted files are dropped, every surviving arm
  // has its play count reset to 1 with its mean kept, and each arm of a new
  // file is queued for a forced play. Without mortal adaptation the counts
  // are kept and only the first sync queues forced plays (the round-robin
  // warm-up of the baselines); later arrivals start unplayed with mean 0.
  // Returns whether anything changed.
  bool on_cache_change(std::span<const std::size_t> cache);

  std::optional<ArmId> next_forced() const;

  void record_reward(const ArmId& arm, double reward);
  void record_outcome(const ArmId& arm,
                      const rateless::BroadcastOutcome& outcome);

  const ArmMap& arms() const { return arms_; }
  std::vector<ArmId> live_arms() const;
  std::size_t power_levels() const { return power_levels_; }

 private:
  std::size_t power_levels_;
  bool mortal_;
  std::vector<std::size_t> cache_;
  ArmMap arms_;
  std::deque<ArmId> forced_;
  bool synced_ = false;
};

enum class PolicyKind { kBandit, kGreedy, kEpsFixed, kEpsDecreasing, kOracle };

std::string_view policy_name(PolicyKind kind);
// Accepts the CLI spellings (bandit, greedy, eps-fixed, eps-decreasing,
// oracle) and their underscore variants.
PolicyKind parse_policy(std::string_view name);

struct PolicyParams {
  double beta = 1.0;
  double zeta = 2.0;
  double epsilon = 0.1;    // eps-fixed
  double epsilon0 = 5.0;   // eps-decreasing: eps_t = min(1, epsilon0 / t)
};

struct RoundContext {
  std::int64_t round = 1;
  // Analytic expected utility of an arm this round; required by the oracle.
  std::function<double(const ArmId&)> expected_utility;
};

class SelectionPolicy {
 public:
  virtual ~SelectionPolicy() = default;
  virtual PolicyKind kind() const = 0;
  // Picks the arm for this round. Learning policies honour the forced-play
  // queue first.
  virtual ArmId select(const ArmTable& table, const RoundContext& context,
                       Rng& rng) const = 0;
};

std::unique_ptr<SelectionPolicy> make_policy(PolicyKind kind,
                                             const PolicyParams& params);

// Argmax of `utility` over the arms, lowest id on ties.
ArmId best_expected_arm(std::span<const ArmId> arms,
                        const std::function<double(const ArmId&)>& utility);

struct RegretEntry {
  std::int64_t round = 0;
  ArmId arm;
  double reward = 0.0;           // realized utility
  double chosen_expected = 0.0;  // expected utility of the chosen arm
  double oracle_expected = 0.0;  // best expected utility this round
  double cumulative = 0.0;
};

// Pseudo-regret: sum of (oracle expected - chosen expected).
class RegretLedger {
 public:
  void record(std::int64_t round, const ArmId& arm, double reward,
              double chosen_expected, double oracle_expected);
  double cumulative() const { return cumulative_; }
  const std::vector<RegretEntry>& entries() const { return entries_; }

 private:
  std::vector<RegretEntry> entries_;
  double cumulative_ = 0.0;
};

struct DecouplingCheck {
  bool ok = true;
  double cached_best = 0.0;
  double uncached_bound = 0.0;  // 0 when every file is cached
  std::optional<std::size_t> worst_file;
};

// Compares the best cached expected utility with the largest uncached bound
// expected_requesters[f] / (p_min * L'_f).
DecouplingCheck decoupling_diagnostic(
    double cached_best, std::span<const std::size_t> uncached,
    std::span<const double> expected_requesters,
    std::span<const int> decode_thresholds, double min_power);

}  // namespace femtocache::bandit

#endif  // FEMTOCACHE_BANDIT_HPP_
