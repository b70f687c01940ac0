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

#include "femtocache/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "femtocache/error.hpp"

namespace femtocache::bandit {

double ucb_index(const ArmStats& stats, double round, double beta,
                 double zeta) {
  if (stats.plays == 0) throw InvalidArgument("UCB index of an unplayed arm");
  if (!(round >= 1.0)) throw InvalidArgument("rounds are numbered from 1");
  const double log_round = std::log(round);
  return stats.mean_reward +
         beta * std::sqrt(zeta * log_round / static_cast<double>(stats.plays));
}

ArmId select_arm(const ArmMap& arms, std::int64_t round, double beta,
                 double zeta) {
  if (arms.empty()) throw NoLiveArms("no arm to select");
  std::optional<ArmId> best;
  double best_index = 0.0;
  for (const auto& [id, stats] : arms) {
    if (stats.plays == 0) throw NoLiveArms("an arm has not been played yet");
    const double index =
        ucb_index(stats, static_cast<double>(round), beta, zeta);
    if (!best || index > best_index) {
      best = id;
      best_index = index;
    }
  }
  return *best;
}

double round_reward(const rateless::BroadcastOutcome& outcome) {
  if (!(outcome.energy > 0.0)) {
    throw InvalidArgument("a broadcast must consume energy");
  }
  return static_cast<double>(outcome.recovered) / outcome.energy;
}

ArmTable::ArmTable(std::size_t power_levels, bool mortal)
    : power_levels_(power_levels), mortal_(mortal) {
  if (power_levels == 0) throw InvalidArgument("power set is empty");
}

bool ArmTable::on_cache_change(std::span<const std::size_t> cache) {
  std::vector<std::size_t> contents(cache.begin(), cache.end());
  std::sort(contents.begin(), contents.end());
  contents.erase(std::unique(contents.begin(), contents.end()),
                 contents.end());
  if (synced_ && contents == cache_) return false;

  ArmMap next;
  std::deque<ArmId> queue;
  for (const ArmId& id : forced_) {
    if (std::binary_search(contents.begin(), contents.end(), id.file)) {
      queue.push_back(id);
    }
  }
  for (std::size_t f : contents) {
    for (std::size_t p = 0; p < power_levels_; ++p) {
      const ArmId id{f, p};
      auto it = arms_.find(id);
      if (it != arms_.end()) {
        ArmStats stats = it->second;
        if (mortal_) {
          stats.plays = std::min<std::uint64_t>(stats.plays, 1);
        }
        next.emplace(id, stats);
      } else {
        next.emplace(id, ArmStats{});
        if (mortal_ || !synced_) queue.push_back(id);
      }
    }
  }
  arms_ = std::move(next);
  forced_ = std::move(queue);
  cache_ = std::move(contents);
  synced_ = true;
  return true;
}

std::optional<ArmId> ArmTable::next_forced() const {
  if (forced_.empty()) return std::nullopt;
  return forced_.front();
}

void ArmTable::record_reward(const ArmId& arm, double reward) {
  auto it = arms_.find(arm);
  if (it == arms_.end()) throw InvalidArgument("reward for an unknown arm");
  if (!(reward >= 0.0)) throw InvalidArgument("rewards must be >= 0");
  ArmStats& stats = it->second;
  ++stats.plays;
  stats.mean_reward +=
      (reward - stats.mean_reward) / static_cast<double>(stats.plays);
  auto queued = std::find(forced_.begin(), forced_.end(), arm);
  if (queued != forced_.end()) forced_.erase(queued);
}

void ArmTable::record_outcome(const ArmId& arm,
                              const rateless::BroadcastOutcome& outcome) {
  record_reward(arm, round_reward(outcome));
}

std::vector<ArmId> ArmTable::live_arms() const {
  std::vector<ArmId> ids;
  ids.reserve(arms_.size());
  for (const auto& entry : arms_) ids.push_back(entry.first);
  return ids;
}

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kBandit:
      return "bandit";
    case PolicyKind::kGreedy:
      return "greedy";
    case PolicyKind::kEpsFixed:
      return "eps-fixed";
    case PolicyKind::kEpsDecreasing:
      return "eps-decreasing";
    case PolicyKind::kOracle:
      return "oracle";
  }
  return "unknown";
}

PolicyKind parse_policy(std::string_view name) {
  if (name == "bandit" || name == "ucb") return PolicyKind::kBandit;
  if (name == "greedy") return PolicyKind::kGreedy;
  if (name == "eps-fixed" || name == "eps_fixed") return PolicyKind::kEpsFixed;
  if (name == "eps-decreasing" || name == "eps_decreasing") {
    return PolicyKind::kEpsDecreasing;
  }
  if (name == "oracle") return PolicyKind::kOracle;
  throw InvalidArgument("unknown policy: " + std::string(name));
}

ArmId best_expected_arm(std::span<const ArmId> arms,
                        const std::function<double(const ArmId&)>& utility) {
  if (arms.empty()) throw NoLiveArms("no arm to select");
  ArmId best = arms.front();
  double best_value = utility(best);
  for (std::size_t i = 1; i < arms.size(); ++i) {
    const double v = utility(arms[i]);
    if (v > best_value || (v == best_value && arms[i] < best)) {
      best = arms[i];
      best_value = v;
    }
  }
  return best;
}

namespace {

ArmId greedy_choice(const ArmTable& table) {
  const ArmMap& arms = table.arms();
  if (arms.empty()) throw NoLiveArms("no arm to select");
  auto best = arms.begin();
  for (auto it = std::next(arms.begin()); it != arms.end(); ++it) {
    if (it->second.mean_reward > best->second.mean_reward) best = it;
  }
  return best->first;
}

ArmId uniform_choice(const ArmTable& table, Rng& rng) {
  const ArmMap& arms = table.arms();
  if (arms.empty()) throw NoLiveArms("no arm to select");
  std::uniform_int_distribution<std::size_t> pick(0, arms.size() - 1);
  return std::next(arms.begin(), static_cast<std::ptrdiff_t>(pick(rng)))
      ->first;
}

ArmId explore_or_exploit(const ArmTable& table, double epsilon, Rng& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) return uniform_choice(table, rng);
  return greedy_choice(table);
}

class UcbPolicy final : public SelectionPolicy {
 public:
  explicit UcbPolicy(const PolicyParams& params) : params_(params) {}
  PolicyKind kind() const override { return PolicyKind::kBandit; }
  ArmId select(const ArmTable& table, const RoundContext& context,
               Rng&) const override {
    if (auto forced = table.next_forced()) return *forced;
    return select_arm(table.arms(), context.round, params_.beta,
                      params_.zeta);
  }

 private:
  PolicyParams params_;
};

class GreedyPolicy final : public SelectionPolicy {
 public:
  PolicyKind kind() const override { return PolicyKind::kGreedy; }
  ArmId select(const ArmTable& table, const RoundContext&,
               Rng&) const override {
    if (auto forced = table.next_forced()) return *forced;
    return greedy_choice(table);
  }
};

class EpsFixedPolicy final : public SelectionPolicy {
 public:
  explicit EpsFixedPolicy(double epsilon) : epsilon_(epsilon) {}
  PolicyKind kind() const override { return PolicyKind::kEpsFixed; }
  ArmId select(const ArmTable& table, const RoundContext&,
               Rng& rng) const override {
    if (auto forced = table.next_forced()) return *forced;
    return explore_or_exploit(table, epsilon_, rng);
  }

 private:
  double epsilon_;
};

class EpsDecreasingPolicy final : public SelectionPolicy {
 public:
  explicit EpsDecreasingPolicy(double epsilon0) : epsilon0_(epsilon0) {}
  PolicyKind kind() const override { return PolicyKind::kEpsDecreasing; }
  ArmId select(const ArmTable& table, const RoundContext& context,
               Rng& rng) const override {
    if (auto forced = table.next_forced()) return *forced;
    const double epsilon =
        std::min(1.0, epsilon0_ / static_cast<double>(context.round));
    return explore_or_exploit(table, epsilon, rng);
  }

 private:
  double epsilon0_;
};

class OraclePolicy final : public SelectionPolicy {
 public:
  PolicyKind kind() const override { return PolicyKind::kOracle; }
  ArmId select(const ArmTable& table, const RoundContext& context,
               Rng&) const override {
    if (!context.expected_utility) {
      throw InvalidArgument("the oracle needs expected utilities");
    }
    const std::vector<ArmId> arms = table.live_arms();
    return best_expected_arm(arms, context.expected_utility);
  }
};

}  // namespace

std::unique_ptr<SelectionPolicy> make_policy(PolicyKind kind,
                                             const PolicyParams& params) {
  switch (kind) {
    case PolicyKind::kBandit:
      if (!(params.beta >= 0.0) || !(params.zeta >= 0.0)) {
        throw InvalidArgument("UCB constants must be >= 0");
      }
      return std::make_unique<UcbPolicy>(params);
    case PolicyKind::kGreedy:
      return std::make_unique<GreedyPolicy>();
    case PolicyKind::kEpsFixed:
      if (!(params.epsilon >= 0.0 && params.epsilon <= 1.0)) {
        throw InvalidArgument("epsilon must lie in [0, 1]");
      }
      return std::make_unique<EpsFixedPolicy>(params.epsilon);
    case PolicyKind::kEpsDecreasing:
      if (!(params.epsilon0 >= 0.0)) {
        throw InvalidArgument("epsilon0 must be >= 0");
      }
      return std::make_unique<EpsDecreasingPolicy>(params.epsilon0);
    case PolicyKind::kOracle:
      return std::make_unique<OraclePolicy>();
  }
  throw InvalidArgument("unknown policy kind");
}

void RegretLedger::record(std::int64_t round, const ArmId& arm, double reward,
                          double chosen_expected, double oracle_expected) {
  cumulative_ += oracle_expected - chosen_expected;
  entries_.push_back(
      {round, arm, reward, chosen_expected, oracle_expected, cumulative_});
}

DecouplingCheck decoupling_diagnostic(
    double cached_best, std::span<const std::size_t> uncached,
    std::span<const double> expected_requesters,
    std::span<const int> decode_thresholds, double min_power) {
  if (!(min_power > 0.0)) throw InvalidArgument("minimum power must be > 0");
  DecouplingCheck check;
  check.cached_best = cached_best;
  for (std::size_t f : uncached) {
    const double bound = expected_requesters[f] /
                         (min_power * static_cast<double>(decode_thresholds[f]));
    if (!check.worst_file || bound > check.uncached_bound) {
      check.uncached_bound = bound;
      check.worst_file = f;
    }
  }
  check.ok = !check.worst_file || cached_best >= check.uncached_bound;
  return check;
}

}  // namespace femtocache::bandit
