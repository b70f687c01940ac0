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
#include <cmath>
#include <map>
#include <memory>
#include <random>

#include <fmt/format.h>

#include "femtocache/channel.hpp"
#include "femtocache/error.hpp"
#include "femtocache/kernels.hpp"
#include "femtocache/placement.hpp"
#include "femtocache/popularity.hpp"
#include "femtocache/rateless.hpp"
#include "femtocache/rng.hpp"

namespace femtocache::simulator {
namespace {

using bandit::ArmId;

// One replication of the protocol.
class Run {
 public:
  Run(const config::ScenarioConfig& config, std::uint64_t seed,
      bandit::PolicyKind kind)
      : config_(config),
        seed_(seed),
        files_(config.files.size()),
        policy_(bandit::make_policy(kind, config.bandit)),
        policy_rng_(make_rng(seed, streams::kPolicy)),
        arms_(config.powers.size(), kind == bandit::PolicyKind::kBandit),
        adapts_cache_(kind == bandit::PolicyKind::kBandit ||
                      kind == bandit::PolicyKind::kOracle ||
                      config.baseline_cache ==
                          config::BaselineCache::kAdaptive) {
    trace_.scenario_hash = config::scenario_hash(config);
    trace_.seed = seed;
    trace_.policy = kind;
    trace_.bootstrap_slots = config.detector.bootstrap;
    for (const auto& f : config.files) sizes_.push_back(f.size);
  }

  ScenarioTrace execute() {
    draw_users();
    bootstrap();
    if (users_ == 0) {
      trace_.warnings.push_back(
          "no users in the cell; no broadcast rounds are run");
      trace_.slots_consumed = slot_;
      return std::move(trace_);
    }
    std::int64_t round = 1;
    while (slot_ < config_.horizon) {
      if (cache_.contents.empty()) {
        idle_slot();
        continue;
      }
      play_round(round++);
    }
    trace_.slots_consumed = slot_;
    return std::move(trace_);
  }

 private:
  void draw_users() {
    Rng rng = make_rng(seed_, streams::kSetup);
    channel::CellGeometry geometry = config_.geometry;
    users_ = channel::draw_user_count(geometry, rng);
    trace_.users = users_;
    std::uniform_real_distribution<double> log_beta(
        std::log(config_.channel.beta_min), std::log(config_.channel.beta_max));
    for (std::uint64_t n = 0; n < users_; ++n) {
      trace_.user_beta.push_back(std::exp(log_beta(rng)));
    }

    const std::size_t levels = config_.powers.size();
    outages_.assign(levels, std::vector<double>(users_, 0.0));
    for (std::size_t p = 0; p < levels; ++p) {
      for (std::uint64_t n = 0; n < users_; ++n) {
        channel::LinkBudget link;
        link.serving_beta = trace_.user_beta[n];
        link.interferers = config_.channel.interferers;
        link.noise_power = config_.channel.noise_power;
        outages_[p][n] = channel::outage_probability(
            config_.powers[p], config_.channel.min_rate_nats, link);
      }
    }

    for (const auto& f : config_.files) {
      const int threshold = f.decode_threshold();
      delivery_.push_back(
          {rateless::deadline_for(threshold, config_.kappa), config_.delta});
    }
    // Completion-time tables F_n(w), one per (power, file).
    cdf_tables_.assign(levels, std::vector<std::vector<double>>(files_));
    for (std::size_t p = 0; p < levels; ++p) {
      for (std::size_t f = 0; f < files_; ++f) {
        const int d = delivery_[f].deadline;
        const int threshold = config_.files[f].decode_threshold();
        auto& table = cdf_tables_[p][f];
        table.resize(users_ * static_cast<std::size_t>(d + 1));
        for (std::uint64_t n = 0; n < users_; ++n) {
          for (int w = 0; w <= d; ++w) {
            table[n * static_cast<std::size_t>(d + 1) +
                  static_cast<std::size_t>(w)] =
                rateless::completion_time_cdf(w, threshold, outages_[p][n]);
          }
        }
      }
    }

    // Per-user mode works in catalog units: counts are divided by the
    // expected count per unit of intensity, and so is the minimum jump.
    normalizer_ = config_.detector.alive_mode == config::AliveMode::kPerUser
                      ? config_.geometry.mean_user_count() *
                            config_.request_rate_scale
                      : 1.0;
    glr_ = config_.detector.glr;
    glr_.min_jump *= normalizer_;
  }

  // Requests of the current slot: counts per file, each request assigned to
  // a uniformly drawn user and buffered for the next round.
  std::vector<std::uint32_t> draw_slot_requests() {
    Rng rng = make_rng(seed_, streams::kRequests,
                       static_cast<std::uint64_t>(slot_));
    const auto counts = popularity::generate_requests(
        config_.files, users_, static_cast<double>(slot_), rng,
        config_.request_rate_scale);
    std::vector<std::uint32_t> row(files_);
    for (std::size_t f = 0; f < files_; ++f) {
      row[f] = static_cast<std::uint32_t>(counts[f]);
      if (counts[f] > 0) {
        std::uniform_int_distribution<std::uint64_t> pick(0, users_ - 1);
        for (std::uint64_t k = 0; k < counts[f]; ++k) {
          buffer_[f][pick(rng)] = true;
        }
      }
      window_intensity_[f] +=
          config_.files[f].intensity_at(static_cast<double>(slot_));
      ++window_slots_[f];
    }
    trace_.requests.push_back(row);
    return row;
  }

  void reset_buffers() {
    buffer_.assign(files_, std::vector<bool>(users_, false));
    window_intensity_.assign(files_, 0.0);
    window_slots_.assign(files_, 0);
  }

  void clear_buffer(std::size_t f) {
    buffer_[f].assign(users_, false);
    window_intensity_[f] = 0.0;
    window_slots_[f] = 0;
  }

  void bootstrap() {
    const int t = config_.detector.bootstrap;
    std::vector<std::vector<double>> counts(files_);
    for (slot_ = 0; slot_ < t; ++slot_) {
      if (slot_ == t - 1 || slot_ == 0) reset_buffers();
      const auto row = draw_slot_requests();
      for (std::size_t f = 0; f < files_; ++f) {
        counts[f].push_back(row[f]);
      }
    }
    for (std::size_t f = 0; f < files_; ++f) {
      detectors_.emplace_back(glr_, counts[f], 0);
    }
    if (users_ == 0) return;
    resolve_cache(0);
    arms_.on_cache_change(cache_.contents);
  }

  std::vector<double> estimates() const {
    std::vector<double> est(files_);
    for (std::size_t f = 0; f < files_; ++f) {
      est[f] = detectors_[f].running_mean() / normalizer_;
    }
    return est;
  }

  // Re-solves the placement and records the event. Keeps the previous cache
  // if no file is alive.
  void resolve_cache(std::int64_t round) {
    CacheEvent event;
    event.round = round;
    event.slot = slot_;
    event.estimates = estimates();
    const popularity::AliveSet alive = popularity::update_alive(
        event.estimates, config_.detector.alive_threshold);
    event.alive = alive.members;
    placement::CacheState next = cache_;
    if (round == 0) next.capacity = config_.cache_capacity;
    try {
      const auto flags = std::make_unique<bool[]>(files_);
      std::fill_n(flags.get(), files_, true);
      next = placement::update_cache(next, std::span(flags.get(), files_),
                                     event.estimates, alive, sizes_, round);
    } catch (const EmptyAliveSet&) {
      event.solved = false;
      trace_.warnings.push_back(fmt::format(
          "round {}: no alive file, previous cache kept", round));
    }
    const placement::FetchDelta delta =
        placement::fetch_delta(cache_, next, sizes_);
    cache_ = next;
    event.contents = cache_.contents;
    for (std::size_t f : cache_.contents) event.value += event.estimates[f];
    event.added = delta.added;
    event.removed = delta.removed;
    event.backhaul = delta.backhaul;
    trace_.cache_events.push_back(std::move(event));
  }

  // Feeds one slot of requests to the detectors.
  void observe_slot(std::vector<std::size_t>* alarmed) {
    const auto row = draw_slot_requests();
    for (std::size_t f = 0; f < files_; ++f) {
      auto alarm = detectors_[f].step(row[f]);
      if (config_.record_detector_trace) {
        trace_.detector_trace.push_back({slot_, f, row[f],
                                         detectors_[f].last_statistic(),
                                         detectors_[f].running_mean(),
                                         alarm.has_value()});
      }
      if (alarm) {
        trace_.alarms.push_back({f, alarm->alarm_slot, alarm->change_slot,
                                 alarm->post_change_mean / normalizer_,
                                 alarm->statistic});
        if (alarmed) alarmed->push_back(f);
      }
    }
    ++slot_;
  }

  bool any_alarm_flag() const {
    return std::any_of(detectors_.begin(), detectors_.end(),
                       [](const auto& d) { return d.alarm_flag(); });
  }

  // Baselines on a static cache still run the detectors (their alarms are
  // traced) but keep the initial placement.
  void refresh_on_alarms(std::int64_t round) {
    if (!any_alarm_flag()) return;
    if (adapts_cache_) resolve_cache(round);
    for (auto& d : detectors_) d.clear_alarm_flag();
    arms_.on_cache_change(cache_.contents);
  }

  void idle_slot() {
    observe_slot(nullptr);
    ++trace_.idle_slots;
    refresh_on_alarms(0);
  }

  double expected_utility(const ArmId& arm) {
    auto it = expected_cache_.find(arm);
    if (it != expected_cache_.end()) return it->second;
    const double pi = -std::expm1(-config_.request_rate_scale *
                                  window_intensity_[arm.file]);
    const std::vector<double> request(users_, pi);
    const double value = rateless::expected_round_utility_from_cdf(
        cdf_tables_[arm.power][arm.file], request,
        config_.files[arm.file].decode_threshold(), delivery_[arm.file],
        config_.powers[arm.power]);
    expected_cache_.emplace(arm, value);
    return value;
  }

  void play_round(std::int64_t round) {
    expected_cache_.clear();
    RoundRecord rec;
    rec.round = round;
    rec.start_slot = slot_;
    rec.cache = cache_.contents;

    bandit::RoundContext context;
    context.round = round;
    context.expected_utility = [this](const ArmId& a) {
      return expected_utility(a);
    };
    const std::vector<ArmId> live = arms_.live_arms();
    const ArmId oracle_arm =
        bandit::best_expected_arm(live, context.expected_utility);
    rec.oracle_expected = expected_utility(oracle_arm);
    const auto forced = arms_.next_forced();
    rec.arm = policy_->select(arms_, context, policy_rng_);
    rec.forced = forced && *forced == rec.arm &&
                 policy_->kind() != bandit::PolicyKind::kOracle;
    rec.expected = expected_utility(rec.arm);
    rec.power = config_.powers[rec.arm.power];
    if (config_.record_arm_values) {
      for (const auto& [id, stats] : arms_.arms()) {
        rec.arm_values.push_back(
            {id, expected_utility(id), stats.mean_reward, stats.plays});
      }
    }

    // Decoupling check against the uncached files, using the estimates.
    std::vector<std::size_t> uncached;
    std::vector<double> expected_requesters(files_, 0.0);
    std::vector<int> thresholds(files_);
    for (std::size_t f = 0; f < files_; ++f) {
      thresholds[f] = config_.files[f].decode_threshold();
      if (!cache_.contains(f)) uncached.push_back(f);
      const double per_user_rate =
          detectors_[f].running_mean() / static_cast<double>(users_);
      expected_requesters[f] =
          static_cast<double>(users_) *
          -std::expm1(-per_user_rate *
                      static_cast<double>(window_slots_[f]));
    }
    rec.decoupling_ok =
        bandit::decoupling_diagnostic(rec.oracle_expected, uncached,
                                      expected_requesters, thresholds,
                                      config_.powers.front())
            .ok;

    // The requesters are the users with a pending request for the file.
    std::vector<double> outages;
    for (std::uint64_t n = 0; n < users_; ++n) {
      if (buffer_[rec.arm.file][n]) {
        outages.push_back(outages_[rec.arm.power][n]);
      }
    }
    rec.requesters = outages.size();
    rateless::BroadcastSession session(
        std::move(outages), config_.files[rec.arm.file].decode_threshold(),
        delivery_[rec.arm.file], rec.power);
    Rng broadcast_rng = make_rng(seed_, streams::kBroadcast,
                                 static_cast<std::uint64_t>(round));
    if (config_.pending == config::PendingRequests::kPreviousRound) {
      reset_buffers();
    } else {
      clear_buffer(rec.arm.file);
    }
    while (!session.done()) {
      session.step(broadcast_rng);
      observe_slot(&rec.alarms);
    }
    const rateless::BroadcastOutcome out = session.outcome();
    rec.end_slot = slot_;
    rec.duration = out.duration;
    rec.energy = out.energy;
    rec.recovered = out.recovered;
    rec.reward = bandit::round_reward(out);
    arms_.record_outcome(rec.arm, out);
    ledger_.record(round, rec.arm, rec.reward, rec.expected,
                   rec.oracle_expected);
    rec.cumulative_regret = ledger_.cumulative();

    if (round % config_.resolve_interval == 0 && any_alarm_flag()) {
      refresh_on_alarms(round);
      rec.cache_updated = adapts_cache_;
    }
    trace_.rounds.push_back(std::move(rec));
  }

  const config::ScenarioConfig& config_;
  std::uint64_t seed_;
  std::size_t files_;
  std::unique_ptr<bandit::SelectionPolicy> policy_;
  Rng policy_rng_;
  bandit::ArmTable arms_;
  bool adapts_cache_;
  ScenarioTrace trace_;

  std::uint64_t users_ = 0;
  std::vector<std::vector<double>> outages_;  // [power][user]
  std::vector<rateless::DeliveryPolicy> delivery_;
  std::vector<std::vector<std::vector<double>>> cdf_tables_;
  std::vector<int> sizes_;
  double normalizer_ = 1.0;
  popularity::GlrConfig glr_;
  std::vector<popularity::DetectorState> detectors_;
  placement::CacheState cache_;
  bandit::RegretLedger ledger_;

  std::int64_t slot_ = 0;
  // Pending requests per file since its last broadcast, with the summed
  // intensity and the number of slots they span.
  std::vector<std::vector<bool>> buffer_;  // [file][user]
  std::vector<double> window_intensity_;
  std::vector<std::int64_t> window_slots_;
  std::map<ArmId, double> expected_cache_;
};

}  // namespace

ScenarioTrace run_scenario(const config::ScenarioConfig& config,
                           std::uint64_t seed, bandit::PolicyKind policy) {
  config.validate();
  return Run(config, seed, policy).execute();
}

ScenarioTrace run_scenario(const config::ScenarioConfig& config) {
  config.validate();
  return run_scenario(config, config.seeds.front(), config.policy);
}

std::vector<ScenarioTrace> run_baseline_suite(
    const config::ScenarioConfig& config, std::uint64_t seed,
    std::span<const bandit::PolicyKind> kinds, Execution exec) {
  config.validate();
  std::vector<ScenarioTrace> traces(kinds.size());
  for_each_index(kinds.size(), exec, [&](std::size_t i) {
    traces[i] = run_scenario(config, seed, kinds[i]);
  });
  return traces;
}

std::vector<ScenarioTrace> run_replications(
    const config::ScenarioConfig& config, std::span<const std::uint64_t> seeds,
    bandit::PolicyKind policy, Execution exec) {
  config.validate();
  std::vector<ScenarioTrace> traces(seeds.size());
  for_each_index(seeds.size(), exec, [&](std::size_t i) {
    traces[i] = run_scenario(config, seeds[i], policy);
  });
  return traces;
}

std::vector<TrueChange> true_changes(const config::ScenarioConfig& config) {
  std::vector<TrueChange> changes;
  for (std::size_t f = 0; f < config.files.size(); ++f) {
    const auto& schedule = config.files[f].schedule;
    for (std::size_t k = 1; k < schedule.size(); ++k) {
      const double jump = schedule[k].intensity - schedule[k - 1].intensity;
      if (std::abs(jump) >= config.detector.glr.min_jump && jump != 0.0) {
        changes.push_back({f, static_cast<std::int64_t>(
                                  std::ceil(schedule[k].start_time)),
                           schedule[k - 1].intensity, schedule[k].intensity});
      }
    }
  }
  return changes;
}

Metrics compute_metrics(const ScenarioTrace& trace,
                        const config::ScenarioConfig& config) {
  Metrics m;
  m.rounds = trace.rounds.size();
  double reward_sum = 0.0;
  std::map<ArmId, std::uint64_t> counts;
  for (const RoundRecord& r : trace.rounds) {
    reward_sum += r.reward;
    m.running_utility.push_back(reward_sum /
                                static_cast<double>(m.running_utility.size() + 1));
    m.energy += r.energy;
    m.packets += r.duration;
    m.cumulative_regret = r.cumulative_regret;
    ++counts[r.arm];
  }
  if (m.rounds > 0) m.mean_utility = reward_sum / static_cast<double>(m.rounds);
  for (const auto& [arm, n] : counts) m.actions.push_back({arm, n});
  for (const CacheEvent& e : trace.cache_events) {
    if (e.round == 0 && &e == &trace.cache_events.front()) {
      m.initial_fill = e.backhaul;
    } else {
      m.backhaul += e.backhaul;
    }
  }

  // Detection delays: the first alarm of a file at or after a true change
  // and before that file's next true change detects it; every other alarm
  // is false.
  const std::vector<TrueChange> changes = true_changes(config);
  const std::size_t files = config.files.size();
  m.false_alarms.assign(files, 0);
  std::vector<bool> attributed(trace.alarms.size(), false);
  for (const TrueChange& c : changes) {
    std::int64_t until = INT64_MAX;
    for (const TrueChange& other : changes) {
      if (other.file == c.file && other.slot > c.slot) {
        until = std::min(until, other.slot);
      }
    }
    Detection d;
    d.change = c;
    for (std::size_t a = 0; a < trace.alarms.size(); ++a) {
      const AlarmRecord& alarm = trace.alarms[a];
      if (alarm.file == c.file && alarm.slot >= c.slot && alarm.slot < until) {
        d.detected = true;
        d.alarm_slot = alarm.slot;
        d.delay = alarm.slot - c.slot;
        attributed[a] = true;
        break;
      }
    }
    m.detections.push_back(d);
  }
  for (std::size_t a = 0; a < trace.alarms.size(); ++a) {
    if (!attributed[a]) ++m.false_alarms[trace.alarms[a].file];
  }

  // Stationary segments from every schedule step after slot 0.
  m.segment_starts.push_back(0);
  for (const auto& f : config.files) {
    for (std::size_t k = 1; k < f.schedule.size(); ++k) {
      m.segment_starts.push_back(
          static_cast<std::int64_t>(std::ceil(f.schedule[k].start_time)));
    }
  }
  std::sort(m.segment_starts.begin(), m.segment_starts.end());
  m.segment_starts.erase(
      std::unique(m.segment_starts.begin(), m.segment_starts.end()),
      m.segment_starts.end());
  std::vector<std::map<ArmId, std::uint64_t>> per_segment(
      m.segment_starts.size());
  for (const RoundRecord& r : trace.rounds) {
    const auto it = std::upper_bound(m.segment_starts.begin(),
                                     m.segment_starts.end(), r.start_slot);
    const auto s = static_cast<std::size_t>(it - m.segment_starts.begin()) - 1;
    ++per_segment[s][r.arm];
  }
  for (const auto& seg : per_segment) {
    std::optional<ArmId> mode;
    std::uint64_t best = 0;
    for (const auto& [arm, n] : seg) {
      if (n > best) {
        best = n;
        mode = arm;
      }
    }
    m.modal_actions.push_back(mode);
  }
  return m;
}

double tail_utility(const ScenarioTrace& trace, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InvalidArgument("fraction must lie in (0, 1]");
  }
  const std::size_t n = trace.rounds.size();
  if (n == 0) return 0.0;
  const auto keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));
  double sum = 0.0;
  for (std::size_t i = n - keep; i < n; ++i) sum += trace.rounds[i].reward;
  return sum / static_cast<double>(keep);
}

std::vector<VideoPoint> run_video_experiment(const config::VideoConfig& config,
                                             Execution exec) {
  config.validate();
  std::vector<VideoPoint> rows;
  for (double deadline : config.deadlines) {
    for (double db : config.sinr_db) {
      VideoPoint p;
      p.deadline = deadline;
      p.sinr_db = db;
      p.packet_outage = kernels::packet_outage(std::pow(10.0, db / 10.0),
                                               config.min_rate_nats);
      p.outage = kernels::streaming_outage(
          p.packet_outage, deadline, config.segments,
          config.decode_threshold(), config.runs, config.seed, exec);
      rows.push_back(p);
    }
  }
  return rows;
}

}  // namespace femtocache::simulator
