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

#include "femtocache/popularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "femtocache/error.hpp"

namespace femtocache::popularity {

std::vector<std::uint64_t> generate_requests(
    std::span<const rateless::FileSpec> files, std::uint64_t users, double t,
    Rng& rng, double rate_scale) {
  std::vector<std::uint64_t> counts(files.size(), 0);
  for (std::size_t f = 0; f < files.size(); ++f) {
    const double mean =
        static_cast<double>(users) * files[f].intensity_at(t) * rate_scale;
    if (mean > 0.0) {
      std::poisson_distribution<std::uint64_t> draw(mean);
      counts[f] = draw(rng);
    }
  }
  return counts;
}

std::vector<std::uint64_t> generate_requests(
    std::span<const rateless::FileSpec> files, std::uint64_t users, double t,
    std::uint64_t seed, double rate_scale) {
  Rng rng(seed);
  return generate_requests(files, users, t, rng, rate_scale);
}

double mle_intensity(std::span<const double> samples) {
  if (samples.empty()) throw EmptySample("no samples to estimate from");
  double sum = 0.0;
  for (double s : samples) sum += s;
  return sum / static_cast<double>(samples.size());
}

void GlrConfig::validate() const {
  if (!(threshold > 0.0)) throw InvalidArgument("GLR threshold must be > 0");
  if (!(min_jump >= 0.0)) throw InvalidArgument("GLR minimum jump must be >= 0");
  if (window < 1) throw InvalidArgument("GLR window must hold a sample");
  if (!(psi_floor > 0.0)) throw InvalidArgument("GLR floor must be > 0");
}

double glr_segment_value(double count, double sum, double psi0, double psi1) {
  double value = count * (psi0 - psi1);
  if (sum > 0.0) value += sum * std::log(psi1 / psi0);
  return value;
}

SegmentSup glr_segment_sup(double count, double sum, double psi0,
                           double min_jump) {
  const double mean = sum / count;
  const double lower = psi0 - min_jump;  // admissible: (0, lower]
  const double upper = psi0 + min_jump;  // admissible: [upper, inf)
  const bool has_lower = lower > 0.0 || min_jump == 0.0;

  if (sum == 0.0) {
    // Decreasing in psi1: the supremum sits at the smallest admissible mean.
    if (has_lower) return {count * psi0, 0.0};
    return {glr_segment_value(count, sum, psi0, upper), upper};
  }
  if ((has_lower && mean <= lower) || mean >= upper) {
    return {glr_segment_value(count, sum, psi0, mean), mean};
  }
  // The unconstrained maximizer is inadmissible; by concavity the supremum
  // is at the nearer edge of an admissible half-line.
  SegmentSup best{glr_segment_value(count, sum, psi0, upper), upper};
  if (has_lower) {
    const double v = glr_segment_value(count, sum, psi0, lower);
    if (v >= best.value) best = {v, lower};
  }
  return best;
}

GlrScan glr_scan(std::span<const double> window, double psi0,
                 double min_jump) {
  GlrScan scan;
  scan.statistic = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  double count = 0.0;
  for (std::size_t k = window.size(); k-- > 0;) {
    sum += window[k];
    count += 1.0;
    const SegmentSup s = glr_segment_sup(count, sum, psi0, min_jump);
    if (s.value > scan.statistic) {
      scan.statistic = s.value;
      scan.onset = k;
      scan.psi1 = s.psi1;
    }
  }
  return scan;
}

DetectorState::DetectorState(const GlrConfig& config,
                             std::span<const double> bootstrap,
                             std::int64_t first_slot)
    : config_(config), last_change_(first_slot) {
  config_.validate();
  for (double q : bootstrap) {
    if (q < 0.0) throw InvalidArgument("request counts must be >= 0");
    sum_ += q;
  }
  count_ = bootstrap.size();
  next_slot_ = first_slot + static_cast<std::int64_t>(bootstrap.size());
  const std::size_t keep = std::min(bootstrap.size(), config_.window);
  window_.assign(bootstrap.end() - static_cast<std::ptrdiff_t>(keep),
                 bootstrap.end());
}

double DetectorState::running_mean() const {
  return count_ == 0 ? 0.0 : sum_ / static_cast<double>(count_);
}

double DetectorState::psi0() const {
  return std::max(running_mean(), config_.psi_floor);
}

std::optional<ChangeAlarm> DetectorState::step(double count) {
  if (count < 0.0) throw InvalidArgument("request counts must be >= 0");
  const std::int64_t slot = next_slot_++;
  window_.push_back(count);
  if (window_.size() > config_.window) window_.pop_front();
  sum_ += count;
  ++count_;

  const double reference = psi0();
  scratch_.assign(window_.begin(), window_.end());
  const GlrScan scan = glr_scan(scratch_, reference, config_.min_jump);
  last_statistic_ = scan.statistic;
  if (!(scan.statistic >= config_.threshold)) return std::nullopt;

  ChangeAlarm alarm;
  alarm.alarm_slot = slot;
  alarm.change_slot =
      slot - static_cast<std::int64_t>(window_.size() - 1 - scan.onset);
  alarm.post_change_mean = scan.psi1;
  alarm.statistic = scan.statistic;

  window_.erase(window_.begin(),
                window_.begin() + static_cast<std::ptrdiff_t>(scan.onset));
  sum_ = 0.0;
  for (double q : window_) sum_ += q;
  count_ = window_.size();
  last_change_ = alarm.change_slot;
  alarm_flag_ = true;
  return alarm;
}

bool AliveSet::contains(std::size_t file) const {
  return std::binary_search(members.begin(), members.end(), file);
}

AliveSet update_alive(std::span<const double> estimates, double alpha) {
  if (!(alpha >= 0.0)) throw InvalidArgument("alive threshold must be >= 0");
  AliveSet alive;
  alive.threshold = alpha;
  for (std::size_t f = 0; f < estimates.size(); ++f) {
    if (estimates[f] > alpha) alive.members.push_back(f);
  }
  return alive;
}

}  // namespace femtocache::popularity
