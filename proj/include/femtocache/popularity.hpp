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

#ifndef FEMTOCACHE_POPULARITY_HPP_
#define FEMTOCACHE_POPULARITY_HPP_

// Piecewise-stationary request model and the per-file change detector.
//
// Requests for a file in one slot are Poisson with mean x * mu(t) * scale,
// x being the number of users attached to the SBS. The detector runs a
// generalized likelihood ratio (GLR) test for a change of a Poisson mean:
// for every candidate onset j in the window it maximizes
//
//   Gamma_j(psi1) = sum_{t=j}^{now} [(psi0 - psi1) + q_t ln(psi1 / psi0)]
//
// over post-change means with |psi1 - psi0| >= C, and raises an alarm once
// the maximum over j reaches h.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "femtocache/rateless.hpp"
#include "femtocache/rng.hpp"

namespace femtocache::popularity {

// Per-file request counts for one slot.
std::vector<std::uint64_t> generate_requests(
    std::span<const rateless::FileSpec> files, std::uint64_t users, double t,
    Rng& rng, double rate_scale = 1.0);
std::vector<std::uint64_t> generate_requests(
    std::span<const rateless::FileSpec> files, std::uint64_t users, double t,
    std::uint64_t seed, double rate_scale = 1.0);

// Poisson maximum-likelihood intensity (the sample mean). Throws EmptySample.
double mle_intensity(std::span<const double> samples);

struct GlrConfig {
  double threshold = 10.0;     // h
  double min_jump = 1.0;       // C
  std::size_t window = 500;    // W_max
  double psi_floor = 1e-3;     // lower clamp on the reference mean

  void validate() const;
};

// Inner supremum over the admissible post-change means for a segment with
// `count` samples summing to `sum`. With sum == 0 and an admissible lower
// half-line the supremum is the limit psi1 -> 0, reported as psi1 = 0.
struct SegmentSup {
  double value = 0.0;
  double psi1 = 0.0;
};
SegmentSup glr_segment_sup(double count, double sum, double psi0,
                           double min_jump);

// Log-likelihood ratio of a segment at a given post-change mean.
double glr_segment_value(double count, double sum, double psi0, double psi1);

struct GlrScan {
  double statistic = 0.0;   // max over onsets; -inf for an empty window
  std::size_t onset = 0;    // index into the scanned window
  double psi1 = 0.0;
};

// Maximizes over every onset in `window` using backward suffix sums.
// Ties keep the most recent onset.
GlrScan glr_scan(std::span<const double> window, double psi0,
                 double min_jump);

struct ChangeAlarm {
  std::int64_t alarm_slot = 0;
  std::int64_t change_slot = 0;     // estimated onset
  double post_change_mean = 0.0;    // psi1 at the argmax
  double statistic = 0.0;
};

// Detector state of one file.
class DetectorState {
 public:
  // `bootstrap` holds the initialization counts for slots
  // first_slot .. first_slot + size - 1.
  DetectorState(const GlrConfig& config, std::span<const double> bootstrap,
                std::int64_t first_slot);

  // Feeds the count of the next slot. The reference mean psi0 is the running
  // mean since the last change, refreshed before the test. On an alarm the
  // state restarts at the estimated onset: the window and the running mean
  // then cover only the samples from that onset on.
  std::optional<ChangeAlarm> step(double count);

  double psi0() const;
  double running_mean() const;
  std::int64_t last_change() const { return last_change_; }
  std::int64_t next_slot() const { return next_slot_; }
  double last_statistic() const { return last_statistic_; }
  std::size_t window_size() const { return window_.size(); }
  std::uint64_t samples_since_change() const { return count_; }

  bool alarm_flag() const { return alarm_flag_; }
  void clear_alarm_flag() { alarm_flag_ = false; }

  const GlrConfig& config() const { return config_; }

 private:
  GlrConfig config_;
  std::deque<double> window_;
  std::vector<double> scratch_;
  double sum_ = 0.0;
  std::uint64_t count_ = 0;
  std::int64_t last_change_ = 0;
  std::int64_t next_slot_ = 0;
  double last_statistic_ = 0.0;
  bool alarm_flag_ = false;
};

struct AliveSet {
  double threshold = 0.0;
  std::vector<std::size_t> members;  // ascending file ids

  bool contains(std::size_t file) const;
};

// f is alive iff estimates[f] > alpha.
AliveSet update_alive(std::span<const double> estimates, double alpha);

}  // namespace femtocache::popularity

#endif  // FEMTOCACHE_POPULARITY_HPP_
