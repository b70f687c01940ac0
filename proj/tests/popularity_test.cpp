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

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "femtocache/channel.hpp"
#include "femtocache/error.hpp"
#include "femtocache/oracles.hpp"

namespace femtocache::popularity {
namespace {

std::vector<double> poisson_stream(Rng& rng, double mean, int n) {
  std::vector<double> v(n);
  for (double& q : v) {
    q = mean > 0.0
            ? static_cast<double>(std::poisson_distribution<int>(mean)(rng))
            : 0.0;
  }
  return v;
}

double poisson_pmf(double mean, int k) {
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

TEST(Requests, NoUsersNoRequests) {
  const std::vector<rateless::FileSpec> files{{"F", 1, 0, 3, {{0, 0.1}}}};
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    EXPECT_EQ(generate_requests(files, 0, t, rng)[0], 0u);
  }
}

TEST(Requests, PerUserMeanFollowsSchedule) {
  const std::vector<rateless::FileSpec> files{
      {"I", 3, 1, 3, {{0, 7}, {1500, 7}, {3000, 12}}}};
  Rng rng(2);
  double sum = 0.0;
  constexpr int kSlots = 100000;
  for (int t = 0; t < kSlots; ++t) {
    sum += generate_requests(files, 10, 3000.0 + t, rng)[0];
  }
  EXPECT_NEAR(sum / kSlots / 10.0, 12.0, 0.02 * 12.0);
}

TEST(Requests, MixtureOverUserCountMatchesSeries) {
  // Mean user count 5, intensity 2.
  const channel::CellGeometry geometry{1.0, 5.0 / std::numbers::pi};
  const std::vector<rateless::FileSpec> files{{"X", 1, 0, 1, {{0, 2.0}}}};
  Rng rng(3);
  constexpr int kDraws = 100000;
  std::vector<double> freq(80, 0.0);
  for (int i = 0; i < kDraws; ++i) {
    const auto users = channel::draw_user_count(geometry, rng);
    const auto q = generate_requests(files, users, 0.0, rng)[0];
    if (q < freq.size()) freq[q] += 1.0 / kDraws;
  }
  std::vector<double> series(80, 0.0);
  for (int q = 0; q < 80; ++q) {
    for (int x = 0; x < 60; ++x) series[q] += poisson_pmf(5.0, x) * poisson_pmf(2.0 * x, q);
  }
  EXPECT_LT(oracles::total_variation(freq, series), 0.01);
}

TEST(Mle, Examples) {
  const std::vector<double> a{4, 6, 5};
  EXPECT_DOUBLE_EQ(mle_intensity(a), 5.0);
  const std::vector<double> zeros(10, 0.0);
  EXPECT_EQ(mle_intensity(zeros), 0.0);
  EXPECT_THROW(mle_intensity(std::vector<double>{}), EmptySample);
  Rng rng(4);
  const auto s = poisson_stream(rng, 7.0, 10000);
  EXPECT_NEAR(mle_intensity(s), 7.0, 3.0 * std::sqrt(7.0 / 1e4));
}

TEST(GlrConfig, Validation) {
  GlrConfig c;
  EXPECT_NO_THROW(c.validate());
  c.threshold = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.window = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.min_jump = -1;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(SegmentSup, MeanWhenAdmissibleElseNearestEdge) {
  // mean 5 against psi0 2, C 1: admissible.
  auto s = glr_segment_sup(4, 20, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(s.psi1, 5.0);
  // mean 2.5 inside (1, 3): the better edge.
  s = glr_segment_sup(4, 10, 2.0, 1.0);
  EXPECT_TRUE(s.psi1 == 1.0 || s.psi1 == 3.0);
  EXPECT_DOUBLE_EQ(s.value,
                   std::max(glr_segment_value(4, 10, 2.0, 1.0),
                            glr_segment_value(4, 10, 2.0, 3.0)));
  // All zeros with a lower half-line: the limit psi1 -> 0.
  s = glr_segment_sup(3, 0, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(s.psi1, 0.0);
  EXPECT_DOUBLE_EQ(s.value, 6.0);
  // No lower half-line when psi0 <= C.
  s = glr_segment_sup(3, 0, 0.5, 1.0);
  EXPECT_DOUBLE_EQ(s.psi1, 1.5);
}

TEST(GlrScan, EmptyWindowIsMinusInfinity) {
  EXPECT_EQ(glr_scan({}, 1.0, 1.0).statistic,
            -std::numeric_limits<double>::infinity());
}

TEST(GlrScan, UnconstrainedScanMatchesFullScanOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto w = poisson_stream(rng, 3.0, 40 + trial * 3);
    const auto tail = poisson_stream(rng, 6.0, trial);
    w.insert(w.end(), tail.begin(), tail.end());
    const double psi0 = mle_intensity(w);
    const auto fast = glr_scan(w, psi0, 0.0);
    const auto slow = oracles::glr_full_scan(w, psi0, 0.0);
    EXPECT_NEAR(fast.statistic, slow.statistic,
                1e-9 * std::max(1.0, std::abs(slow.statistic)));
    EXPECT_EQ(fast.onset, slow.onset);
    // At the unconstrained segment mean the log-likelihood ratio is >= 0.
    EXPECT_GE(fast.statistic, -1e-12);
  }
}

TEST(Detector, ConstantStreamRarelyAlarms) {
  GlrConfig config;  // h = 10, C = 1
  constexpr int kSeeds = 20;
  int alarms = 0;
  for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
    Rng rng(seed);
    DetectorState d(config, poisson_stream(rng, 6.0, 200), 0);
    for (int t = 0; t < 10000; ++t) {
      alarms += d.step(std::poisson_distribution<int>(6.0)(rng)).has_value();
    }
  }
  // At most one alarm per 10^4 slots, averaged over the seed sweep.
  EXPECT_LE(alarms, kSeeds);
}

TEST(Detector, DropToNearZeroIsCaughtQuickly) {
  GlrConfig config;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    DetectorState d(config, poisson_stream(rng, 6.0, 200), 0);
    int delay = -1;
    for (int t = 0; t < 50 && delay < 0; ++t) {
      if (d.step(std::poisson_distribution<int>(0.1)(rng))) delay = t;
    }
    ASSERT_GE(delay, 0) << "seed " << seed;
    EXPECT_LE(delay, 50);
    EXPECT_TRUE(d.alarm_flag());
    d.clear_alarm_flag();
    EXPECT_FALSE(d.alarm_flag());
  }
}

TEST(Detector, JumpBelowMinimumNeverAlarms) {
  GlrConfig config;
  config.min_jump = 10.0;
  Rng rng(6);
  DetectorState d(config, poisson_stream(rng, 6.0, 200), 0);
  for (int t = 0; t < 5000; ++t) {
    EXPECT_FALSE(d.step(std::poisson_distribution<int>(3.0)(rng)));
  }
}

TEST(Detector, RunningMeanTracksSamplesSinceChange) {
  GlrConfig config;
  config.window = 30;
  const std::vector<double> boot{1, 2, 3, 4};
  DetectorState d(config, boot, 100);
  EXPECT_EQ(d.next_slot(), 104);
  EXPECT_DOUBLE_EQ(d.running_mean(), 2.5);
  d.step(5);
  EXPECT_DOUBLE_EQ(d.running_mean(), 3.0);
  EXPECT_EQ(d.window_size(), 5u);
  EXPECT_EQ(d.samples_since_change(), 5u);
}

TEST(Detector, ResetsToTheEstimatedOnset) {
  GlrConfig config;
  Rng rng(7);
  DetectorState d(config, poisson_stream(rng, 2.0, 200), 0);
  // Slots 200 .. 499 at the old mean, then a jump at slot 500.
  for (int t = 0; t < 300; ++t) d.step(std::poisson_distribution<int>(2.0)(rng));
  std::optional<ChangeAlarm> alarm;
  for (int t = 0; t < 100 && !alarm; ++t) {
    alarm = d.step(std::poisson_distribution<int>(8.0)(rng));
  }
  ASSERT_TRUE(alarm);
  EXPECT_NEAR(static_cast<double>(alarm->change_slot), 500.0, 5.0);
  EXPECT_EQ(d.last_change(), alarm->change_slot);
  EXPECT_EQ(d.samples_since_change(),
            static_cast<std::uint64_t>(alarm->alarm_slot - alarm->change_slot + 1));
}

TEST(Detector, PostChangeEstimateConverges) {
  GlrConfig config;
  double error = 0.0;
  constexpr int kSeeds = 20;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    Rng rng(seed);
    DetectorState d(config, poisson_stream(rng, 2.0, 200), 0);
    for (int t = 0; t < 200; ++t) {
      d.step(std::poisson_distribution<int>(5.0)(rng));
    }
    error += std::abs(d.running_mean() - 5.0) / 5.0;
  }
  EXPECT_LT(error / kSeeds, 0.1);
}

TEST(Detector, MatchesFullReplay) {
  Rng rng(8);
  const auto boot = poisson_stream(rng, 3.0, 50);
  auto stream = poisson_stream(rng, 3.0, 60);
  const auto after = poisson_stream(rng, 7.0, 60);
  stream.insert(stream.end(), after.begin(), after.end());
  GlrConfig config;
  config.window = 45;
  DetectorState d(config, boot, 0);
  const auto ref = oracles::glr_replay(boot, stream, config.threshold,
                                       config.min_jump, config.window,
                                       config.psi_floor);
  int alarms = 0;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    const auto a = d.step(stream[t]);
    EXPECT_NEAR(d.last_statistic(), ref[t].statistic, 1e-9);
    EXPECT_EQ(a.has_value(), ref[t].alarm);
    alarms += a.has_value();
  }
  EXPECT_GE(alarms, 1);
}

TEST(Alive, Examples) {
  const std::vector<double> before{5, 6, 3, 4, 6, 0.1, 1, 4, 7, 5};
  const auto alive = update_alive(before, 0.5);
  EXPECT_EQ(alive.members,
            (std::vector<std::size_t>{0, 1, 2, 3, 4, 6, 7, 8, 9}));
  EXPECT_FALSE(alive.contains(5));
  EXPECT_EQ(update_alive(before, 0.0).members.size(), 10u);
  EXPECT_TRUE(update_alive(before, 100.0).members.empty());
}

}  // namespace
}  // namespace femtocache::popularity
