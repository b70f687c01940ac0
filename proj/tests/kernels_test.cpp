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

#include "femtocache/kernels.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "femtocache/channel.hpp"
#include "femtocache/rateless.hpp"

namespace femtocache::kernels {
namespace {

const channel::LinkBudget kLink{1.2, {{0.8, 2.0}, {1.7, 1.0}}, 0.4};

TEST(Kernels, SerialAndParallelAreIdentical) {
  constexpr std::size_t kDraws = 3 * kMonteCarloChunk + 17;
  EXPECT_EQ(sample_sinr_values(kLink, 2.0, kDraws, 9, Execution::kSerial),
            sample_sinr_values(kLink, 2.0, kDraws, 9, Execution::kParallel));
  EXPECT_EQ(empirical_outage(kLink, 2.0, 0.7, kDraws, 9, Execution::kSerial),
            empirical_outage(kLink, 2.0, 0.7, kDraws, 9, Execution::kParallel));

  const rateless::DeliveryPolicy policy{9, 0.95};
  const auto users = rateless::UserCountDistribution::poisson(4.0);
  EXPECT_EQ(duration_histogram(policy, 3, 0.3, users, 50000, 4,
                               Execution::kSerial),
            duration_histogram(policy, 3, 0.3, users, 50000, 4,
                               Execution::kParallel));

  const std::vector<double> outages{0.2, 0.5, 0.1}, request{0.5, 0.9, 0.3};
  EXPECT_EQ(simulated_round_utility(outages, request, 2, {6, 1.0}, 2.0, 40000,
                                    5, Execution::kSerial),
            simulated_round_utility(outages, request, 2, {6, 1.0}, 2.0, 40000,
                                    5, Execution::kParallel));
  EXPECT_EQ(streaming_outage(0.3, 3.0, 100, 2, 3000, 6, Execution::kSerial),
            streaming_outage(0.3, 3.0, 100, 2, 3000, 6, Execution::kParallel));
}

TEST(Kernels, SeedsChangeDraws) {
  EXPECT_NE(sample_sinr_values(kLink, 1.0, 100, 1, Execution::kSerial),
            sample_sinr_values(kLink, 1.0, 100, 2, Execution::kSerial));
}

TEST(Kernels, EmpiricalOutageMatchesAnalytic) {
  const double expected = channel::outage_probability(2.0, 0.7, kLink);
  EXPECT_NEAR(empirical_outage(kLink, 2.0, 0.7, 400000, 3,
                               Execution::kParallel),
              expected, 0.004);
}

TEST(Kernels, DurationHistogramCountsEveryRun) {
  const rateless::DeliveryPolicy policy{6, 1.0};
  const auto hist =
      duration_histogram(policy, 2, 0.2, rateless::UserCountDistribution::fixed(3),
                         10000, 8, Execution::kParallel);
  ASSERT_EQ(hist.size(), 7u);
  std::uint64_t total = 0;
  for (auto n : hist) total += n;
  EXPECT_EQ(total, 10000u);
  EXPECT_EQ(hist[0] + hist[1], 0u);  // two packets are always needed
}

TEST(PacketOutage, Limits) {
  EXPECT_NEAR(packet_outage(1e12, std::log(2.0)), 0.0, 1e-9);
  EXPECT_NEAR(packet_outage(1e-12, std::log(2.0)), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(packet_outage(1.0, std::log(2.0)), 1.0 - std::exp(-1.0));
}

TEST(StreamingOutage, Limits) {
  EXPECT_EQ(streaming_outage(0.0, 2.0, 50, 2, 100, 1, Execution::kSerial), 0.0);
  EXPECT_EQ(streaming_outage(1.0, 3.0, 50, 2, 100, 1, Execution::kSerial), 1.0);
}

TEST(StreamingOutage, MonotoneInChannelAndDeadline) {
  double previous = 1.0;
  for (double o : {0.9, 0.7, 0.5, 0.3, 0.1}) {
    const double v = streaming_outage(o, 3.0, 100, 2, 2000, 2, Execution::kParallel);
    EXPECT_LE(v, previous);
    previous = v;
  }
  EXPECT_LE(streaming_outage(0.4, 4.0, 100, 2, 2000, 2, Execution::kParallel),
            streaming_outage(0.4, 2.5, 100, 2, 2000, 2, Execution::kParallel));
}

}  // namespace
}  // namespace femtocache::kernels
