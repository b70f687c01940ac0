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

#ifndef FEMTOCACHE_KERNELS_HPP_
#define FEMTOCACHE_KERNELS_HPP_

// Monte Carlo kernels. Draws are split into chunks of kMonteCarloChunk, and
// chunk c (or run r) draws from its own substream of `seed`, so the serial
// and parallel paths return identical results.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "femtocache/channel.hpp"
#include "femtocache/parallel.hpp"
#include "femtocache/rateless.hpp"

namespace femtocache::kernels {

// SINR draws X / (Y + p0) for one link at `power`.
std::vector<double> sample_sinr_values(const channel::LinkBudget& link,
                                       double power, std::size_t draws,
                                       std::uint64_t seed, Execution exec);

// Fraction of draws with log(1 + SINR) < min_rate.
double empirical_outage(const channel::LinkBudget& link, double power,
                        double min_rate_nats, std::size_t draws,
                        std::uint64_t seed, Execution exec);

// Histogram of broadcast durations (index = packets sent, 0 .. D) over
// `runs` simulated rounds with i.i.d. users of the given outage and a random
// requester count.
std::vector<std::uint64_t> duration_histogram(
    const rateless::DeliveryPolicy& policy, int decode_threshold,
    double outage, const rateless::UserCountDistribution& users,
    std::size_t runs, std::uint64_t seed, Execution exec);

// Mean utility K / (p T) over simulated rounds with fixed per-user outages
// and request probabilities.
double simulated_round_utility(std::span<const double> outages,
                               std::span<const double> request_probability,
                               int decode_threshold,
                               const rateless::DeliveryPolicy& policy,
                               double power, std::size_t runs,
                               std::uint64_t seed, Execution exec);

// Per-packet outage over a Rayleigh link with average SINR `sinr`, treating
// interference as noise: 1 - exp(-(e^u - 1) / sinr).
double packet_outage(double sinr, double min_rate_nats);

// Delay-constrained streaming of `segments` segments, each needing
// `decode_threshold` packets. Segment i (from 1) must complete within
// floor(i * multiplier) channel uses from the start; a late segment is in
// outage and the next one starts at that deadline. Returns the fraction of
// segments in outage over `runs` runs. Run r uses the same uniforms for
// every outage and multiplier, so results are pathwise comparable.
double streaming_outage(double packet_outage_prob, double multiplier,
                        int segments, int decode_threshold, std::size_t runs,
                        std::uint64_t seed, Execution exec);

}  // namespace femtocache::kernels

#endif  // FEMTOCACHE_KERNELS_HPP_
