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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "femtocache/error.hpp"
#include "femtocache/rng.hpp"

namespace femtocache::kernels {
namespace {

double draw_sinr(const channel::LinkBudget& link, double power, Rng& rng) {
  std::exponential_distribution<double> gain(link.serving_beta / power);
  double interference = link.noise_power;
  for (const channel::Interferer& i : link.interferers) {
    interference +=
        std::exponential_distribution<double>(i.beta / i.power)(rng);
  }
  const double signal = gain(rng);
  return signal / interference;
}

// Chunk boundaries for `total` draws.
std::size_t chunk_begin(std::size_t c) { return c * kMonteCarloChunk; }
std::size_t chunk_end(std::size_t c, std::size_t total) {
  return std::min(total, (c + 1) * kMonteCarloChunk);
}

}  // namespace

std::vector<double> sample_sinr_values(const channel::LinkBudget& link,
                                       double power, std::size_t draws,
                                       std::uint64_t seed, Execution exec) {
  if (!(power > 0.0)) throw InvalidArgument("power must be > 0");
  std::vector<double> values(draws);
  for_each_index(chunk_count(draws, kMonteCarloChunk), exec,
                 [&](std::size_t c) {
                   Rng rng = make_rng(seed, streams::kMonteCarlo, c);
                   for (std::size_t i = chunk_begin(c);
                        i < chunk_end(c, draws); ++i) {
                     values[i] = draw_sinr(link, power, rng);
                   }
                 });
  return values;
}

double empirical_outage(const channel::LinkBudget& link, double power,
                        double min_rate_nats, std::size_t draws,
                        std::uint64_t seed, Execution exec) {
  if (draws == 0) throw EmptySample("no draws requested");
  if (!(power > 0.0)) throw InvalidArgument("power must be > 0");
  const double limit = std::expm1(min_rate_nats);
  const std::size_t chunks = chunk_count(draws, kMonteCarloChunk);
  std::vector<std::uint64_t> hits(chunks, 0);
  for_each_index(chunks, exec, [&](std::size_t c) {
    Rng rng = make_rng(seed, streams::kMonteCarlo, c);
    std::uint64_t local = 0;
    for (std::size_t i = chunk_begin(c); i < chunk_end(c, draws); ++i) {
      if (draw_sinr(link, power, rng) < limit) ++local;
    }
    hits[c] = local;
  });
  std::uint64_t total = 0;
  for (std::uint64_t h : hits) total += h;
  return static_cast<double>(total) / static_cast<double>(draws);
}

std::vector<std::uint64_t> duration_histogram(
    const rateless::DeliveryPolicy& policy, int decode_threshold,
    double outage, const rateless::UserCountDistribution& users,
    std::size_t runs, std::uint64_t seed, Execution exec) {
  policy.validate(decode_threshold);
  const std::size_t bins = static_cast<std::size_t>(policy.deadline) + 1;
  const std::size_t chunks = chunk_count(runs, kMonteCarloChunk);
  std::vector<std::vector<std::uint64_t>> partial(
      chunks, std::vector<std::uint64_t>(bins, 0));
  for_each_index(chunks, exec, [&](std::size_t c) {
    Rng rng = make_rng(seed, streams::kMonteCarlo, c);
    for (std::size_t r = chunk_begin(c); r < chunk_end(c, runs); ++r) {
      const std::uint64_t q = users.sample(rng);
      std::vector<double> outages(q, outage);
      const rateless::BroadcastOutcome out = rateless::simulate_broadcast(
          outages, decode_threshold, policy, 1.0, rng);
      ++partial[c][static_cast<std::size_t>(out.duration)];
    }
  });
  std::vector<std::uint64_t> histogram(bins, 0);
  for (const auto& p : partial) {
    for (std::size_t w = 0; w < bins; ++w) histogram[w] += p[w];
  }
  return histogram;
}

double simulated_round_utility(std::span<const double> outages,
                               std::span<const double> request_probability,
                               int decode_threshold,
                               const rateless::DeliveryPolicy& policy,
                               double power, std::size_t runs,
                               std::uint64_t seed, Execution exec) {
  if (runs == 0) throw EmptySample("no runs requested");
  if (outages.size() != request_probability.size()) {
    throw InvalidArgument("outage and request vectors differ in length");
  }
  const std::size_t chunks = chunk_count(runs, kMonteCarloChunk);
  std::vector<double> partial(chunks, 0.0);
  for_each_index(chunks, exec, [&](std::size_t c) {
    Rng rng = make_rng(seed, streams::kMonteCarlo, c);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> requesters;
    double local = 0.0;
    for (std::size_t r = chunk_begin(c); r < chunk_end(c, runs); ++r) {
      requesters.clear();
      for (std::size_t n = 0; n < outages.size(); ++n) {
        if (unit(rng) < request_probability[n]) {
          requesters.push_back(outages[n]);
        }
      }
      const rateless::BroadcastOutcome out = rateless::simulate_broadcast(
          requesters, decode_threshold, policy, power, rng);
      local += static_cast<double>(out.recovered) / out.energy;
    }
    partial[c] = local;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total / static_cast<double>(runs);
}

double packet_outage(double sinr, double min_rate_nats) {
  if (!(sinr > 0.0)) throw InvalidArgument("SINR must be > 0");
  return -std::expm1(-std::expm1(min_rate_nats) / sinr);
}

double streaming_outage(double packet_outage_prob, double multiplier,
                        int segments, int decode_threshold, std::size_t runs,
                        std::uint64_t seed, Execution exec) {
  if (segments < 1) throw InvalidArgument("need at least one segment");
  if (decode_threshold < 1) throw InvalidArgument("L' must be >= 1");
  if (!(multiplier > 0.0)) throw InvalidArgument("deadline must be > 0");
  if (!(packet_outage_prob >= 0.0 && packet_outage_prob <= 1.0)) {
    throw InvalidArgument("outage must lie in [0, 1]");
  }
  if (runs == 0) throw EmptySample("no runs requested");

  // Waits between successful packets are geometric; drawing them by
  // inversion from fixed uniforms makes every wait nondecreasing in the
  // outage probability.
  const double log_outage = std::log(packet_outage_prob);
  auto wait = [&](double u) -> double {
    if (packet_outage_prob == 0.0) return 1.0;
    if (packet_outage_prob == 1.0) {
      return std::numeric_limits<double>::infinity();
    }
    return std::max(1.0, std::ceil(std::log(u) / log_outage));
  };

  std::vector<std::uint64_t> failures(runs, 0);
  for_each_index(runs, exec, [&](std::size_t r) {
    Rng rng = make_rng(seed, streams::kMonteCarlo, r);
    double start = 0.0;
    std::uint64_t failed = 0;
    for (int i = 1; i <= segments; ++i) {
      double done = start;
      for (int k = 0; k < decode_threshold; ++k) {
        done += wait(uniform_open_closed(rng));
      }
      const double deadline = std::floor(i * multiplier);
      if (done > deadline) ++failed;
      start = std::min(done, deadline);
    }
    failures[r] = failed;
  });
  std::uint64_t total = 0;
  for (std::uint64_t f : failures) total += f;
  return static_cast<double>(total) /
         (static_cast<double>(runs) * static_cast<double>(segments));
}

}  // namespace femtocache::kernels
