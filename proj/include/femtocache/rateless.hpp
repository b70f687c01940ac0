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

#ifndef FEMTOCACHE_RATELESS_HPP_
#define FEMTOCACHE_RATELESS_HPP_

// Rateless-coded broadcast model. A receiver recovers a file of L data blocks
// after accumulating L' = L + nu coded packets from an erasure channel whose
// per-packet loss probability is the link outage. A broadcast round ends when
// every requester has acknowledged or after D packets.
//
// One packet is one slot and one channel use; energy is power x packets.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "femtocache/rng.hpp"

namespace femtocache::rateless {

struct PopularityStep {
  double start_time = 0.0;
  double intensity = 0.0;  // per-user requests per unit of request scale
};

struct FileSpec {
  std::string label;
  int blocks = 1;    // L
  int overhead = 0;  // nu
  int size = 1;      // storage units
  std::vector<PopularityStep> schedule;

  int decode_threshold() const { return blocks + overhead; }  // L'

  // Piecewise-constant popularity at time t. Throws if t precedes the
  // schedule.
  double intensity_at(double t) const;

  void validate() const;
};

// Default coding overhead: ceil(0.05 * L).
int default_overhead(int blocks);

// Deadline rule D = ceil(kappa * L').
int deadline_for(int decode_threshold, double kappa);

struct DeliveryPolicy {
  int deadline = 1;    // D, max packets per broadcast
  double delta = 0.95;  // recovery probability once L' packets are in

  void validate(int decode_threshold) const;
};

struct BroadcastOutcome {
  int duration = 0;       // packets sent
  double energy = 0.0;    // power x duration
  int recovered = 0;      // K
  std::vector<bool> per_user_success;
};

// delta * P[Binomial(D, 1 - O) >= L'].
double decode_success_probability(const DeliveryPolicy& policy,
                                  int decode_threshold, double outage);

// Negative binomial law of the packet count W needed to collect L' packets.
double completion_time_pmf(int packets, int decode_threshold, double outage);

// P[W <= w] = 1 - I_O(w - L' + 1, L') (regularized incomplete beta).
double completion_time_cdf(int packets, int decode_threshold, double outage);

// P[max_n W_n <= w] for independent users.
double max_completion_cdf(int packets, int decode_threshold,
                          std::span<const double> outages);

// P[W_(k) <= w]: at least k of the users have finished by packet w.
double kth_order_cdf(int k, int packets, int decode_threshold,
                     std::span<const double> outages);

// P[W_(k) = D], by a dynamic program over the per-user events
// {W <= D - 1}, {W = D}, {W > D}.
double kth_order_pmf_at_deadline(int k, std::span<const double> outages,
                                 int decode_threshold,
                                 const DeliveryPolicy& policy);

// Packet-by-packet broadcast to a fixed set of requesters. Each unfinished
// user receives a packet with probability 1 - O_n. A user that reaches L'
// acknowledges (and stops listening) and has recovered the file with
// probability delta. With no requesters exactly one packet is sent.
class BroadcastSession {
 public:
  BroadcastSession(std::vector<double> outages, int decode_threshold,
                   const DeliveryPolicy& policy, double power);

  bool done() const;
  void step(Rng& rng);
  BroadcastOutcome outcome() const;

  int packets_sent() const { return sent_; }
  std::size_t requesters() const { return outages_.size(); }

 private:
  std::vector<double> outages_;
  std::vector<int> received_;
  std::vector<bool> finished_;
  std::vector<bool> success_;
  int threshold_;
  DeliveryPolicy policy_;
  double power_;
  int sent_ = 0;
  std::size_t unfinished_;
  int recovered_ = 0;
};

BroadcastOutcome simulate_broadcast(std::span<const double> outages,
                                    int decode_threshold,
                                    const DeliveryPolicy& policy, double power,
                                    Rng& rng);
BroadcastOutcome simulate_broadcast(std::span<const double> outages,
                                    int decode_threshold,
                                    const DeliveryPolicy& policy, double power,
                                    std::uint64_t seed);

// Law of the number of requesters in a round.
class UserCountDistribution {
 public:
  static UserCountDistribution fixed(std::uint64_t count);
  static UserCountDistribution poisson(double mean);

  double pmf(std::uint64_t q) const;
  // Smallest q_max with cumulative mass > 1 - 1e-9.
  std::uint64_t truncation() const;
  std::uint64_t sample(Rng& rng) const;

 private:
  bool poisson_ = false;
  double mean_ = 0.0;
  std::uint64_t count_ = 0;
};

// P[T = w] for w = 0..D, requesters i.i.d. with the given outage. A round
// with no requesters lasts one packet.
std::vector<double> duration_distribution(const DeliveryPolicy& policy,
                                          int decode_threshold, double outage,
                                          const UserCountDistribution& users);

// E[K / (p T)] for one round. User n is a requester with probability
// request_probability[n], independently, and then sees outage outages[n].
double expected_round_utility(std::span<const double> outages,
                              std::span<const double> request_probability,
                              int decode_threshold,
                              const DeliveryPolicy& policy, double power);

// Same as above with F_n(w) supplied as a row-major table: row n holds
// completion_time_cdf(w, L', O_n) for w = 0 .. D.
double expected_round_utility_from_cdf(
    std::span<const double> cdf_table,
    std::span<const double> request_probability, int decode_threshold,
    const DeliveryPolicy& policy, double power);

// Same quantity for i.i.d. users and a random requester count.
double expected_round_utility(double outage,
                              const UserCountDistribution& users,
                              int decode_threshold,
                              const DeliveryPolicy& policy, double power);

}  // namespace femtocache::rateless

#endif  // FEMTOCACHE_RATELESS_HPP_
