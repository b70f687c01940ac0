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

#include "femtocache/rateless.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <fmt/format.h>

#include "femtocache/error.hpp"

namespace femtocache::rateless {

double FileSpec::intensity_at(double t) const {
  if (schedule.empty() || t < schedule.front().start_time) {
    throw InvalidArgument(
        fmt::format("popularity of file {} undefined at t={}", label, t));
  }
  auto it = std::upper_bound(
      schedule.begin(), schedule.end(), t,
      [](double time, const PopularityStep& s) { return time < s.start_time; });
  return std::prev(it)->intensity;
}

void FileSpec::validate() const {
  if (blocks < 1) throw InvalidArgument("file " + label + ": blocks < 1");
  if (overhead < 0) throw InvalidArgument("file " + label + ": overhead < 0");
  if (size <= 0) throw InvalidArgument("file " + label + ": size <= 0");
  if (schedule.empty()) {
    throw InvalidArgument("file " + label + ": empty popularity schedule");
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i].intensity > 0.0)) {
      throw InvalidArgument("file " + label + ": intensities must be > 0");
    }
    if (i > 0 && !(schedule[i].start_time > schedule[i - 1].start_time)) {
      throw InvalidArgument("file " + label +
                            ": schedule times must be strictly increasing");
    }
  }
}

int default_overhead(int blocks) {
  return static_cast<int>(std::ceil(0.05 * blocks - 1e-12));
}

int deadline_for(int decode_threshold, double kappa) {
  if (!(kappa >= 1.0)) throw InvalidArgument("deadline factor must be >= 1");
  return static_cast<int>(std::ceil(kappa * decode_threshold - 1e-9));
}

void DeliveryPolicy::validate(int decode_threshold) const {
  if (deadline < decode_threshold) {
    throw InvalidArgument(fmt::format("deadline {} below decode threshold {}",
                                      deadline, decode_threshold));
  }
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw InvalidArgument("recovery probability must lie in (0, 1]");
  }
}

namespace {

void check_outage(double outage) {
  if (!(outage >= 0.0 && outage <= 1.0)) {
    throw InvalidArgument(fmt::format("outage {} outside [0, 1]", outage));
  }
}

double binomial(int n, int k) {
  return boost::math::binomial_coefficient<double>(static_cast<unsigned>(n),
                                                   static_cast<unsigned>(k));
}

}  // namespace

double decode_success_probability(const DeliveryPolicy& policy,
                                  int decode_threshold, double outage) {
  check_outage(outage);
  policy.validate(decode_threshold);
  const int d = policy.deadline;
  double failure = 0.0;
  for (int l = 0; l < decode_threshold; ++l) {
    failure += binomial(d, l) * std::pow(1.0 - outage, l) *
               std::pow(outage, d - l);
  }
  return policy.delta * (1.0 - failure);
}

double completion_time_pmf(int packets, int decode_threshold, double outage) {
  check_outage(outage);
  if (decode_threshold < 1) throw InvalidArgument("decode threshold < 1");
  if (packets < decode_threshold) return 0.0;
  return binomial(packets - 1, packets - decode_threshold) *
         std::pow(1.0 - outage, decode_threshold) *
         std::pow(outage, packets - decode_threshold);
}

double completion_time_cdf(int packets, int decode_threshold, double outage) {
  check_outage(outage);
  if (decode_threshold < 1) throw InvalidArgument("decode threshold < 1");
  if (packets < decode_threshold) return 0.0;
  if (outage == 0.0) return 1.0;
  if (outage == 1.0) return 0.0;
  return 1.0 - boost::math::ibeta(
                   static_cast<double>(packets - decode_threshold + 1),
                   static_cast<double>(decode_threshold), outage);
}

double max_completion_cdf(int packets, int decode_threshold,
                          std::span<const double> outages) {
  double product = 1.0;
  for (double o : outages) {
    product *= completion_time_cdf(packets, decode_threshold, o);
  }
  return product;
}

double kth_order_cdf(int k, int packets, int decode_threshold,
                     std::span<const double> outages) {
  const auto n = static_cast<int>(outages.size());
  if (k < 1 || k > n) throw InvalidArgument("order statistic out of range");
  // Poisson-binomial law of #{n : W_n <= w}.
  std::vector<double> count(n + 1, 0.0);
  count[0] = 1.0;
  int seen = 0;
  for (double o : outages) {
    const double f = completion_time_cdf(packets, decode_threshold, o);
    ++seen;
    for (int c = seen; c >= 1; --c) {
      count[c] = count[c] * (1.0 - f) + count[c - 1] * f;
    }
    count[0] *= 1.0 - f;
  }
  double tail = 0.0;
  for (int c = k; c <= n; ++c) tail += count[c];
  return tail;
}

double kth_order_pmf_at_deadline(int k, std::span<const double> outages,
                                 int decode_threshold,
                                 const DeliveryPolicy& policy) {
  const auto n = static_cast<int>(outages.size());
  if (k < 1 || k > n) throw InvalidArgument("order statistic out of range");
  const int d = policy.deadline;
  // joint[i][j]: i users finished before D, j users finishing exactly at D.
  std::vector<std::vector<double>> joint(
      n + 1, std::vector<double>(n + 1, 0.0));
  joint[0][0] = 1.0;
  for (double o : outages) {
    const double before = completion_time_cdf(d - 1, decode_threshold, o);
    const double at = completion_time_pmf(d, decode_threshold, o);
    const double after = std::max(0.0, 1.0 - before - at);
    std::vector<std::vector<double>> next(
        n + 1, std::vector<double>(n + 1, 0.0));
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; i + j <= n; ++j) {
        const double p = joint[i][j];
        if (p == 0.0) continue;
        next[i][j] += p * after;
        if (i + j < n) {
          next[i + 1][j] += p * before;
          next[i][j + 1] += p * at;
        }
      }
    }
    joint = std::move(next);
  }
  // W_(k) = D  iff  fewer than k finished before D and at least k by D.
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = k - i; i + j <= n; ++j) total += joint[i][j];
  }
  return total;
}

BroadcastSession::BroadcastSession(std::vector<double> outages,
                                   int decode_threshold,
                                   const DeliveryPolicy& policy, double power)
    : outages_(std::move(outages)),
      received_(outages_.size(), 0),
      finished_(outages_.size(), false),
      success_(outages_.size(), false),
      threshold_(decode_threshold),
      policy_(policy),
      power_(power),
      unfinished_(outages_.size()) {
  if (decode_threshold < 1) throw InvalidArgument("decode threshold < 1");
  policy_.validate(decode_threshold);
  if (!(power > 0.0)) throw InvalidArgument("broadcast power must be > 0");
  for (double o : outages_) check_outage(o);
}

bool BroadcastSession::done() const {
  if (sent_ == 0) return false;
  return unfinished_ == 0 || sent_ >= policy_.deadline;
}

void BroadcastSession::step(Rng& rng) {
  if (done()) return;
  ++sent_;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t n = 0; n < outages_.size(); ++n) {
    if (finished_[n]) continue;
    if (unit(rng) >= outages_[n]) {
      if (++received_[n] == threshold_) {
        finished_[n] = true;
        --unfinished_;
        if (policy_.delta >= 1.0 || unit(rng) < policy_.delta) {
          success_[n] = true;
          ++recovered_;
        }
      }
    }
  }
}

BroadcastOutcome BroadcastSession::outcome() const {
  BroadcastOutcome out;
  out.duration = sent_;
  out.energy = power_ * sent_;
  out.recovered = recovered_;
  out.per_user_success = success_;
  return out;
}

BroadcastOutcome simulate_broadcast(std::span<const double> outages,
                                    int decode_threshold,
                                    const DeliveryPolicy& policy, double power,
                                    Rng& rng) {
  BroadcastSession session({outages.begin(), outages.end()}, decode_threshold,
                           policy, power);
  while (!session.done()) session.step(rng);
  return session.outcome();
}

BroadcastOutcome simulate_broadcast(std::span<const double> outages,
                                    int decode_threshold,
                                    const DeliveryPolicy& policy, double power,
                                    std::uint64_t seed) {
  Rng rng(seed);
  return simulate_broadcast(outages, decode_threshold, policy, power, rng);
}

UserCountDistribution UserCountDistribution::fixed(std::uint64_t count) {
  UserCountDistribution d;
  d.count_ = count;
  return d;
}

UserCountDistribution UserCountDistribution::poisson(double mean) {
  if (!(mean >= 0.0)) throw InvalidArgument("Poisson mean must be >= 0");
  UserCountDistribution d;
  d.poisson_ = true;
  d.mean_ = mean;
  return d;
}

double UserCountDistribution::pmf(std::uint64_t q) const {
  if (!poisson_) return q == count_ ? 1.0 : 0.0;
  if (mean_ == 0.0) return q == 0 ? 1.0 : 0.0;
  const double x = static_cast<double>(q);
  return std::exp(x * std::log(mean_) - mean_ - std::lgamma(x + 1.0));
}

std::uint64_t UserCountDistribution::truncation() const {
  if (!poisson_) return count_;
  double mass = 0.0;
  std::uint64_t q = 0;
  for (;; ++q) {
    mass += pmf(q);
    if (mass > 1.0 - 1e-9) return q;
    if (static_cast<double>(q) > mean_ + 50.0 * std::sqrt(mean_ + 1.0)) {
      return q;
    }
  }
}

std::uint64_t UserCountDistribution::sample(Rng& rng) const {
  if (!poisson_) return count_;
  if (mean_ == 0.0) return 0;
  return std::poisson_distribution<std::uint64_t>(mean_)(rng);
}

std::vector<double> duration_distribution(const DeliveryPolicy& policy,
                                          int decode_threshold, double outage,
                                          const UserCountDistribution& users) {
  policy.validate(decode_threshold);
  const int d = policy.deadline;
  std::vector<double> cdf(d + 1, 0.0);
  for (int w = 0; w <= d; ++w) {
    cdf[w] = completion_time_cdf(w, decode_threshold, outage);
  }
  std::vector<double> law(d + 1, 0.0);
  const std::uint64_t q_max = users.truncation();
  for (std::uint64_t q = 0; q <= q_max; ++q) {
    const double weight = users.pmf(q);
    if (weight == 0.0) continue;
    if (q == 0) {
      law[1] += weight;
      continue;
    }
    const double qd = static_cast<double>(q);
    for (int w = decode_threshold; w < d; ++w) {
      law[w] += weight * (std::pow(cdf[w], qd) - std::pow(cdf[w - 1], qd));
    }
    law[d] += weight * (1.0 - std::pow(cdf[d - 1], qd));
  }
  return law;
}

double expected_round_utility(std::span<const double> outages,
                              std::span<const double> request_probability,
                              int decode_threshold,
                              const DeliveryPolicy& policy, double power) {
  if (outages.size() != request_probability.size()) {
    throw InvalidArgument("outage and request vectors differ in length");
  }
  policy.validate(decode_threshold);
  const int d = policy.deadline;
  const std::size_t stride = static_cast<std::size_t>(d) + 1;
  std::vector<double> table(outages.size() * stride);
  for (std::size_t i = 0; i < outages.size(); ++i) {
    for (int w = 0; w <= d; ++w) {
      table[i * stride + static_cast<std::size_t>(w)] =
          completion_time_cdf(w, decode_threshold, outages[i]);
    }
  }
  return expected_round_utility_from_cdf(table, request_probability,
                                         decode_threshold, policy, power);
}

double expected_round_utility_from_cdf(
    std::span<const double> cdf_table,
    std::span<const double> request_probability, int decode_threshold,
    const DeliveryPolicy& policy, double power) {
  policy.validate(decode_threshold);
  if (!(power > 0.0)) throw InvalidArgument("power must be > 0");
  const std::size_t n = request_probability.size();
  const int d = policy.deadline;
  const std::size_t stride = static_cast<std::size_t>(d) + 1;
  if (cdf_table.size() != n * stride) {
    throw InvalidArgument("completion table does not match the users");
  }
  if (n == 0) return 0.0;

  // H(w) = E[#requesters * 1{every requester done by w}]
  //      = sum_n pi_n F_n(w) prod_{k != n} (1 - pi_k + pi_k F_k(w)).
  std::vector<double> g(n), prefix(n + 1), suffix(n + 1);
  auto h_at = [&](int w, double& requested_done) {
    const auto col = static_cast<std::size_t>(w);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = cdf_table[i * stride + col];
      g[i] = 1.0 - request_probability[i] + request_probability[i] * f;
    }
    prefix[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] * g[i];
    suffix[n] = 1.0;
    for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] * g[i];
    double h = 0.0;
    requested_done = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double own = request_probability[i] * cdf_table[i * stride + col];
      h += own * prefix[i] * suffix[i + 1];
      requested_done += own;
    }
    return h;
  };

  double unused = 0.0;
  double ratio = 0.0;
  double h_prev = 0.0;
  for (int w = decode_threshold; w < d; ++w) {
    const double h = h_at(w, unused);
    ratio += (h - h_prev) / w;
    h_prev = h;
  }
  double done_by_deadline = 0.0;
  h_at(d, done_by_deadline);
  ratio += (done_by_deadline - h_prev) / d;
  return policy.delta * ratio / power;
}

double expected_round_utility(double outage,
                              const UserCountDistribution& users,
                              int decode_threshold,
                              const DeliveryPolicy& policy, double power) {
  policy.validate(decode_threshold);
  if (!(power > 0.0)) throw InvalidArgument("power must be > 0");
  const int d = policy.deadline;
  std::vector<double> cdf(d + 1, 0.0);
  for (int w = 0; w <= d; ++w) {
    cdf[w] = completion_time_cdf(w, decode_threshold, outage);
  }
  double total = 0.0;
  const std::uint64_t q_max = users.truncation();
  for (std::uint64_t q = 1; q <= q_max; ++q) {
    const double weight = users.pmf(q);
    if (weight == 0.0) continue;
    const double qd = static_cast<double>(q);
    double ratio = 0.0;
    for (int w = decode_threshold; w < d; ++w) {
      ratio += qd * (std::pow(cdf[w], qd) - std::pow(cdf[w - 1], qd)) / w;
    }
    ratio += (qd * cdf[d] - qd * std::pow(cdf[d - 1], qd)) / d;
    total += weight * ratio;
  }
  return policy.delta * total / power;
}

}  // namespace femtocache::rateless
