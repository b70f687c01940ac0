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

#include "femtocache/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "femtocache/error.hpp"

namespace femtocache::oracles {
namespace {

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <=
         placement::kValueTieTolerance * std::max({1.0, std::abs(a),
                                                   std::abs(b)});
}

// Log-likelihood ratio of one Poisson sample, post-change over pre-change.
double sample_llr(double q, double psi0, double psi1) {
  if (psi1 == 0.0) {
    return q == 0.0 ? psi0 : -std::numeric_limits<double>::infinity();
  }
  return (psi0 - psi1) + q * std::log(psi1 / psi0);
}

double binary_pattern_probability(unsigned pattern, int length,
                                  double outage) {
  double p = 1.0;
  for (int i = 0; i < length; ++i) {
    p *= (pattern >> i) & 1U ? 1.0 - outage : outage;
  }
  return p;
}

}  // namespace

placement::KnapsackSolution brute_force_knapsack(
    const placement::PlacementProblem& problem) {
  const std::size_t n = problem.items.size();
  if (n > 24) throw InvalidArgument("brute force limited to 24 items");
  placement::KnapsackSolution best;
  bool have = false;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    int used = 0;
    double value = 0.0;
    std::vector<std::size_t> files;
    for (std::size_t i = 0; i < n; ++i) {
      if (!((mask >> i) & 1U)) continue;
      used += problem.items[i].size;
      value += problem.items[i].value;
      files.push_back(problem.items[i].file);
    }
    if (used > problem.capacity) continue;
    std::sort(files.begin(), files.end());
    bool take = !have;
    if (have) {
      if (nearly_equal(value, best.value)) {
        take = files < best.files;
      } else {
        take = value > best.value;
      }
    }
    if (take) {
      best = {std::move(files), value, used};
      have = true;
    }
  }
  return best;
}

GlrReference glr_full_scan(std::span<const double> window, double psi0,
                           double min_jump) {
  GlrReference best;
  best.statistic = -std::numeric_limits<double>::infinity();
  const double lower = psi0 - min_jump;
  const double upper = psi0 + min_jump;
  const bool has_lower = lower > 0.0 || min_jump == 0.0;
  for (std::size_t j = 0; j < window.size(); ++j) {
    double sum = 0.0;
    for (std::size_t t = j; t < window.size(); ++t) sum += window[t];
    const double mean = sum / static_cast<double>(window.size() - j);

    std::vector<double> candidates{upper};
    if (has_lower) candidates.push_back(lower);
    if (mean >= upper || (has_lower && mean <= lower && mean > 0.0)) {
      candidates.push_back(mean);
    }
    if (has_lower && sum == 0.0) candidates.push_back(0.0);

    double seg_value = -std::numeric_limits<double>::infinity();
    double seg_psi1 = 0.0;
    for (double psi1 : candidates) {
      double value = 0.0;
      for (std::size_t t = j; t < window.size(); ++t) {
        value += sample_llr(window[t], psi0, psi1);
      }
      if (value > seg_value) {
        seg_value = value;
        seg_psi1 = psi1;
      }
    }
    if (seg_value > best.statistic || nearly_equal(seg_value, best.statistic)) {
      best = {seg_value, j, seg_psi1};
    }
  }
  return best;
}

std::vector<GlrReplayStep> glr_replay(std::span<const double> bootstrap,
                                      std::span<const double> stream,
                                      double threshold, double min_jump,
                                      std::size_t window, double psi_floor,
                                      std::int64_t first_slot) {
  std::vector<double> history(bootstrap.begin(), bootstrap.end());
  std::size_t start = 0;  // first sample of the current segment
  std::vector<GlrReplayStep> out;
  for (double q : stream) {
    history.push_back(q);
    const std::size_t n = history.size();
    double sum = 0.0;
    for (std::size_t t = start; t < n; ++t) sum += history[t];
    const double psi0 =
        std::max(sum / static_cast<double>(n - start), psi_floor);
    const std::size_t from = n > window ? std::max(start, n - window) : start;
    const std::span<const double> view(history.data() + from, n - from);
    const GlrReference scan = glr_full_scan(view, psi0, min_jump);

    GlrReplayStep step;
    step.statistic = scan.statistic;
    if (scan.statistic >= threshold) {
      step.alarm = true;
      start = from + scan.onset;
      step.change_slot = first_slot + static_cast<std::int64_t>(start);
    }
    out.push_back(step);
  }
  return out;
}

double enumerated_decode_success(int deadline, int decode_threshold,
                                 double outage, double delta) {
  if (deadline < 0 || deadline > 24) {
    throw InvalidArgument("enumeration limited to 24 packets");
  }
  double success = 0.0;
  for (unsigned pattern = 0; pattern < (1U << deadline); ++pattern) {
    if (std::popcount(pattern) >= decode_threshold) {
      success += binary_pattern_probability(pattern, deadline, outage);
    }
  }
  return delta * success;
}

double enumerated_completion_pmf(int packets, int decode_threshold,
                                 double outage) {
  if (packets < 1) return 0.0;
  if (packets > 24) throw InvalidArgument("enumeration limited to 24 packets");
  double mass = 0.0;
  const unsigned last = 1U << (packets - 1);
  for (unsigned pattern = 0; pattern < (1U << packets); ++pattern) {
    if ((pattern & last) && std::popcount(pattern) == decode_threshold) {
      mass += binary_pattern_probability(pattern, packets, outage);
    }
  }
  return mass;
}

double enumerated_kth_order_cdf(int k, int packets, int decode_threshold,
                                std::span<const double> outages) {
  const std::size_t n = outages.size();
  if (n > 20) throw InvalidArgument("enumeration limited to 20 users");
  std::vector<double> finished(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    for (int w = 1; w <= packets; ++w) {
      finished[u] += enumerated_completion_pmf(w, decode_threshold, outages[u]);
    }
  }
  double total = 0.0;
  for (std::uint32_t set = 0; set < (1U << n); ++set) {
    if (std::popcount(set) < k) continue;
    double p = 1.0;
    for (std::size_t u = 0; u < n; ++u) {
      p *= (set >> u) & 1U ? finished[u] : 1.0 - finished[u];
    }
    total += p;
  }
  return total;
}

std::vector<double> poisson_duration_law(int deadline, int decode_threshold,
                                         double outage, double mean_users) {
  // F(w) from the negative binomial series, accumulated term by term.
  std::vector<double> f(deadline + 1, 0.0);
  double term = 0.0;
  for (int w = 1; w <= deadline; ++w) {
    if (w == decode_threshold) {
      term = std::pow(1.0 - outage, decode_threshold);
    } else if (w > decode_threshold) {
      term *= outage * static_cast<double>(w - 1) /
              static_cast<double>(w - decode_threshold);
    }
    f[w] = f[w - 1] + (w >= decode_threshold ? term : 0.0);
  }
  // No requesters still costs one packet, so P[T <= 0] = 0 and the atom of
  // the empty requester set sits at w = 1.
  std::vector<double> cdf(deadline + 1, 0.0);
  for (int w = 1; w < deadline; ++w) {
    cdf[w] = std::exp(-mean_users * (1.0 - f[w]));
  }
  cdf[deadline] = 1.0;
  std::vector<double> law(deadline + 1, 0.0);
  for (int w = 1; w <= deadline; ++w) law[w] = cdf[w] - cdf[w - 1];
  return law;
}

double laplace_sinr_cdf(double r, const channel::LinkBudget& link,
                        double power) {
  if (r <= 0.0) return 0.0;
  const double a = link.serving_beta / power;
  double transform = std::exp(-a * r * link.noise_power);
  for (const auto& i : link.interferers) {
    const double b = i.beta / i.power;
    transform *= b / (b + a * r);
  }
  return 1.0 - transform;
}

double sinr_pdf_mass(const channel::LinkBudget& link, double power) {
  auto pdf = [&](double r) { return channel::sinr_pdf(r, link, power); };
  boost::math::quadrature::tanh_sinh<double> head;
  boost::math::quadrature::exp_sinh<double> tail;
  return head.integrate(pdf, 0.0, 1.0) +
         tail.integrate(pdf, 1.0, std::numeric_limits<double>::infinity());
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw EmptySample("no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f,
                  f - static_cast<double>(i) / n});
  }
  return d;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  const std::size_t n = std::max(p.size(), q.size());
  double l1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = i < p.size() ? p[i] : 0.0;
    const double b = i < q.size() ? q[i] : 0.0;
    l1 += std::abs(a - b);
  }
  return 0.5 * l1;
}

}  // namespace femtocache::oracles
