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

#ifndef FEMTOCACHE_ORACLES_HPP_
#define FEMTOCACHE_ORACLES_HPP_

// Reference implementations used to check the library. Each one takes a
// different route to the same quantity (enumeration, direct summation, a
// transform identity or generic quadrature) and none of them calls the code
// it checks. They are slow by design and meant for small instances.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "femtocache/channel.hpp"
#include "femtocache/placement.hpp"

namespace femtocache::oracles {

// Enumerates all 2^n subsets. Among subsets whose value is within the
// placement tie tolerance of the best, returns the lexicographically
// smallest ascending id list. Requires n <= 24.
placement::KnapsackSolution brute_force_knapsack(
    const placement::PlacementProblem& problem);

struct GlrReference {
  double statistic = 0.0;
  std::size_t onset = 0;
  double psi1 = 0.0;
};

// For every onset, sums the per-sample log-likelihood ratio directly at each
// candidate post-change mean (the segment mean when admissible, both edges
// of the admissible set, and the psi1 -> 0 limit for all-zero segments) and
// keeps the largest. Later onsets win ties.
GlrReference glr_full_scan(std::span<const double> window, double psi0,
                           double min_jump);

struct GlrReplayStep {
  double statistic = 0.0;
  bool alarm = false;
  std::int64_t change_slot = 0;
};

// Replays the detector protocol from scratch on a full stream: keeps the
// whole history, recomputes the reference mean and the windowed scan with
// glr_full_scan at every slot, and restarts at the onset after an alarm.
std::vector<GlrReplayStep> glr_replay(std::span<const double> bootstrap,
                                      std::span<const double> stream,
                                      double threshold, double min_jump,
                                      std::size_t window, double psi_floor,
                                      std::int64_t first_slot = 0);

// P[at least L' of D packets arrive] * delta over all 2^D erasure patterns.
double enumerated_decode_success(int deadline, int decode_threshold,
                                 double outage, double delta);

// P[the L'-th arrival is packet w] over all 2^w erasure patterns.
double enumerated_completion_pmf(int packets, int decode_threshold,
                                 double outage);

// P[at least k of the users have finished by w] by enumerating which users
// finished, with per-user completion cdf obtained by summing
// enumerated_completion_pmf.
double enumerated_kth_order_cdf(int k, int packets, int decode_threshold,
                                std::span<const double> outages);

// Law of the broadcast duration (index 0 .. D) for a Poisson number of
// i.i.d. requesters, through the generating function
// P[T <= w] = exp(-mean * (1 - F(w))).
std::vector<double> poisson_duration_law(int deadline, int decode_threshold,
                                         double outage, double mean_users);

// P[X / (Y + p0) <= r] = 1 - exp(-a r p0) prod_i b_i / (b_i + a r), from
// the Laplace transform of the interference.
double laplace_sinr_cdf(double r, const channel::LinkBudget& link,
                        double power);

// Integral of the SINR density over [0, inf) by tanh-sinh on [0, 1] and
// exp-sinh on [1, inf).
double sinr_pdf_mass(const channel::LinkBudget& link, double power);

// sup_x |F_n(x) - F(x)| of a sample against a continuous cdf.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

// Half the l1 distance; the shorter vector is padded with zeros.
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace femtocache::oracles

#endif  // FEMTOCACHE_ORACLES_HPP_
