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

#ifndef FEMTOCACHE_CHANNEL_HPP_
#define FEMTOCACHE_CHANNEL_HPP_

// Wireless layer: Poisson user placement, Rayleigh block fading, SINR and
// per-packet outage. Channel gains |H|^2 are exponential with rate beta, so a
// link received at power p has an exponential signal term with rate beta / p.
// Path loss is not modeled; beta carries all link quality.
//
// Rates are in nats per channel use. Use bits_to_nats() for rates in bits.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "femtocache/rng.hpp"

namespace femtocache::channel {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct CellGeometry {
  double radius = 1.0;
  double user_density = 1.0;  // users per unit area
  std::vector<Point> sbs_positions{Point{}};

  // Throws InvalidArgument. Any disc of `radius` may hold at most one SBS,
  // so base stations must be more than 2 * radius apart.
  void validate() const;

  // lambda * pi * d^2
  double mean_user_count() const {
    return user_density * std::numbers::pi * radius * radius;
  }
};

std::uint64_t draw_user_count(const CellGeometry& geometry, Rng& rng);
std::uint64_t draw_user_count(const CellGeometry& geometry, std::uint64_t seed);

// Uniform positions in the disc around SBS `sbs` (conditional HPPP property).
std::vector<Point> draw_user_positions(const CellGeometry& geometry,
                                       std::size_t sbs, std::size_t count,
                                       Rng& rng);

class PowerSet {
 public:
  // Levels must be positive and strictly increasing.
  explicit PowerSet(std::vector<double> levels);

  std::size_t size() const { return levels_.size(); }
  double operator[](std::size_t i) const { return levels_[i]; }
  double min() const { return levels_.front(); }
  double max() const { return levels_.back(); }
  bool contains(double power) const;
  std::span<const double> levels() const { return levels_; }

 private:
  std::vector<double> levels_;
};

// Fading of one user towards every SBS.
struct FadingParams {
  std::vector<double> beta;  // beta[m] is the rate of |H_{n,m}|^2
  double noise_power = 0.0;

  void validate() const;
};

struct SinrSample {
  double value = 0.0;
  std::size_t serving_sbs = 0;
  std::size_t user = 0;
};

// kWorstCase replaces every interferer power by the largest level.
enum class InterferenceMode { kActual, kWorstCase };

SinrSample sample_sinr(std::size_t user, std::size_t serving_sbs,
                       std::span<const double> tx_powers,
                       const FadingParams& params, const PowerSet& powers,
                       InterferenceMode mode, Rng& rng);
SinrSample sample_sinr(std::size_t user, std::size_t serving_sbs,
                       std::span<const double> tx_powers,
                       const FadingParams& params, const PowerSet& powers,
                       InterferenceMode mode, std::uint64_t seed);

struct Interferer {
  double beta = 1.0;
  double power = 1.0;
};

// Everything needed to describe the SINR law of one link, except the serving
// power, which is the decision variable.
struct LinkBudget {
  double serving_beta = 1.0;
  std::vector<Interferer> interferers;
  double noise_power = 0.0;

  static LinkBudget from_fading(const FadingParams& params,
                                std::size_t serving_sbs,
                                std::span<const double> tx_powers,
                                const PowerSet& powers, InterferenceMode mode);
};

enum class TiePolicy { kJitter, kReject };

inline constexpr double kTieRelativeTolerance = 1e-9;
inline constexpr double kTieJitter = 1e-6;

// Law of R = X / (Y + p0) with X ~ Exp(a) and Y a sum of independent
// exponentials with pairwise distinct rates b_i. The interference density is
// the hypoexponential partial-fraction form sum_i A_i b_i exp(-b_i y) with
// A_i = prod_{l != i} b_l / (b_l - b_i).
class SinrDistribution {
 public:
  SinrDistribution(const LinkBudget& link, double serving_power,
                   TiePolicy ties = TiePolicy::kJitter);

  double pdf(double r) const;

  // P[R <= r]. Closed form without noise or without interferers; adaptive
  // Gauss-Kronrod quadrature of pdf() otherwise.
  double cdf(double r) const;

  // P[R <= r] with the noise term dropped:
  // sum_i A_i r / (r + b_i / a).
  double interference_limited_cdf(double r) const;

  // Density of the aggregate interference Y.
  double interference_pdf(double y) const;

  double serving_rate() const { return serving_rate_; }
  std::span<const double> interferer_rates() const { return rates_; }
  std::span<const double> coefficients() const { return coefficients_; }
  double noise_power() const { return noise_; }
  bool jittered() const { return jittered_; }

  // Point beyond which the analytic tail 1 - F is below 1e-10 (finite only
  // when the noise power is positive).
  double tail_cutoff() const;

 private:
  double serving_rate_ = 1.0;
  std::vector<double> rates_;
  std::vector<double> coefficients_;
  double noise_ = 0.0;
  bool jittered_ = false;
};

double sinr_pdf(double r, const LinkBudget& link, double serving_power,
                TiePolicy ties = TiePolicy::kJitter);

// P[log(1 + SINR) < min_rate] = F_R(e^{min_rate} - 1).
double outage_probability(double power, double min_rate_nats,
                          const LinkBudget& link,
                          TiePolicy ties = TiePolicy::kJitter);

inline double bits_to_nats(double bits) { return bits * std::numbers::ln2; }

}  // namespace femtocache::channel

#endif  // FEMTOCACHE_CHANNEL_HPP_
