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

#include "femtocache/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "femtocache/error.hpp"

namespace femtocache::channel {

void CellGeometry::validate() const {
  if (!(radius > 0.0)) throw InvalidArgument("cell radius must be positive");
  if (!(user_density > 0.0)) {
    throw InvalidArgument("user density must be positive");
  }
  if (sbs_positions.empty()) {
    throw InvalidArgument("at least one SBS position is required");
  }
  for (std::size_t i = 0; i < sbs_positions.size(); ++i) {
    for (std::size_t j = i + 1; j < sbs_positions.size(); ++j) {
      const double dx = sbs_positions[i].x - sbs_positions[j].x;
      const double dy = sbs_positions[i].y - sbs_positions[j].y;
      if (std::hypot(dx, dy) <= 2.0 * radius) {
        throw InvalidArgument(
            fmt::format("SBS {} and {} share a cell disc of radius {}", i, j,
                        radius));
      }
    }
  }
}

std::uint64_t draw_user_count(const CellGeometry& geometry, Rng& rng) {
  const double mean = geometry.mean_user_count();
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::uint64_t> count(mean);
  return count(rng);
}

std::uint64_t draw_user_count(const CellGeometry& geometry,
                              std::uint64_t seed) {
  Rng rng(seed);
  return draw_user_count(geometry, rng);
}

std::vector<Point> draw_user_positions(const CellGeometry& geometry,
                                       std::size_t sbs, std::size_t count,
                                       Rng& rng) {
  if (sbs >= geometry.sbs_positions.size()) {
    throw InvalidArgument("SBS index out of range");
  }
  const Point center = geometry.sbs_positions[sbs];
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> users;
  users.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double rho = geometry.radius * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    users.push_back({center.x + rho * std::cos(phi),
                     center.y + rho * std::sin(phi)});
  }
  return users;
}

PowerSet::PowerSet(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw InvalidArgument("power set is empty");
  if (!(levels_.front() > 0.0)) {
    throw InvalidArgument("power levels must be positive");
  }
  for (std::size_t i = 1; i < levels_.size(); ++i) {
    if (!(levels_[i] > levels_[i - 1])) {
      throw InvalidArgument("power levels must be strictly increasing");
    }
  }
}

bool PowerSet::contains(double power) const {
  return std::find(levels_.begin(), levels_.end(), power) != levels_.end();
}

void FadingParams::validate() const {
  if (beta.empty()) throw InvalidArgument("fading parameters are empty");
  for (double b : beta) {
    if (!(b > 0.0)) throw InvalidArgument("fading rates must be positive");
  }
  if (!(noise_power >= 0.0)) {
    throw InvalidArgument("noise power must be non-negative");
  }
}

namespace {

void check_serving(std::size_t serving_sbs, std::span<const double> tx_powers,
                   const FadingParams& params, const PowerSet& powers) {
  params.validate();
  if (serving_sbs >= params.beta.size() ||
      tx_powers.size() != params.beta.size()) {
    throw InvalidArgument("tx power and fading vectors must cover every SBS");
  }
  if (!powers.contains(tx_powers[serving_sbs])) {
    throw InvalidArgument(fmt::format("serving power {} is not a power level",
                                      tx_powers[serving_sbs]));
  }
}

double interferer_power(std::size_t sbs, std::span<const double> tx_powers,
                        const PowerSet& powers, InterferenceMode mode) {
  return mode == InterferenceMode::kWorstCase ? powers.max() : tx_powers[sbs];
}

}  // namespace

SinrSample sample_sinr(std::size_t user, std::size_t serving_sbs,
                       std::span<const double> tx_powers,
                       const FadingParams& params, const PowerSet& powers,
                       InterferenceMode mode, Rng& rng) {
  check_serving(serving_sbs, tx_powers, params, powers);
  double interference = params.noise_power;
  double signal = 0.0;
  for (std::size_t m = 0; m < params.beta.size(); ++m) {
    std::exponential_distribution<double> gain(params.beta[m]);
    const double g = gain(rng);
    if (m == serving_sbs) {
      signal = tx_powers[m] * g;
    } else {
      interference += interferer_power(m, tx_powers, powers, mode) * g;
    }
  }
  SinrSample sample;
  sample.serving_sbs = serving_sbs;
  sample.user = user;
  sample.value = interference > 0.0
                     ? signal / interference
                     : std::numeric_limits<double>::infinity();
  return sample;
}

SinrSample sample_sinr(std::size_t user, std::size_t serving_sbs,
                       std::span<const double> tx_powers,
                       const FadingParams& params, const PowerSet& powers,
                       InterferenceMode mode, std::uint64_t seed) {
  Rng rng(seed);
  return sample_sinr(user, serving_sbs, tx_powers, params, powers, mode, rng);
}

LinkBudget LinkBudget::from_fading(const FadingParams& params,
                                   std::size_t serving_sbs,
                                   std::span<const double> tx_powers,
                                   const PowerSet& powers,
                                   InterferenceMode mode) {
  check_serving(serving_sbs, tx_powers, params, powers);
  LinkBudget link;
  link.serving_beta = params.beta[serving_sbs];
  link.noise_power = params.noise_power;
  for (std::size_t m = 0; m < params.beta.size(); ++m) {
    if (m == serving_sbs) continue;
    const double p = interferer_power(m, tx_powers, powers, mode);
    if (p > 0.0) link.interferers.push_back({params.beta[m], p});
  }
  return link;
}

SinrDistribution::SinrDistribution(const LinkBudget& link,
                                   double serving_power, TiePolicy ties)
    : noise_(link.noise_power) {
  if (!(serving_power > 0.0)) {
    throw InvalidArgument("serving power must be positive");
  }
  if (!(link.serving_beta > 0.0)) {
    throw InvalidArgument("serving fading rate must be positive");
  }
  if (!(noise_ >= 0.0)) throw InvalidArgument("noise power must be >= 0");
  serving_rate_ = link.serving_beta / serving_power;

  rates_.reserve(link.interferers.size());
  for (const Interferer& i : link.interferers) {
    if (!(i.beta > 0.0) || !(i.power > 0.0)) {
      throw InvalidArgument("interferer rate and power must be positive");
    }
    double rate = i.beta / i.power;
    // Nudge the later of two (near-)equal rates until it is distinct from
    // every earlier one; the partial-fraction coefficients need that.
    for (bool clash = true; clash;) {
      clash = false;
      for (double earlier : rates_) {
        if (std::abs(rate - earlier) <=
            kTieRelativeTolerance * std::max(rate, earlier)) {
          if (ties == TiePolicy::kReject) {
            throw DegenerateRates(fmt::format(
                "interference rates {} and {} coincide", earlier, rate));
          }
          rate *= 1.0 + kTieJitter;
          jittered_ = true;
          clash = true;
        }
      }
    }
    rates_.push_back(rate);
  }

  coefficients_.resize(rates_.size());
  for (std::size_t i = 0; i < rates_.size(); ++i) {
    double a = 1.0;
    for (std::size_t l = 0; l < rates_.size(); ++l) {
      if (l != i) a *= rates_[l] / (rates_[l] - rates_[i]);
    }
    coefficients_[i] = a;
  }
}

double SinrDistribution::pdf(double r) const {
  if (r < 0.0) return 0.0;
  const double a = serving_rate_;
  if (rates_.empty()) {
    // No interference: R = X / p0 is exponential with rate a * p0.
    if (noise_ == 0.0) return 0.0;
    return a * noise_ * std::exp(-a * noise_ * r);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < rates_.size(); ++i) {
    const double b = rates_[i];
    const double s = a * r + b;
    total += a * b * coefficients_[i] * (s * noise_ + 1.0) / (s * s);
  }
  return std::exp(-a * noise_ * r) * total;
}

double SinrDistribution::interference_limited_cdf(double r) const {
  if (r <= 0.0) return 0.0;
  if (rates_.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < rates_.size(); ++i) {
    total += coefficients_[i] * r / (r + rates_[i] / serving_rate_);
  }
  return std::clamp(total, 0.0, 1.0);
}

double SinrDistribution::interference_pdf(double y) const {
  if (y < 0.0 || rates_.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < rates_.size(); ++i) {
    total += coefficients_[i] * rates_[i] * std::exp(-rates_[i] * y);
  }
  return total;
}

double SinrDistribution::tail_cutoff() const {
  if (noise_ == 0.0) return std::numeric_limits<double>::infinity();
  // 1 - F(r) = e^{-a p0 r} sum_i A_i b_i / (b_i + a r) <= e^{-a p0 r} sum |A_i|.
  double mass = 1.0;
  if (!rates_.empty()) {
    mass = 0.0;
    for (double c : coefficients_) mass += std::abs(c);
  }
  return std::max(0.0, std::log(mass / 1e-10) / (serving_rate_ * noise_));
}

double SinrDistribution::cdf(double r) const {
  if (r <= 0.0) return 0.0;
  if (rates_.empty()) {
    if (noise_ == 0.0) return 0.0;
    return -std::expm1(-serving_rate_ * noise_ * r);
  }
  if (noise_ == 0.0) return interference_limited_cdf(r);

  const double upper = std::min(r, tail_cutoff());
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [this](double x) { return pdf(x); }, 0.0, upper, 20, 1e-11, &error);
  return std::clamp(value, 0.0, 1.0);
}

double sinr_pdf(double r, const LinkBudget& link, double serving_power,
                TiePolicy ties) {
  return SinrDistribution(link, serving_power, ties).pdf(r);
}

double outage_probability(double power, double min_rate_nats,
                          const LinkBudget& link, TiePolicy ties) {
  if (!(min_rate_nats > 0.0)) {
    throw InvalidArgument("minimum rate must be positive");
  }
  const double threshold = std::expm1(min_rate_nats);
  if (std::isinf(threshold)) return 1.0;
  return SinrDistribution(link, power, ties).cdf(threshold);
}

}  // namespace femtocache::channel
