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

#ifndef FEMTOCACHE_VERIFY_HPP_
#define FEMTOCACHE_VERIFY_HPP_

// Oracle suites behind `femtocache verify`. Each check compares the library
// against an independent reference and records the measured deviation next
// to its tolerance.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "femtocache/parallel.hpp"

namespace femtocache::verify {

enum class Component { kChannel, kRateless, kKnapsack, kDetector, kBandit };

Component parse_component(std::string_view name);
std::string_view component_name(Component component);

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct Options {
  std::uint64_t seed = 1;
  Execution exec = Execution::kParallel;
};

std::vector<Check> run(Component component, const Options& options = {});

// Individual suites, also used by the acceptance tests.
std::vector<Check> channel_checks(const Options& options);
std::vector<Check> rateless_checks(const Options& options);
std::vector<Check> knapsack_checks(const Options& options);
std::vector<Check> detector_checks(const Options& options);
std::vector<Check> bandit_checks(const Options& options);

// Stationary Bernoulli bandit played by the mortal-arms UCB policy with every
// arm cached. Returns the seed-averaged cumulative pseudo-regret after each
// round 1 .. rounds.
std::vector<double> synthetic_regret(std::span<const double> means,
                                     std::int64_t rounds, int seeds,
                                     double beta, double zeta,
                                     std::uint64_t base_seed, Execution exec);

struct LogFit {
  double a = 0.0;
  double b = 0.0;
  double r_squared = 0.0;
};

// Least squares fit of y = a + b ln(x).
LogFit fit_log(std::span<const double> x, std::span<const double> y);

}  // namespace femtocache::verify

#endif  // FEMTOCACHE_VERIFY_HPP_
