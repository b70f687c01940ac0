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

#include "femtocache/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "femtocache/bandit.hpp"
#include "femtocache/channel.hpp"
#include "femtocache/error.hpp"
#include "femtocache/kernels.hpp"
#include "femtocache/oracles.hpp"
#include "femtocache/placement.hpp"
#include "femtocache/popularity.hpp"
#include "femtocache/rateless.hpp"
#include "femtocache/rng.hpp"

namespace femtocache::verify {
namespace {

// Substreams of the verification seed, one per suite.
constexpr std::uint64_t kChannelStream = 101;
constexpr std::uint64_t kRatelessStream = 102;
constexpr std::uint64_t kKnapsackStream = 103;
constexpr std::uint64_t kDetectorStream = 104;
constexpr std::uint64_t kBanditStream = 105;

Check at_most(std::string name, double measured, double tolerance,
              std::string detail = {}) {
  return {std::move(name), measured <= tolerance, measured, tolerance,
          std::move(detail)};
}

Check at_least(std::string name, double measured, double bound,
               std::string detail = {}) {
  return {std::move(name), measured >= bound, measured, bound,
          std::move(detail)};
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Serving link with 0 .. 3 interferers of distinct rates.
channel::LinkBudget random_link(Rng& rng, bool with_noise) {
  channel::LinkBudget link;
  link.serving_beta = uniform(rng, 0.5, 2.0);
  link.noise_power = with_noise ? uniform(rng, 0.1, 1.0) : 0.0;
  const int k = std::uniform_int_distribution<int>(with_noise ? 0 : 1, 3)(rng);
  for (int i = 0; i < k; ++i) {
    // Spread the rates so the partial fractions stay well conditioned.
    link.interferers.push_back(
        {uniform(rng, 0.5, 1.0) * (1.0 + 1.5 * i), uniform(rng, 0.5, 2.0)});
  }
  return link;
}

// Empirical cdf of sorted samples at x.
double empirical_cdf(const std::vector<double>& sorted, double x) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) /
         static_cast<double>(sorted.size());
}

}  // namespace

Component parse_component(std::string_view name) {
  if (name == "channel") return Component::kChannel;
  if (name == "rateless") return Component::kRateless;
  if (name == "knapsack") return Component::kKnapsack;
  if (name == "detector") return Component::kDetector;
  if (name == "bandit") return Component::kBandit;
  throw InvalidArgument(fmt::format("unknown component '{}'", name));
}

std::string_view component_name(Component component) {
  switch (component) {
    case Component::kChannel: return "channel";
    case Component::kRateless: return "rateless";
    case Component::kKnapsack: return "knapsack";
    case Component::kDetector: return "detector";
    case Component::kBandit: return "bandit";
  }
  return "unknown";
}

std::vector<Check> run(Component component, const Options& options) {
  switch (component) {
    case Component::kChannel: return channel_checks(options);
    case Component::kRateless: return rateless_checks(options);
    case Component::kKnapsack: return knapsack_checks(options);
    case Component::kDetector: return detector_checks(options);
    case Component::kBandit: return bandit_checks(options);
  }
  return {};
}

std::vector<Check> channel_checks(const Options& options) {
  std::vector<Check> checks;
  Rng rng = make_rng(options.seed, kChannelStream);
  constexpr std::size_t kDraws = 1000000;
  const double powers[] = {1.0, 2.0, 4.0};

  for (int set = 0; set < 5; ++set) {
    const channel::LinkBudget link = random_link(rng, true);
    const double power = powers[set % 3];
    const channel::SinrDistribution law(link, power);
    const std::string tag =
        fmt::format("set {} ({} interferers, p0={:.3f}, p={})", set,
                    link.interferers.size(), link.noise_power, power);

    checks.push_back(at_most(
        "pdf mass " + tag,
        std::abs(oracles::sinr_pdf_mass(link, power) - 1.0), 1e-6));

    double cdf_gap = 0.0;
    for (int i = 1; i <= 60; ++i) {
      const double r = 0.02 * i * i;
      cdf_gap = std::max(cdf_gap, std::abs(law.cdf(r) -
                                           oracles::laplace_sinr_cdf(
                                               r, link, power)));
    }
    checks.push_back(at_most("cdf vs Laplace form " + tag, cdf_gap, 1e-8));

    auto draws = kernels::sample_sinr_values(
        link, power, kDraws, derive_seed(options.seed, kChannelStream, set + 1),
        options.exec);
    std::sort(draws.begin(), draws.end());
    const double ks_exact = oracles::ks_statistic(
        draws, [&](double r) { return oracles::laplace_sinr_cdf(r, link, power); });
    // The library cdf is evaluated at 2 000 sample quantiles.
    double ks_grid = 0.0;
    for (std::size_t i = 0; i < 2000; ++i) {
      const double x = draws[(2 * i + 1) * kDraws / 4000];
      ks_grid = std::max(ks_grid, std::abs(empirical_cdf(draws, x) - law.cdf(x)));
    }
    checks.push_back(at_most("KS of draws " + tag,
                             std::max(ks_exact, ks_grid), 0.01,
                             fmt::format("closed form {:.2e}, library {:.2e}",
                                         ks_exact, ks_grid)));
  }

  for (int set = 0; set < 5; ++set) {
    const channel::LinkBudget link = random_link(rng, false);
    const double power = powers[set % 3];
    const double u = uniform(rng, 0.2, 1.5);
    const channel::SinrDistribution law(link, power);
    const double analytic = law.interference_limited_cdf(std::expm1(u));
    const double simulated = kernels::empirical_outage(
        link, power, u, kDraws,
        derive_seed(options.seed, kChannelStream, 100 + set), options.exec);
    checks.push_back(at_most(
        fmt::format("interference-limited outage set {} ({} interferers)", set,
                    link.interferers.size()),
        std::abs(analytic - simulated), 0.005,
        fmt::format("analytic {:.5f}, simulated {:.5f}", analytic, simulated)));
  }
  return checks;
}

std::vector<Check> rateless_checks(const Options& options) {
  std::vector<Check> checks;
  const double outages[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  double success_gap = 0.0;
  for (int d = 1; d <= 8; ++d) {
    for (int l = 1; l <= std::min(4, d); ++l) {
      for (double o : outages) {
        for (double delta : {1.0, 0.9}) {
          const rateless::DeliveryPolicy policy{d, delta};
          success_gap = std::max(
              success_gap,
              std::abs(rateless::decode_success_probability(policy, l, o) -
                       oracles::enumerated_decode_success(d, l, o, delta)));
        }
      }
    }
  }
  checks.push_back(at_most("decode success vs enumeration", success_gap, 1e-12));

  double pmf_gap = 0.0;
  double cdf_gap = 0.0;
  for (int l = 1; l <= 4; ++l) {
    for (double o : outages) {
      double cumulative = 0.0;
      for (int w = 1; w <= 14; ++w) {
        const double pmf = oracles::enumerated_completion_pmf(w, l, o);
        cumulative += pmf;
        pmf_gap = std::max(
            pmf_gap, std::abs(rateless::completion_time_pmf(w, l, o) - pmf));
        cdf_gap = std::max(
            cdf_gap,
            std::abs(rateless::completion_time_cdf(w, l, o) - cumulative));
      }
    }
  }
  checks.push_back(at_most("completion pmf vs enumeration", pmf_gap, 1e-12));
  checks.push_back(at_most("completion cdf vs enumeration", cdf_gap, 1e-12));

  Rng rng = make_rng(options.seed, kRatelessStream);
  double order_gap = 0.0;
  double deadline_gap = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 6)(rng);
    const int l = std::uniform_int_distribution<int>(1, 4)(rng);
    const int d = l + std::uniform_int_distribution<int>(0, 6)(rng);
    std::vector<double> users(n);
    for (double& o : users) o = uniform(rng, 0.05, 0.9);
    const rateless::DeliveryPolicy policy{d, 1.0};
    for (int k = 1; k <= n; ++k) {
      for (int w = 1; w <= d; ++w) {
        order_gap = std::max(
            order_gap,
            std::abs(rateless::kth_order_cdf(k, w, l, users) -
                     oracles::enumerated_kth_order_cdf(k, w, l, users)));
      }
      const double at_deadline =
          oracles::enumerated_kth_order_cdf(k, d, l, users) -
          oracles::enumerated_kth_order_cdf(k, d - 1, l, users);
      deadline_gap = std::max(
          deadline_gap,
          std::abs(rateless::kth_order_pmf_at_deadline(k, users, l, policy) -
                   at_deadline));
    }
  }
  checks.push_back(at_most("order statistic cdf vs enumeration", order_gap, 1e-12));
  checks.push_back(
      at_most("order statistic mass at deadline vs enumeration", deadline_gap, 1e-12));

  struct DurationCase {
    int threshold;
    double kappa;
    double outage;
    double mean_users;
  };
  const DurationCase cases[] = {
      {2, 3.0, 0.3, 4.0}, {4, 3.0, 0.5, 8.0}, {3, 2.0, 0.2, 1.5}};
  int index = 0;
  for (const auto& c : cases) {
    const rateless::DeliveryPolicy policy{
        rateless::deadline_for(c.threshold, c.kappa), 1.0};
    const auto users = rateless::UserCountDistribution::poisson(c.mean_users);
    const auto law =
        rateless::duration_distribution(policy, c.threshold, c.outage, users);
    const auto series = oracles::poisson_duration_law(
        policy.deadline, c.threshold, c.outage, c.mean_users);
    const std::string tag = fmt::format("L'={} D={} O={} mean={}", c.threshold,
                                        policy.deadline, c.outage, c.mean_users);
    checks.push_back(at_most("duration law vs Poisson series " + tag,
                             oracles::total_variation(law, series), 1e-8));

    constexpr std::size_t kRuns = 200000;
    const auto hist = kernels::duration_histogram(
        policy, c.threshold, c.outage, users, kRuns,
        derive_seed(options.seed, kRatelessStream, ++index), options.exec);
    std::vector<double> freq(hist.size());
    for (std::size_t i = 0; i < hist.size(); ++i) {
      freq[i] = static_cast<double>(hist[i]) / static_cast<double>(kRuns);
    }
    checks.push_back(at_most("duration law vs Monte Carlo " + tag,
                             oracles::total_variation(law, freq), 0.01));
  }

  // Expected utility against simulated broadcasts.
  const std::vector<double> user_outages{0.1, 0.25, 0.4, 0.55};
  const std::vector<double> request{0.6, 0.3, 0.8, 0.5};
  const rateless::DeliveryPolicy policy{9, 0.95};
  const double analytic =
      rateless::expected_round_utility(user_outages, request, 3, policy, 2.0);
  const double simulated = kernels::simulated_round_utility(
      user_outages, request, 3, policy, 2.0, 400000,
      derive_seed(options.seed, kRatelessStream, 99), options.exec);
  checks.push_back(at_most("expected round utility vs Monte Carlo (relative)",
                           std::abs(analytic - simulated) / analytic, 0.01,
                           fmt::format("analytic {:.5f}, simulated {:.5f}",
                                       analytic, simulated)));
  return checks;
}

std::vector<Check> knapsack_checks(const Options& options) {
  std::vector<Check> checks;
  Rng rng = make_rng(options.seed, kKnapsackStream);
  int mismatches = 0;
  constexpr int kInstances = 1000;
  for (int i = 0; i < kInstances; ++i) {
    placement::PlacementProblem problem;
    const int n = std::uniform_int_distribution<int>(1, 15)(rng);
    problem.capacity = std::uniform_int_distribution<int>(0, 30)(rng);
    // Every fourth instance has small integer values, which makes ties common.
    const bool integral = i % 4 == 0;
    for (int f = 0; f < n; ++f) {
      const int size = std::uniform_int_distribution<int>(1, 10)(rng);
      const double value =
          integral ? std::uniform_int_distribution<int>(1, 5)(rng)
                   : uniform(rng, 0.01, 10.0);
      problem.items.push_back({static_cast<std::size_t>(f), size, value});
    }
    std::shuffle(problem.items.begin(), problem.items.end(), rng);
    const auto dp = placement::solve_knapsack(problem);
    const auto brute = oracles::brute_force_knapsack(problem);
    if (dp.files != brute.files || dp.used != brute.used ||
        std::abs(dp.value - brute.value) > 1e-9 * std::max(1.0, brute.value)) {
      ++mismatches;
    }
  }
  checks.push_back(at_most(
      fmt::format("dynamic program vs brute force on {} instances", kInstances),
      mismatches, 0));

  // Ten-file catalogue before the first change; F is below the threshold.
  const std::vector<int> sizes{1, 1, 2, 5, 6, 3, 5, 4, 3, 7};
  const std::vector<double> intensity{5, 6, 3, 4, 6, 0.1, 1, 4, 7, 5};
  const auto alive = popularity::update_alive(intensity, 0.5);
  const auto problem = placement::make_problem(sizes, intensity, alive, 15);
  const auto dp = placement::solve_knapsack(problem);
  const auto brute = oracles::brute_force_knapsack(problem);
  const std::vector<std::size_t> expected{0, 1, 4, 7, 8};  // A B E H I
  const bool ok = dp.files == brute.files && dp.files == expected &&
                  brute.value == 28.0 && dp.value == 28.0;
  checks.push_back({"reference catalogue optimum {A,B,E,H,I} value 28", ok,
                    dp.value, 28.0,
                    fmt::format("brute force value {}", brute.value)});
  return checks;
}

std::vector<Check> detector_checks(const Options& options) {
  std::vector<Check> checks;
  Rng rng = make_rng(options.seed, kDetectorStream);
  double worst = 0.0;
  int alarm_mismatches = 0;
  int alarms = 0;
  constexpr int kStreams = 100;
  for (int s = 0; s < kStreams; ++s) {
    popularity::GlrConfig config;
    config.threshold = s % 2 ? 10.0 : 5.0;
    config.min_jump = s % 3 == 0 ? 0.5 : 1.0;
    config.window = s % 5 == 0 ? 40 : 500;
    const int kind = s % 3;  // no change, one jump, two jumps
    const double base = uniform(rng, 0.5, 4.0);
    const int boot = std::uniform_int_distribution<int>(10, 50)(rng);
    const int length = std::uniform_int_distribution<int>(100, 200 - boot)(rng);
    const int first = std::uniform_int_distribution<int>(20, length / 2)(rng);
    const int second = std::uniform_int_distribution<int>(first + 10, length - 5)(rng);
    const double jump1 = uniform(rng, 1.0, 4.0) * (s % 4 < 2 ? 1.0 : -0.2);
    const double jump2 = uniform(rng, 1.0, 3.0);

    std::vector<double> bootstrap(boot);
    std::vector<double> stream(length);
    for (double& q : bootstrap) {
      q = static_cast<double>(std::poisson_distribution<int>(base)(rng));
    }
    for (int t = 0; t < length; ++t) {
      double mean = base;
      if (kind >= 1 && t >= first) mean = std::max(0.05, base + jump1);
      if (kind == 2 && t >= second) mean += jump2;
      stream[t] = static_cast<double>(std::poisson_distribution<int>(mean)(rng));
    }

    popularity::DetectorState detector(config, bootstrap, 0);
    const auto reference =
        oracles::glr_replay(bootstrap, stream, config.threshold,
                            config.min_jump, config.window, config.psi_floor);
    for (int t = 0; t < length; ++t) {
      const auto alarm = detector.step(stream[t]);
      const auto& ref = reference[t];
      const double a = detector.last_statistic();
      const double gap =
          std::abs(a - ref.statistic) / std::max(1.0, std::abs(ref.statistic));
      worst = std::max(worst, gap);
      if (alarm.has_value() != ref.alarm ||
          (alarm && alarm->change_slot != ref.change_slot)) {
        ++alarm_mismatches;
      }
      alarms += alarm.has_value();
    }
  }
  checks.push_back(at_most(
      fmt::format("scan statistic vs full replay on {} streams", kStreams),
      worst, 1e-9, fmt::format("{} alarms replayed", alarms)));
  checks.push_back(at_most("alarm slots and onsets vs full replay",
                           alarm_mismatches, 0));

  // A jump smaller than the minimum jump never alarms.
  popularity::GlrConfig config;
  config.min_jump = 5.0;
  std::vector<double> bootstrap(200);
  for (double& q : bootstrap) {
    q = static_cast<double>(std::poisson_distribution<int>(1.0)(rng));
  }
  popularity::DetectorState detector(config, bootstrap, 0);
  int fired = 0;
  for (int t = 0; t < 2000; ++t) {
    const double mean = t < 1000 ? 1.0 : 1.5;
    fired += detector
                 .step(static_cast<double>(
                     std::poisson_distribution<int>(mean)(rng)))
                 .has_value();
  }
  checks.push_back(at_most("minimum jump above the true jump: alarms", fired, 0));
  return checks;
}

std::vector<double> synthetic_regret(std::span<const double> means,
                                     std::int64_t rounds, int seeds,
                                     double beta, double zeta,
                                     std::uint64_t base_seed, Execution exec) {
  const double best = *std::max_element(means.begin(), means.end());
  std::vector<std::vector<double>> per_seed(seeds);
  bandit::PolicyParams params;
  params.beta = beta;
  params.zeta = zeta;
  for_each_index(static_cast<std::size_t>(seeds), exec, [&](std::size_t s) {
    const auto policy = bandit::make_policy(bandit::PolicyKind::kBandit, params);
    bandit::ArmTable table(1);
    std::vector<std::size_t> cache(means.size());
    for (std::size_t f = 0; f < cache.size(); ++f) cache[f] = f;
    table.on_cache_change(cache);
    Rng rng = make_rng(base_seed, kBanditStream, s);
    auto& regret = per_seed[s];
    regret.reserve(rounds);
    double cumulative = 0.0;
    for (std::int64_t r = 1; r <= rounds; ++r) {
      const bandit::ArmId arm = policy->select(table, {r, nullptr}, rng);
      const double p = means[arm.file];
      table.record_reward(arm, std::bernoulli_distribution(p)(rng) ? 1.0 : 0.0);
      cumulative += best - p;
      regret.push_back(cumulative);
    }
  });
  std::vector<double> mean(rounds, 0.0);
  for (const auto& run : per_seed) {
    for (std::int64_t r = 0; r < rounds; ++r) mean[r] += run[r] / seeds;
  }
  return mean;
}

LogFit fit_log(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("log fit needs two or more paired points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    sx += lx;
    sy += y[i];
    sxx += lx * lx;
    sxy += lx * y[i];
  }
  LogFit fit;
  fit.b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.a = (sy - fit.b * sx) / n;
  const double mean_y = sy / n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.a + fit.b * std::log(x[i]));
    ss_res += e * e;
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

std::vector<Check> bandit_checks(const Options& options) {
  std::vector<Check> checks;
  const double index = bandit::ucb_index({4, 2.0}, std::exp(4.0), 1.0, 2.0);
  checks.push_back(at_most("index at mean 2, V=4, round e^4",
                           std::abs(index - (2.0 + std::numbers::sqrt2)), 1e-12));
  checks.push_back(at_most("index at round 1 equals the mean",
                           std::abs(bandit::ucb_index({3, 0.7}, 1.0, 1.0, 2.0) -
                                    0.7),
                           0.0));

  bandit::ArmMap arms{{{0, 0}, {1, 1.0}}, {{1, 0}, {10, 1.0}}};
  checks.push_back({"equal means: the less played arm wins",
                    bandit::select_arm(arms, 5, 1.0, 2.0) == bandit::ArmId{0, 0},
                    0.0, 0.0, {}});

  const std::vector<double> means{0.9, 0.7, 0.5, 0.4, 0.3, 0.1};
  constexpr std::int64_t kRounds = 10000;
  const auto regret = synthetic_regret(
      means, kRounds, 20, 1.0, 2.0, derive_seed(options.seed, kBanditStream),
      options.exec);
  std::vector<double> x, y;
  for (std::int64_t r = 1000; r <= kRounds; r += 10) {
    x.push_back(static_cast<double>(r));
    y.push_back(regret[r - 1]);
  }
  const LogFit fit = fit_log(x, y);
  checks.push_back(at_least("regret fits a + b ln(round), R^2", fit.r_squared,
                            0.9,
                            fmt::format("a={:.3f} b={:.3f}", fit.a, fit.b)));
  const double growth = regret[kRounds - 1] / regret[kRounds / 2 - 1] - 1.0;
  checks.push_back(at_most("regret growth from round 5000 to 10000", growth,
                           0.25,
                           fmt::format("{:.2f} -> {:.2f}", regret[kRounds / 2 - 1],
                                       regret[kRounds - 1])));
  return checks;
}

}  // namespace femtocache::verify
