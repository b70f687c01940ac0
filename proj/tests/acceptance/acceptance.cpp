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

// Scenario-level acceptance checks. Prints one PASS or FAIL line per
// criterion and exits nonzero if any criterion fails.
//
// usage: acceptance <scenario.json> <video.json>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <fmt/format.h>

#include "femtocache/config.hpp"
#include "femtocache/error.hpp"
#include "femtocache/oracles.hpp"
#include "femtocache/parallel.hpp"
#include "femtocache/placement.hpp"
#include "femtocache/simulator.hpp"
#include "femtocache/trace_io.hpp"
#include "femtocache/verify.hpp"

namespace fc = femtocache;
namespace fs = std::filesystem;
using fc::bandit::PolicyKind;

namespace {

constexpr int kSeeds = 20;
constexpr PolicyKind kKinds[] = {PolicyKind::kBandit, PolicyKind::kOracle,
                                 PolicyKind::kGreedy, PolicyKind::kEpsFixed,
                                 PolicyKind::kEpsDecreasing};
constexpr std::size_t kBandit = 0, kOracle = 1;

int failures = 0;

void report(int id, const std::string& name, bool pass,
            const std::string& detail) {
  failures += !pass;
  std::cout << fmt::format("{} {:>2} {}: {}\n", pass ? "PASS" : "FAIL", id,
                           name, detail)
            << std::flush;
}

// One-sided sign test: P[wins or more | fair coin], ties dropped.
double sign_test_p(int wins, int losses) {
  const int n = wins + losses;
  if (n == 0 || wins == 0) return 1.0;
  const boost::math::binomial coin(n, 0.5);
  return boost::math::cdf(boost::math::complement(coin, wins - 1));
}

std::string summarize(const std::vector<fc::verify::Check>& checks) {
  int passed = 0;
  std::string first_failure;
  for (const auto& c : checks) {
    if (c.pass) {
      ++passed;
    } else if (first_failure.empty()) {
      first_failure = fmt::format("; first failure {} measured {:.3e} bound {:.3e}",
                                  c.name, c.measured, c.tolerance);
    }
  }
  return fmt::format("{}/{} oracle checks{}", passed, checks.size(),
                     first_failure);
}

bool all_pass(const std::vector<fc::verify::Check>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const auto& c) { return c.pass; });
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t file_index(const fc::config::ScenarioConfig& config,
                       const std::string& label) {
  for (std::size_t f = 0; f < config.files.size(); ++f) {
    if (config.files[f].label == label) return f;
  }
  throw fc::InvalidArgument("no file labelled " + label);
}

struct Runs {
  // traces[seed - 1][kind]
  std::vector<std::vector<fc::simulator::ScenarioTrace>> traces;
  std::vector<std::vector<fc::simulator::Metrics>> metrics;
};

Runs run_all(const fc::config::ScenarioConfig& config) {
  Runs runs;
  runs.traces.resize(kSeeds);
  runs.metrics.resize(kSeeds);
  constexpr std::size_t kPolicies = std::size(kKinds);
  for (auto& row : runs.traces) row.resize(kPolicies);
  fc::for_each_index(kSeeds * kPolicies, fc::Execution::kParallel,
                     [&](std::size_t task) {
                       const std::size_t s = task / kPolicies;
                       const std::size_t k = task % kPolicies;
                       runs.traces[s][k] =
                           fc::simulator::run_scenario(config, s + 1, kKinds[k]);
                     });
  for (int s = 0; s < kSeeds; ++s) {
    for (const auto& trace : runs.traces[s]) {
      runs.metrics[s].push_back(fc::simulator::compute_metrics(trace, config));
    }
  }
  return runs;
}

void detection(const fc::config::ScenarioConfig& config, const Runs& runs) {
  double delay_sum = 0.0;
  int detected = 0, expected = 0;
  std::uint64_t worst_false = 0;
  for (int s = 0; s < kSeeds; ++s) {
    const auto& m = runs.metrics[s][kBandit];
    for (const auto& d : m.detections) {
      ++expected;
      if (d.detected) {
        ++detected;
        delay_sum += static_cast<double>(d.delay);
      }
    }
    for (auto n : m.false_alarms) worst_false = std::max(worst_false, n);
  }
  std::string files;
  for (const auto& c : fc::simulator::true_changes(config)) {
    files += fmt::format("{}@{} ", config.files[c.file].label, c.slot);
  }
  const double mean_delay = detected ? delay_sum / detected : INFINITY;
  report(1, "scenario change detection",
         expected > 0 && detected == expected && mean_delay <= 100.0 &&
             worst_false <= 1,
         fmt::format("changes {}detected {}/{}, mean delay {:.1f} slots "
                     "(<= 100), max false alarms per file per run {} (<= 1)",
                     files, detected, expected, mean_delay, worst_false));
}

void cache_adaptivity(const fc::config::ScenarioConfig& config,
                      const Runs& runs) {
  std::vector<int> sizes;
  for (const auto& f : config.files) sizes.push_back(f.size);
  const std::size_t b = file_index(config, "B");
  const std::size_t a = file_index(config, "A");
  const double alpha = config.detector.alive_threshold;
  int cells = 0, matches = 0, unsolved = 0, stale = 0;
  for (int s = 0; s < kSeeds; ++s) {
    const auto& events = runs.traces[s][kBandit].cache_events;
    for (std::size_t e = 1; e < events.size(); ++e) {
      const auto& ev = events[e];
      if (!ev.solved) {
        ++unsolved;
        continue;
      }
      ++cells;
      fc::placement::PlacementProblem problem;
      problem.capacity = config.cache_capacity;
      for (std::size_t f : ev.alive) {
        problem.items.push_back({f, sizes[f], ev.estimates[f]});
      }
      matches += fc::oracles::brute_force_knapsack(problem).files == ev.contents;
      auto holds = [&](std::size_t f) {
        return std::find(ev.contents.begin(), ev.contents.end(), f) !=
               ev.contents.end();
      };
      if (ev.slot >= 1500 && ev.estimates[b] < alpha && holds(b)) ++stale;
      if (ev.slot >= 3000 && ev.estimates[a] < alpha && holds(a)) ++stale;
    }
  }
  const double share = cells ? static_cast<double>(matches) / cells : 0.0;
  report(2, "cache adaptivity", cells > 0 && share >= 0.95 && stale == 0,
         fmt::format("{}/{} re-solves equal the brute-force optimum ({:.1f}% "
                     ">= 95%), {} skipped with an empty alive set, {} caches "
                     "holding a dead B or A",
                     matches, cells, 100.0 * share, unsolved, stale));
}

void convergence(const Runs& runs) {
  std::vector<std::vector<double>> tail(std::size(kKinds));
  for (int s = 0; s < kSeeds; ++s) {
    for (std::size_t k = 0; k < std::size(kKinds); ++k) {
      tail[k].push_back(fc::simulator::tail_utility(runs.traces[s][k], 0.2));
    }
  }
  auto mean = [](const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
  };
  const double ratio = mean(tail[kBandit]) / mean(tail[kOracle]);
  bool pass = ratio >= 0.9;
  std::string detail = fmt::format("bandit/oracle {:.3f} (>= 0.9)", ratio);
  for (std::size_t k = 2; k < std::size(kKinds); ++k) {
    int wins = 0, losses = 0;
    for (int s = 0; s < kSeeds; ++s) {
      wins += tail[kBandit][s] > tail[k][s];
      losses += tail[kBandit][s] < tail[k][s];
    }
    const double p = sign_test_p(wins, losses);
    pass = pass && wins * 2 > kSeeds && p < 0.05;
    detail += fmt::format("; vs {} {}-{} p={:.4f}",
                          fc::bandit::policy_name(kKinds[k]), wins, losses, p);
  }
  report(3, "bandit convergence", pass, detail);
}

void concentration(const Runs& runs) {
  int agreeing_seeds = 0;
  for (int s = 0; s < kSeeds; ++s) {
    const auto& b = runs.metrics[s][kBandit].modal_actions;
    const auto& o = runs.metrics[s][kOracle].modal_actions;
    int same = 0;
    for (std::size_t i = 0; i < std::min(b.size(), o.size()); ++i) {
      same += b[i].has_value() && b[i] == o[i];
    }
    agreeing_seeds += same >= 2;
  }
  report(4, "action concentration", agreeing_seeds * 2 > kSeeds,
         fmt::format("modal action equals the oracle's in >= 2 of 3 segments "
                     "in {}/{} seeds (majority)",
                     agreeing_seeds, kSeeds));
}

void regret_shape() {
  const std::vector<double> means{0.9, 0.7, 0.5, 0.4, 0.3, 0.1};
  const auto regret = fc::verify::synthetic_regret(
      means, 10000, kSeeds, 1.0, 2.0, 1, fc::Execution::kParallel);
  std::vector<double> x, y;
  for (int r = 1000; r <= 10000; r += 10) {
    x.push_back(r);
    y.push_back(regret[r - 1]);
  }
  const auto fit = fc::verify::fit_log(x, y);
  const double growth = regret[9999] / regret[4999] - 1.0;
  report(5, "regret shape", fit.r_squared >= 0.9 && growth < 0.25,
         fmt::format("fit {:.2f} + {:.2f} ln(t), R^2 {:.4f} (>= 0.9); "
                     "growth 5e3 -> 1e4 {:.1f}% (< 25%)",
                     fit.a, fit.b, fit.r_squared, 100.0 * growth));
}

void oracle_suites() {
  const fc::verify::Options options{1, fc::Execution::kParallel};
  auto checks = fc::verify::channel_checks(options);
  const auto rateless = fc::verify::rateless_checks(options);
  checks.insert(checks.end(), rateless.begin(), rateless.end());
  report(6, "distribution oracles", all_pass(checks), summarize(checks));
  const auto knapsack = fc::verify::knapsack_checks(options);
  report(7, "knapsack exactness", all_pass(knapsack), summarize(knapsack));
  const auto detector = fc::verify::detector_checks(options);
  report(8, "GLR oracle", all_pass(detector), summarize(detector));
}

void video(const fc::config::VideoConfig& config) {
  const auto rows = fc::simulator::run_video_experiment(config);
  const std::size_t n = config.sinr_db.size();
  int monotone = 0, ordered = 0, drops = 0;
  for (std::size_t d = 0; d < config.deadlines.size(); ++d) {
    bool ok = true, high = false, low = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = rows[d * n + i].outage;
      if (i > 0 && v > rows[d * n + i - 1].outage) ok = false;
      high |= v > 0.9;
      low |= high && v < 0.01;
    }
    monotone += ok;
    drops += high && low;
  }
  // Deadlines are compared in ascending order of looseness.
  std::vector<std::size_t> order(config.deadlines.size());
  for (std::size_t d = 0; d < order.size(); ++d) order[d] = d;
  std::sort(order.begin(), order.end(), [&](auto l, auto r) {
    return config.deadlines[l] < config.deadlines[r];
  });
  for (std::size_t j = 1; j < order.size(); ++j) {
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      ok = ok && rows[order[j] * n + i].outage <=
                     rows[order[j - 1] * n + i].outage + 0.01;
    }
    ordered += ok;
  }
  const int curves = static_cast<int>(config.deadlines.size());
  report(9, "video outage curves",
         monotone == curves && ordered == curves - 1 && drops == curves,
         fmt::format("{} curves: {} nonincreasing, {}/{} adjacent pairs "
                     "ordered by deadline (+-0.01), {} with a drop from > 0.9 "
                     "to < 0.01",
                     curves, monotone, ordered, curves - 1, drops));
}

void determinism(const fc::config::ScenarioConfig& base, const Runs& runs) {
  auto config = base;
  config.record_detector_trace = true;
  config.record_arm_values = true;
  const fs::path root = fs::temp_directory_path() / "femtocache_acceptance";
  fs::remove_all(root);
  std::vector<std::vector<fs::path>> written;
  for (int i = 0; i < 2; ++i) {
    const fs::path dir = root / std::to_string(i);
    fs::create_directories(dir);
    const auto trace = fc::simulator::run_scenario(config, 1, PolicyKind::kBandit);
    written.push_back(fc::io::write_run_artifacts(
        dir, trace, fc::simulator::compute_metrics(trace, config), config,
        fc::io::Format::kCsv));
  }
  bool identical = written[0].size() == written[1].size() && !written[0].empty();
  for (std::size_t i = 0; identical && i < written[0].size(); ++i) {
    identical = written[0][i].filename() == written[1][i].filename() &&
                slurp(written[0][i]) == slurp(written[1][i]);
  }
  fs::remove_all(root);

  int traces = 0, conserved = 0;
  for (int s = 0; s < kSeeds; ++s) {
    for (std::size_t k = 0; k < std::size(kKinds); ++k) {
      const auto& trace = runs.traces[s][k];
      double total = 0.0;
      bool ok = true;
      for (const auto& r : trace.rounds) {
        ok = ok && r.energy == r.power * r.duration;
        total += r.power * r.duration;
      }
      ok = ok && runs.metrics[s][k].energy == total;
      ++traces;
      conserved += ok;
    }
  }
  report(10, "determinism and conservation", identical && conserved == traces,
         fmt::format("{} artifact files byte-identical across reruns: {}; "
                     "energy == sum power x duration in {}/{} traces",
                     written[0].size(), identical ? "yes" : "no", conserved,
                     traces));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <scenario.json> <video.json>\n";
    return 2;
  }
  try {
    auto scenario = fc::config::load_scenario(argv[1]);
    const auto video_config = fc::config::load_video(argv[2]);

    const Runs runs = run_all(scenario);
    detection(scenario, runs);
    cache_adaptivity(scenario, runs);
    convergence(runs);
    concentration(runs);
    regret_shape();
    oracle_suites();
    video(video_config);
    determinism(scenario, runs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::cout << (failures ? fmt::format("{} criteria failed\n", failures)
                         : std::string("all criteria passed\n"));
  return failures ? 1 : 0;
}
