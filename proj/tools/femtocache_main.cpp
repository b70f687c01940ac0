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

// Command-line front end: scenario runs, oracle verification and the
// playback-deadline experiment.
//
// Exit codes: 0 ok, 1 usage, 2 invalid configuration or input, 3 an oracle
// check failed.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "femtocache/config.hpp"
#include "femtocache/error.hpp"
#include "femtocache/simulator.hpp"
#include "femtocache/trace_io.hpp"
#include "femtocache/verify.hpp"

namespace fc = femtocache;
namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitOracle = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimulateArgs {
  std::string config;
  std::vector<std::uint64_t> seeds;
  int replications = 0;
  std::string out = "out";
  std::string format = "csv";
  std::vector<std::string> policies;
  bool serial = false;
};

struct VerifyArgs {
  std::vector<std::string> components;
  std::uint64_t seed = 1;
  bool serial = false;
};

struct VideoArgs {
  std::string config;
  std::vector<std::uint64_t> seeds;
  std::string out = "out";
  std::string format = "csv";
  bool serial = false;
};

fc::Execution execution(bool serial) {
  return serial ? fc::Execution::kSerial : fc::Execution::kParallel;
}

std::vector<std::uint64_t> resolve_seeds(const SimulateArgs& args,
                                         const fc::config::ScenarioConfig& c) {
  if (!args.seeds.empty()) {
    if (args.replications > 0 &&
        static_cast<std::size_t>(args.replications) != args.seeds.size()) {
      throw UsageError(
          fmt::format("--replications {} does not match {} --seed values",
                      args.replications, args.seeds.size()));
    }
    return args.seeds;
  }
  if (args.replications > 0) {
    std::vector<std::uint64_t> seeds;
    for (int s = 1; s <= args.replications; ++s) seeds.push_back(s);
    return seeds;
  }
  return c.seeds;
}

nlohmann::json replication_summary(
    const fc::config::ScenarioConfig& config,
    const std::vector<fc::simulator::ScenarioTrace>& traces) {
  double utility = 0.0;
  double tail = 0.0;
  double regret = 0.0;
  double delay = 0.0;
  std::size_t detected = 0;
  std::size_t changes = 0;
  std::uint64_t false_alarms = 0;
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& t : traces) {
    const auto m = fc::simulator::compute_metrics(t, config);
    const double t20 = fc::simulator::tail_utility(t, 0.2);
    utility += m.mean_utility;
    tail += t20;
    regret += m.cumulative_regret;
    for (const auto& d : m.detections) {
      ++changes;
      if (d.detected) {
        ++detected;
        delay += static_cast<double>(d.delay);
      }
    }
    for (auto n : m.false_alarms) false_alarms += n;
    runs.push_back({{"seed", t.seed},
                    {"rounds", m.rounds},
                    {"mean_utility", m.mean_utility},
                    {"tail_utility_20pct", t20},
                    {"cumulative_regret", m.cumulative_regret}});
  }
  const double n = static_cast<double>(traces.size());
  return {{"policy", fc::bandit::policy_name(traces.front().policy)},
          {"replications", traces.size()},
          {"mean_utility", utility / n},
          {"tail_utility_20pct", tail / n},
          {"cumulative_regret", regret / n},
          {"changes", changes},
          {"detected", detected},
          {"mean_detection_delay",
           detected ? delay / static_cast<double>(detected) : 0.0},
          {"false_alarms", false_alarms},
          {"runs", runs}};
}

int cmd_simulate(const SimulateArgs& args) {
  auto config = fc::config::load_scenario(args.config);
  const auto seeds = resolve_seeds(args, config);
  const auto format = fc::io::parse_format(args.format);
  std::vector<fc::bandit::PolicyKind> policies;
  for (const auto& p : args.policies) policies.push_back(fc::bandit::parse_policy(p));
  if (policies.empty()) policies.push_back(config.policy);

  const fs::path out(args.out);
  fs::create_directories(out);
  nlohmann::json aggregate;
  aggregate["scenario"] = fc::config::scenario_hash(config);
  aggregate["config"] = fc::config::to_json(config);
  aggregate["seeds"] = seeds;
  aggregate["policies"] = nlohmann::json::array();
  for (const auto policy : policies) {
    const auto traces = fc::simulator::run_replications(
        config, seeds, policy, execution(args.serial));
    for (const auto& trace : traces) {
      const auto metrics = fc::simulator::compute_metrics(trace, config);
      fc::io::write_run_artifacts(out, trace, metrics, config, format);
      for (const auto& w : trace.warnings) {
        std::cerr << fmt::format("warning: seed {} {}: {}\n", trace.seed,
                                 fc::bandit::policy_name(policy), w);
      }
    }
    auto summary = replication_summary(config, traces);
    std::cout << fmt::format(
        "{:<15} replications={} mean_utility={:.4f} tail_utility={:.4f} "
        "detected={}/{} false_alarms={}\n",
        fc::bandit::policy_name(policy), traces.size(),
        summary["mean_utility"].get<double>(),
        summary["tail_utility_20pct"].get<double>(),
        summary["detected"].get<std::size_t>(),
        summary["changes"].get<std::size_t>(),
        summary["false_alarms"].get<std::uint64_t>());
    aggregate["policies"].push_back(std::move(summary));
  }
  std::ofstream file(out / "summary.json", std::ios::binary);
  file << aggregate.dump(2) << '\n';
  if (!file) throw fc::Error("cannot write summary.json");
  return 0;
}

int cmd_verify(const VerifyArgs& args) {
  std::vector<fc::verify::Component> components;
  for (const auto& name : args.components) {
    if (name == "all") {
      components = {fc::verify::Component::kChannel,
                    fc::verify::Component::kRateless,
                    fc::verify::Component::kKnapsack,
                    fc::verify::Component::kDetector,
                    fc::verify::Component::kBandit};
      break;
    }
    components.push_back(fc::verify::parse_component(name));
  }
  fc::verify::Options options;
  options.seed = args.seed;
  options.exec = execution(args.serial);
  int failures = 0;
  for (const auto component : components) {
    for (const auto& check : fc::verify::run(component, options)) {
      failures += !check.pass;
      std::cout << fmt::format("{} [{}] {}: measured {:.3e}, bound {:.3e}{}\n",
                               check.pass ? "PASS" : "FAIL",
                               fc::verify::component_name(component),
                               check.name, check.measured, check.tolerance,
                               check.detail.empty() ? "" : " (" + check.detail + ")");
    }
  }
  std::cout << (failures ? fmt::format("{} check(s) failed\n", failures)
                         : std::string("all checks passed\n"));
  return failures ? kExitOracle : 0;
}

int cmd_video(const VideoArgs& args) {
  auto config = fc::config::load_video(args.config);
  const auto format = fc::io::parse_format(args.format);
  const fs::path out(args.out);
  fs::create_directories(out);
  std::vector<std::uint64_t> seeds = args.seeds;
  if (seeds.empty()) seeds.push_back(config.seed);
  for (const auto seed : seeds) {
    config.seed = seed;
    const auto points =
        fc::simulator::run_video_experiment(config, execution(args.serial));
    const fc::io::Header header{{"scenario", fc::config::video_hash(config)},
                                {"seed", fmt::format("{}", seed)},
                                {"experiment", "video"}};
    const auto path = out / fmt::format("seed{}_video_outage{}", seed,
                                        fc::io::format_extension(format));
    fc::io::write_table(path, fc::io::video_table(points), header, format);
    std::cout << fmt::format("wrote {} ({} rows)\n", path.string(),
                             points.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Femtocell caching and rateless delivery simulator"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario");
  simulate->add_option("--config", sim.config, "Scenario file (JSON)")
      ->required();
  simulate->add_option("--seed", sim.seeds, "Seed (repeatable)");
  simulate->add_option("--replications", sim.replications,
                       "Number of replications (seeds 1..N)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim.out, "Output directory");
  simulate->add_option("--format", sim.format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  simulate->add_option("--policy", sim.policies,
                       "bandit|greedy|eps-fixed|eps-decreasing|oracle "
                       "(repeatable)");
  simulate->add_flag("--serial", sim.serial, "Run replications serially");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Run oracle checks");
  verify
      ->add_option("component", ver.components,
                   "channel|rateless|knapsack|detector|bandit|all")
      ->required();
  verify->add_option("--seed", ver.seed, "Seed of the random instances");
  verify->add_flag("--serial", ver.serial, "Use the serial kernels");

  VideoArgs vid;
  auto* video = app.add_subcommand("video", "Playback-deadline experiment");
  video->add_option("--config", vid.config, "Video experiment file (JSON)")
      ->required();
  video->add_option("--seed", vid.seeds, "Seed (repeatable)");
  video->add_option("--out", vid.out, "Output directory");
  video->add_option("--format", vid.format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  video->add_flag("--serial", vid.serial, "Use the serial kernels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (verify->parsed()) return cmd_verify(ver);
    if (video->parsed()) return cmd_video(vid);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fc::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const fc::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitUsage;
}
