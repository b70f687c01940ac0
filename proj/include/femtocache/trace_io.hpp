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

#ifndef FEMTOCACHE_TRACE_IO_HPP_
#define FEMTOCACHE_TRACE_IO_HPP_

// Trace and series export. Every table is written either as CSV, preceded by
// one comment line "# scenario=<hash> seed=<n> policy=<name>", or as JSON
// lines whose first record is {"header": {...}} with the same fields.
// Doubles are printed in shortest round-trip form, so equal traces give
// byte-identical files.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "femtocache/config.hpp"
#include "femtocache/simulator.hpp"

namespace femtocache::io {

enum class Format { kCsv, kJsonl };

Format parse_format(std::string_view name);
std::string_view format_extension(Format format);

using Cell = std::variant<std::int64_t, double, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// Key/value pairs written into the header line, in order.
using Header = std::vector<std::pair<std::string, std::string>>;

Header trace_header(const simulator::ScenarioTrace& trace);

void write_table(std::ostream& out, const Table& table, const Header& header,
                 Format format);
void write_table(const std::filesystem::path& path, const Table& table,
                 const Header& header, Format format);

// round, start_slot, end_slot, file, label, power, forced, requesters,
// duration, energy, recovered, reward, expected, oracle_expected, regret,
// cumulative_regret, cache, alarms, cache_updated, decoupling_ok
Table rounds_table(const simulator::ScenarioTrace& trace,
                   const config::ScenarioConfig& config);

// round, file, label, power, expected, mean_reward, plays
// (empty unless arm values were recorded)
Table arm_values_table(const simulator::ScenarioTrace& trace,
                       const config::ScenarioConfig& config);

// round, slot, solved, alive, contents, value, added, removed, backhaul
Table cache_table(const simulator::ScenarioTrace& trace,
                  const config::ScenarioConfig& config);

// t, file, count, running_mean, glr_stat, alarm
Table detector_table(const simulator::ScenarioTrace& trace);

// file, label, slot, change_slot, post_change_mean, statistic
Table alarms_table(const simulator::ScenarioTrace& trace,
                   const config::ScenarioConfig& config);

// Per-slot request counts: t, file, label, count
Table request_series(const simulator::ScenarioTrace& trace,
                     const config::ScenarioConfig& config);

// Average utility against the round index: round, reward, average_utility,
// cumulative_regret
Table utility_series(const simulator::ScenarioTrace& trace,
                     const simulator::Metrics& metrics);

// Action frequencies: file, label, power, rounds, fraction
Table action_histogram(const simulator::Metrics& metrics,
                       const config::ScenarioConfig& config);

// file, label, change_slot, before, after, detected, alarm_slot, delay
Table detections_table(const simulator::Metrics& metrics,
                       const config::ScenarioConfig& config);

// deadline, sinr_db, packet_outage, outage
Table video_table(const std::vector<simulator::VideoPoint>& points);

// Run summary: header fields, resolved configuration, metrics, warnings.
nlohmann::json summary_json(const simulator::ScenarioTrace& trace,
                            const simulator::Metrics& metrics,
                            const config::ScenarioConfig& config);

// Writes every table above plus summary.json into `dir`, with file names
// prefixed by "seed<n>_<policy>_". Returns the paths written.
std::vector<std::filesystem::path> write_run_artifacts(
    const std::filesystem::path& dir, const simulator::ScenarioTrace& trace,
    const simulator::Metrics& metrics, const config::ScenarioConfig& config,
    Format format);

}  // namespace femtocache::io

#endif  // FEMTOCACHE_TRACE_IO_HPP_
