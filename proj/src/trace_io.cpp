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

#include "femtocache/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "femtocache/error.hpp"

namespace femtocache::io {
namespace {

using nlohmann::json;

std::string label_of(const config::ScenarioConfig& config, std::size_t file) {
  return file < config.files.size() ? config.files[file].label
                                    : fmt::format("{}", file);
}

std::string labels(const config::ScenarioConfig& config,
                   const std::vector<std::size_t>& files) {
  std::string out;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (i) out += ';';
    out += label_of(config, files[i]);
  }
  return out;
}

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string cell_text(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return csv_field(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "1" : "0";
        } else {
          return fmt::format("{}", v);
        }
      },
      cell);
}

json cell_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return fmt::format("{}", v);
        }
        return v;
      },
      cell);
}

std::string file_prefix(const simulator::ScenarioTrace& trace) {
  return fmt::format("seed{}_{}_", trace.seed,
                     bandit::policy_name(trace.policy));
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::kCsv;
  if (name == "jsonl") return Format::kJsonl;
  throw InvalidArgument(fmt::format("unknown format '{}'", name));
}

std::string_view format_extension(Format format) {
  return format == Format::kCsv ? ".csv" : ".jsonl";
}

Header trace_header(const simulator::ScenarioTrace& trace) {
  return {{"scenario", trace.scenario_hash},
          {"seed", fmt::format("{}", trace.seed)},
          {"policy", std::string(bandit::policy_name(trace.policy))}};
}

void write_table(std::ostream& out, const Table& table, const Header& header,
                 Format format) {
  if (format == Format::kCsv) {
    out << '#';
    for (const auto& [key, value] : header) out << ' ' << key << '=' << value;
    out << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << (c ? "," : "") << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        out << (c ? "," : "") << cell_text(row[c]);
      }
      out << '\n';
    }
    return;
  }
  json head = json::object();
  for (const auto& [key, value] : header) head[key] = value;
  out << json{{"header", head}}.dump() << '\n';
  for (const auto& row : table.rows) {
    json obj = json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      obj[table.columns[c]] = cell_json(row[c]);
    }
    out << obj.dump() << '\n';
  }
}

void write_table(const std::filesystem::path& path, const Table& table,
                 const Header& header, Format format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  write_table(out, table, header, format);
  if (!out) throw Error(fmt::format("write failed: {}", path.string()));
}

Table rounds_table(const simulator::ScenarioTrace& trace,
                   const config::ScenarioConfig& config) {
  Table t{{"round", "start_slot", "end_slot", "file", "label", "power",
           "forced", "requesters", "duration", "energy", "recovered",
           "reward", "expected", "oracle_expected", "regret",
           "cumulative_regret", "cache", "alarms", "cache_updated",
           "decoupling_ok"},
          {}};
  for (const auto& r : trace.rounds) {
    t.rows.push_back({r.round, r.start_slot, r.end_slot, as_int(r.arm.file),
                      label_of(config, r.arm.file), r.power, r.forced,
                      as_int(r.requesters), std::int64_t{r.duration}, r.energy,
                      std::int64_t{r.recovered}, r.reward, r.expected,
                      r.oracle_expected, r.oracle_expected - r.expected,
                      r.cumulative_regret, labels(config, r.cache),
                      labels(config, r.alarms), r.cache_updated,
                      r.decoupling_ok});
  }
  return t;
}

Table arm_values_table(const simulator::ScenarioTrace& trace,
                       const config::ScenarioConfig& config) {
  Table t{{"round", "file", "label", "power", "expected", "mean_reward",
           "plays"},
          {}};
  for (const auto& r : trace.rounds) {
    for (const auto& a : r.arm_values) {
      t.rows.push_back({r.round, as_int(a.arm.file),
                        label_of(config, a.arm.file),
                        config.powers[a.arm.power], a.expected, a.mean_reward,
                        static_cast<std::int64_t>(a.plays)});
    }
  }
  return t;
}

Table cache_table(const simulator::ScenarioTrace& trace,
                  const config::ScenarioConfig& config) {
  Table t{{"round", "slot", "solved", "alive", "contents", "value", "added",
           "removed", "backhaul"},
          {}};
  for (const auto& e : trace.cache_events) {
    t.rows.push_back({e.round, e.slot, e.solved, labels(config, e.alive),
                      labels(config, e.contents), e.value,
                      labels(config, e.added), labels(config, e.removed),
                      e.backhaul});
  }
  return t;
}

Table detector_table(const simulator::ScenarioTrace& trace) {
  Table t{{"t", "file", "count", "running_mean", "glr_stat", "alarm"}, {}};
  t.rows.reserve(trace.detector_trace.size());
  for (const auto& d : trace.detector_trace) {
    t.rows.push_back({d.slot, as_int(d.file), std::int64_t{d.count},
                      d.running_mean, d.statistic, d.alarm});
  }
  return t;
}

Table alarms_table(const simulator::ScenarioTrace& trace,
                   const config::ScenarioConfig& config) {
  Table t{{"file", "label", "slot", "change_slot", "post_change_mean",
           "statistic"},
          {}};
  for (const auto& a : trace.alarms) {
    t.rows.push_back({as_int(a.file), label_of(config, a.file), a.slot,
                      a.change_slot, a.post_change_mean, a.statistic});
  }
  return t;
}

Table request_series(const simulator::ScenarioTrace& trace,
                     const config::ScenarioConfig& config) {
  Table t{{"t", "file", "label", "count"}, {}};
  for (std::size_t s = 0; s < trace.requests.size(); ++s) {
    const auto& row = trace.requests[s];
    for (std::size_t f = 0; f < row.size(); ++f) {
      t.rows.push_back(
          {as_int(s), as_int(f), label_of(config, f), std::int64_t{row[f]}});
    }
  }
  return t;
}

Table utility_series(const simulator::ScenarioTrace& trace,
                     const simulator::Metrics& metrics) {
  Table t{{"round", "reward", "average_utility", "cumulative_regret"}, {}};
  for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
    const auto& r = trace.rounds[i];
    t.rows.push_back({r.round, r.reward, metrics.running_utility[i],
                      r.cumulative_regret});
  }
  return t;
}

Table action_histogram(const simulator::Metrics& metrics,
                       const config::ScenarioConfig& config) {
  Table t{{"file", "label", "power", "rounds", "fraction"}, {}};
  for (const auto& a : metrics.actions) {
    const double fraction =
        metrics.rounds ? static_cast<double>(a.rounds) /
                             static_cast<double>(metrics.rounds)
                       : 0.0;
    t.rows.push_back({as_int(a.arm.file), label_of(config, a.arm.file),
                      config.powers[a.arm.power],
                      static_cast<std::int64_t>(a.rounds), fraction});
  }
  return t;
}

Table detections_table(const simulator::Metrics& metrics,
                       const config::ScenarioConfig& config) {
  Table t{{"file", "label", "change_slot", "before", "after", "detected",
           "alarm_slot", "delay"},
          {}};
  for (const auto& d : metrics.detections) {
    t.rows.push_back({as_int(d.change.file), label_of(config, d.change.file),
                      d.change.slot, d.change.before, d.change.after,
                      d.detected, d.alarm_slot, d.delay});
  }
  return t;
}

Table video_table(const std::vector<simulator::VideoPoint>& points) {
  Table t{{"deadline", "sinr_db", "packet_outage", "outage"}, {}};
  for (const auto& p : points) {
    t.rows.push_back({p.deadline, p.sinr_db, p.packet_outage, p.outage});
  }
  return t;
}

json summary_json(const simulator::ScenarioTrace& trace,
                  const simulator::Metrics& metrics,
                  const config::ScenarioConfig& config) {
  json out;
  for (const auto& [key, value] : trace_header(trace)) out[key] = value;
  out["config"] = config::to_json(config);

  double energy_check = 0.0;
  std::int64_t durations = 0;
  for (const auto& r : trace.rounds) {
    energy_check += r.power * r.duration;
    durations += r.duration;
  }
  json detections = json::array();
  for (const auto& d : metrics.detections) {
    detections.push_back({{"file", label_of(config, d.change.file)},
                          {"change_slot", d.change.slot},
                          {"detected", d.detected},
                          {"alarm_slot", d.alarm_slot},
                          {"delay", d.delay}});
  }
  json false_alarms = json::object();
  for (std::size_t f = 0; f < metrics.false_alarms.size(); ++f) {
    false_alarms[label_of(config, f)] = metrics.false_alarms[f];
  }
  json modal = json::array();
  for (std::size_t s = 0; s < metrics.modal_actions.size(); ++s) {
    json seg{{"segment_start", metrics.segment_starts[s]}};
    if (const auto& a = metrics.modal_actions[s]) {
      seg["file"] = label_of(config, a->file);
      seg["power"] = config.powers[a->power];
    } else {
      seg["file"] = nullptr;
      seg["power"] = nullptr;
    }
    modal.push_back(seg);
  }

  out["users"] = trace.users;
  out["metrics"] = {
      {"rounds", metrics.rounds},
      {"mean_utility", metrics.mean_utility},
      {"tail_utility_20pct", simulator::tail_utility(trace, 0.2)},
      {"cumulative_regret", metrics.cumulative_regret},
      {"energy", metrics.energy},
      {"energy_from_rounds", energy_check},
      {"packets", metrics.packets},
      {"backhaul", metrics.backhaul},
      {"initial_fill", metrics.initial_fill},
      {"bootstrap_slots", trace.bootstrap_slots},
      {"round_slots", durations},
      {"idle_slots", trace.idle_slots},
      {"slots_consumed", trace.slots_consumed},
      {"alarms", trace.alarms.size()},
      {"cache_updates", trace.cache_events.size()},
      {"detections", detections},
      {"false_alarms", false_alarms},
      {"modal_actions", modal}};
  out["warnings"] = trace.warnings;
  return out;
}

std::vector<std::filesystem::path> write_run_artifacts(
    const std::filesystem::path& dir, const simulator::ScenarioTrace& trace,
    const simulator::Metrics& metrics, const config::ScenarioConfig& config,
    Format format) {
  std::filesystem::create_directories(dir);
  const auto header = trace_header(trace);
  const auto prefix = file_prefix(trace);
  const auto ext = std::string(format_extension(format));
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const Table& table) {
    auto path = dir / (prefix + name + ext);
    write_table(path, table, header, format);
    written.push_back(std::move(path));
  };
  emit("rounds", rounds_table(trace, config));
  emit("cache", cache_table(trace, config));
  emit("alarms", alarms_table(trace, config));
  emit("detections", detections_table(metrics, config));
  emit("requests", request_series(trace, config));
  emit("utility", utility_series(trace, metrics));
  emit("actions", action_histogram(metrics, config));
  if (config.record_detector_trace) emit("detector", detector_table(trace));
  if (config.record_arm_values) {
    emit("arm_values", arm_values_table(trace, config));
  }

  auto path = dir / (prefix + "summary.json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << summary_json(trace, metrics, config).dump(2) << '\n';
  written.push_back(std::move(path));
  return written;
}

}  // namespace femtocache::io
