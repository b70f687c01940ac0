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

#include "femtocache/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "femtocache/error.hpp"

namespace femtocache::config {
namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!known.count(item.key())) {
      throw ConfigError(fmt::format("{}: unknown field '{}'", where,
                                    item.key()));
    }
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}.{}: {}", where, key, e.what()));
  }
}

const json* child(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void check_schema(const json& doc) {
  auto it = doc.find("schema_version");
  if (it == doc.end()) throw ConfigError("missing schema_version");
  if (!it->is_number_integer() || it->get<int>() != kSchemaVersion) {
    throw ConfigError(fmt::format("unsupported schema_version {} (expected {})",
                                  it->dump(), kSchemaVersion));
  }
}

rateless::FileSpec parse_file(const json& obj, std::size_t index) {
  const std::string where = fmt::format("files[{}]", index);
  check_keys(obj, {"label", "size", "blocks", "overhead", "popularity"},
             where);
  rateless::FileSpec file;
  file.label = fmt::format("F{}", index);
  read(obj, "label", file.label, where);
  read(obj, "size", file.size, where);
  file.blocks = file.size;
  read(obj, "blocks", file.blocks, where);
  file.overhead = rateless::default_overhead(file.blocks);
  read(obj, "overhead", file.overhead, where);
  const json* steps = child(obj, "popularity");
  if (!steps || !steps->is_array()) {
    throw ConfigError(where + ".popularity: expected an array");
  }
  for (std::size_t k = 0; k < steps->size(); ++k) {
    const std::string at = fmt::format("{}.popularity[{}]", where, k);
    const json& step = (*steps)[k];
    check_keys(step, {"from", "intensity"}, at);
    rateless::PopularityStep s;
    read(step, "from", s.start_time, at);
    read(step, "intensity", s.intensity, at);
    file.schedule.push_back(s);
  }
  return file;
}

AliveMode parse_alive_mode(const std::string& text) {
  if (text == "per_user") return AliveMode::kPerUser;
  if (text == "aggregate") return AliveMode::kAggregate;
  throw ConfigError("detector.alive_mode must be per_user or aggregate");
}

const char* alive_mode_name(AliveMode mode) {
  return mode == AliveMode::kPerUser ? "per_user" : "aggregate";
}

PendingRequests parse_pending(const std::string& text) {
  if (text == "previous_round") return PendingRequests::kPreviousRound;
  if (text == "until_broadcast") return PendingRequests::kUntilBroadcast;
  throw ConfigError("requests.pending must be previous_round or until_broadcast");
}

const char* pending_name(PendingRequests pending) {
  return pending == PendingRequests::kPreviousRound ? "previous_round"
                                                    : "until_broadcast";
}

BaselineCache parse_baseline_cache(const std::string& text) {
  if (text == "static") return BaselineCache::kStatic;
  if (text == "adaptive") return BaselineCache::kAdaptive;
  throw ConfigError("cache.baselines must be static or adaptive");
}

const char* baseline_cache_name(BaselineCache mode) {
  return mode == BaselineCache::kStatic ? "static" : "adaptive";
}

json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  try {
    geometry.validate();
    channel::PowerSet check_powers(powers);
    (void)check_powers;
    if (files.empty()) throw ConfigError("no files");
    std::set<std::string> labels;
    for (const auto& f : files) {
      f.validate();
      if (!(f.schedule.front().start_time <= 0.0)) {
        throw ConfigError("file " + f.label +
                          ": popularity must be defined from slot 0");
      }
      if (!labels.insert(f.label).second) {
        throw ConfigError("duplicate file label " + f.label);
      }
      rateless::DeliveryPolicy{rateless::deadline_for(f.decode_threshold(),
                                                      kappa),
                               delta}
          .validate(f.decode_threshold());
    }
    detector.glr.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (!(channel.noise_power >= 0.0)) throw ConfigError("noise_power < 0");
  if (!(channel.min_rate_nats > 0.0)) throw ConfigError("min_rate_nats <= 0");
  if (!(channel.beta_min > 0.0 && channel.beta_min <= channel.beta_max)) {
    throw ConfigError("need 0 < beta_min <= beta_max");
  }
  for (const auto& i : channel.interferers) {
    if (!(i.beta > 0.0 && i.power > 0.0)) {
      throw ConfigError("interferer beta and power must be > 0");
    }
  }
  if (!(request_rate_scale > 0.0)) throw ConfigError("rate_scale <= 0");
  if (detector.bootstrap < 1) throw ConfigError("bootstrap must be >= 1");
  if (!(detector.alive_threshold >= 0.0)) {
    throw ConfigError("alive_threshold < 0");
  }
  if (cache_capacity < 0) throw ConfigError("cache capacity < 0");
  if (resolve_interval < 1) throw ConfigError("resolve_interval < 1");
  if (!(bandit.beta >= 0.0 && bandit.zeta >= 0.0)) {
    throw ConfigError("bandit beta and zeta must be >= 0");
  }
  if (!(bandit.epsilon >= 0.0 && bandit.epsilon <= 1.0)) {
    throw ConfigError("epsilon must lie in [0, 1]");
  }
  if (!(bandit.epsilon0 >= 0.0)) throw ConfigError("epsilon0 < 0");
  if (horizon < detector.bootstrap) {
    throw ConfigError("horizon shorter than the bootstrap window");
  }
  if (seeds.empty()) throw ConfigError("no seeds");
}

ScenarioConfig parse_scenario(const json& doc) {
  check_keys(doc,
             {"schema_version", "name", "geometry", "channel", "powers",
              "files", "delivery", "requests", "detector", "cache", "bandit",
              "run"},
             "scenario");
  check_schema(doc);
  ScenarioConfig c;
  read(doc, "name", c.name, "scenario");
  if (const json* g = child(doc, "geometry")) {
    check_keys(*g, {"radius", "user_density"}, "geometry");
    read(*g, "radius", c.geometry.radius, "geometry");
    read(*g, "user_density", c.geometry.user_density, "geometry");
  }
  if (const json* ch = child(doc, "channel")) {
    check_keys(*ch,
               {"noise_power", "min_rate_nats", "beta_min", "beta_max",
                "interferers"},
               "channel");
    read(*ch, "noise_power", c.channel.noise_power, "channel");
    read(*ch, "min_rate_nats", c.channel.min_rate_nats, "channel");
    read(*ch, "beta_min", c.channel.beta_min, "channel");
    read(*ch, "beta_max", c.channel.beta_max, "channel");
    if (const json* list = child(*ch, "interferers")) {
      if (!list->is_array()) throw ConfigError("channel.interferers: array");
      for (std::size_t k = 0; k < list->size(); ++k) {
        const std::string at = fmt::format("channel.interferers[{}]", k);
        check_keys((*list)[k], {"beta", "power"}, at);
        channel::Interferer i;
        read((*list)[k], "beta", i.beta, at);
        read((*list)[k], "power", i.power, at);
        c.channel.interferers.push_back(i);
      }
    }
  }
  read(doc, "powers", c.powers, "scenario");
  if (const json* files = child(doc, "files")) {
    if (!files->is_array()) throw ConfigError("files: expected an array");
    for (std::size_t k = 0; k < files->size(); ++k) {
      c.files.push_back(parse_file((*files)[k], k));
    }
  }
  if (const json* d = child(doc, "delivery")) {
    check_keys(*d, {"kappa", "delta"}, "delivery");
    read(*d, "kappa", c.kappa, "delivery");
    read(*d, "delta", c.delta, "delivery");
  }
  if (const json* r = child(doc, "requests")) {
    check_keys(*r, {"rate_scale", "pending"}, "requests");
    read(*r, "rate_scale", c.request_rate_scale, "requests");
    std::string pending = pending_name(c.pending);
    read(*r, "pending", pending, "requests");
    c.pending = parse_pending(pending);
  }
  if (const json* d = child(doc, "detector")) {
    check_keys(*d,
               {"threshold", "min_jump", "window", "psi_floor", "bootstrap",
                "alive_threshold", "alive_mode"},
               "detector");
    read(*d, "threshold", c.detector.glr.threshold, "detector");
    read(*d, "min_jump", c.detector.glr.min_jump, "detector");
    read(*d, "window", c.detector.glr.window, "detector");
    read(*d, "psi_floor", c.detector.glr.psi_floor, "detector");
    read(*d, "bootstrap", c.detector.bootstrap, "detector");
    read(*d, "alive_threshold", c.detector.alive_threshold, "detector");
    std::string mode = alive_mode_name(c.detector.alive_mode);
    read(*d, "alive_mode", mode, "detector");
    c.detector.alive_mode = parse_alive_mode(mode);
  }
  if (const json* k = child(doc, "cache")) {
    check_keys(*k, {"capacity", "resolve_interval", "baselines"}, "cache");
    read(*k, "capacity", c.cache_capacity, "cache");
    read(*k, "resolve_interval", c.resolve_interval, "cache");
    std::string baselines = baseline_cache_name(c.baseline_cache);
    read(*k, "baselines", baselines, "cache");
    c.baseline_cache = parse_baseline_cache(baselines);
  }
  if (const json* b = child(doc, "bandit")) {
    check_keys(*b, {"beta", "zeta", "epsilon", "epsilon0"}, "bandit");
    read(*b, "beta", c.bandit.beta, "bandit");
    read(*b, "zeta", c.bandit.zeta, "bandit");
    read(*b, "epsilon", c.bandit.epsilon, "bandit");
    read(*b, "epsilon0", c.bandit.epsilon0, "bandit");
  }
  if (const json* r = child(doc, "run")) {
    check_keys(*r,
               {"horizon", "seeds", "replications", "policy",
                "record_detector_trace", "record_arm_values"},
               "run");
    read(*r, "horizon", c.horizon, "run");
    const bool has_seeds = r->contains("seeds");
    read(*r, "seeds", c.seeds, "run");
    if (r->contains("replications")) {
      int n = 0;
      read(*r, "replications", n, "run");
      if (n < 1) throw ConfigError("run.replications must be >= 1");
      if (has_seeds) {
        if (c.seeds.size() != static_cast<std::size_t>(n)) {
          throw ConfigError("run.seeds and run.replications disagree");
        }
      } else {
        c.seeds.clear();
        for (int s = 1; s <= n; ++s) c.seeds.push_back(s);
      }
    }
    std::string policy(bandit::policy_name(c.policy));
    read(*r, "policy", policy, "run");
    try {
      c.policy = bandit::parse_policy(policy);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("run.policy: ") + e.what());
    }
    read(*r, "record_detector_trace", c.record_detector_trace, "run");
    read(*r, "record_arm_values", c.record_arm_values, "run");
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path));
}

json to_json(const ScenarioConfig& c) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = c.name;
  doc["geometry"] = {{"radius", c.geometry.radius},
                     {"user_density", c.geometry.user_density}};
  json interferers = json::array();
  for (const auto& i : c.channel.interferers) {
    interferers.push_back({{"beta", i.beta}, {"power", i.power}});
  }
  doc["channel"] = {{"noise_power", c.channel.noise_power},
                    {"min_rate_nats", c.channel.min_rate_nats},
                    {"beta_min", c.channel.beta_min},
                    {"beta_max", c.channel.beta_max},
                    {"interferers", interferers}};
  doc["powers"] = c.powers;
  json files = json::array();
  for (const auto& f : c.files) {
    json steps = json::array();
    for (const auto& s : f.schedule) {
      steps.push_back({{"from", s.start_time}, {"intensity", s.intensity}});
    }
    files.push_back({{"label", f.label},
                     {"size", f.size},
                     {"blocks", f.blocks},
                     {"overhead", f.overhead},
                     {"popularity", steps}});
  }
  doc["files"] = files;
  doc["delivery"] = {{"kappa", c.kappa}, {"delta", c.delta}};
  doc["requests"] = {{"rate_scale", c.request_rate_scale},
                     {"pending", pending_name(c.pending)}};
  doc["detector"] = {{"threshold", c.detector.glr.threshold},
                     {"min_jump", c.detector.glr.min_jump},
                     {"window", c.detector.glr.window},
                     {"psi_floor", c.detector.glr.psi_floor},
                     {"bootstrap", c.detector.bootstrap},
                     {"alive_threshold", c.detector.alive_threshold},
                     {"alive_mode", alive_mode_name(c.detector.alive_mode)}};
  doc["cache"] = {{"capacity", c.cache_capacity},
                  {"resolve_interval", c.resolve_interval},
                  {"baselines", baseline_cache_name(c.baseline_cache)}};
  doc["bandit"] = {{"beta", c.bandit.beta},
                   {"zeta", c.bandit.zeta},
                   {"epsilon", c.bandit.epsilon},
                   {"epsilon0", c.bandit.epsilon0}};
  doc["run"] = {{"horizon", c.horizon},
                {"seeds", c.seeds},
                {"policy", std::string(bandit::policy_name(c.policy))},
                {"record_detector_trace", c.record_detector_trace},
                {"record_arm_values", c.record_arm_values}};
  return doc;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string scenario_hash(const ScenarioConfig& config) {
  json doc = to_json(config);
  doc["run"].erase("seeds");
  doc["run"].erase("policy");
  return fnv1a_hex(doc.dump());
}

void VideoConfig::validate() const {
  if (segments < 1) throw ConfigError("segments must be >= 1");
  if (blocks < 1) throw ConfigError("blocks must be >= 1");
  if (overhead < 0) throw ConfigError("overhead must be >= 0");
  if (deadlines.empty()) throw ConfigError("no deadline multipliers");
  for (double d : deadlines) {
    if (!(d > 1.0)) throw ConfigError("deadline multipliers must be > 1");
  }
  if (sinr_db.empty()) throw ConfigError("empty SINR grid");
  for (double s : sinr_db) {
    if (!std::isfinite(s)) throw ConfigError("SINR grid must be finite");
  }
  if (!std::is_sorted(sinr_db.begin(), sinr_db.end())) {
    throw ConfigError("SINR grid must be ascending");
  }
  if (!(min_rate_nats > 0.0)) throw ConfigError("min_rate_nats <= 0");
  if (runs < 1) throw ConfigError("runs must be >= 1");
}

VideoConfig parse_video(const json& doc) {
  check_keys(doc,
             {"schema_version", "name", "segments", "blocks", "overhead",
              "deadlines", "sinr_db", "min_rate_nats", "runs", "seed"},
             "video");
  check_schema(doc);
  VideoConfig v;
  read(doc, "name", v.name, "video");
  read(doc, "segments", v.segments, "video");
  read(doc, "blocks", v.blocks, "video");
  read(doc, "overhead", v.overhead, "video");
  read(doc, "deadlines", v.deadlines, "video");
  read(doc, "min_rate_nats", v.min_rate_nats, "video");
  read(doc, "runs", v.runs, "video");
  read(doc, "seed", v.seed, "video");
  if (const json* grid = child(doc, "sinr_db")) {
    if (grid->is_array()) {
      read(doc, "sinr_db", v.sinr_db, "video");
    } else {
      check_keys(*grid, {"start", "stop", "points"}, "video.sinr_db");
      double start = 0.0, stop = 0.0;
      int points = 0;
      read(*grid, "start", start, "video.sinr_db");
      read(*grid, "stop", stop, "video.sinr_db");
      read(*grid, "points", points, "video.sinr_db");
      if (points < 1) throw ConfigError("video.sinr_db.points must be >= 1");
      for (int i = 0; i < points; ++i) {
        v.sinr_db.push_back(points == 1 ? start
                                        : start + (stop - start) * i /
                                                      (points - 1));
      }
    }
  }
  v.validate();
  return v;
}

VideoConfig load_video(const std::filesystem::path& path) {
  return parse_video(read_file(path));
}

json to_json(const VideoConfig& v) {
  return {{"schema_version", kSchemaVersion},
          {"name", v.name},
          {"segments", v.segments},
          {"blocks", v.blocks},
          {"overhead", v.overhead},
          {"deadlines", v.deadlines},
          {"sinr_db", v.sinr_db},
          {"min_rate_nats", v.min_rate_nats},
          {"runs", v.runs},
          {"seed", v.seed}};
}

std::string video_hash(const VideoConfig& config) {
  json doc = to_json(config);
  doc.erase("seed");
  return fnv1a_hex(doc.dump());
}

}  // namespace femtocache::config
