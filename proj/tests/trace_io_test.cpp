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

#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "femtocache/config.hpp"
#include "femtocache/error.hpp"
#include "femtocache/simulator.hpp"

namespace femtocache::io {
namespace {

const std::filesystem::path kSource = FEMTOCACHE_SOURCE_DIR;

std::string render(const Table& table, Format format) {
  std::ostringstream out;
  write_table(out, table, {{"scenario", "abc"}, {"seed", "3"}}, format);
  return out.str();
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(Format, Parse) {
  EXPECT_EQ(parse_format("csv"), Format::kCsv);
  EXPECT_EQ(parse_format("jsonl"), Format::kJsonl);
  EXPECT_EQ(format_extension(Format::kJsonl), ".jsonl");
  EXPECT_THROW(parse_format("xml"), InvalidArgument);
}

TEST(Csv, HeaderColumnsAndCells) {
  Table t{{"a", "b", "c", "d"}, {{std::int64_t{7}, 0.1, true, std::string("x")}}};
  EXPECT_EQ(render(t, Format::kCsv), "# scenario=abc seed=3\na,b,c,d\n7,0.1,1,x\n");
}

TEST(Csv, EscapesSpecialCharacters) {
  Table t{{"s"}, {{std::string("a,b")}, {std::string("say \"hi\"")}}};
  EXPECT_EQ(render(t, Format::kCsv),
            "# scenario=abc seed=3\ns\n\"a,b\"\n\"say \"\"hi\"\"\"\n");
}

TEST(Csv, DoublesRoundTrip) {
  const double v = 1.0 / 3.0;
  Table t{{"v"}, {{v}}};
  const std::string text = render(t, Format::kCsv);
  const std::string last = text.substr(text.rfind("v\n") + 2);
  EXPECT_EQ(std::stod(last), v);
}

TEST(Jsonl, HeaderRecordThenRows) {
  Table t{{"n", "x"},
          {{std::int64_t{1}, std::numeric_limits<double>::infinity()}}};
  std::istringstream in(render(t, Format::kJsonl));
  std::string line;
  std::getline(in, line);
  const auto head = nlohmann::json::parse(line);
  EXPECT_EQ(head["header"]["scenario"], "abc");
  EXPECT_EQ(head["header"]["seed"], "3");
  std::getline(in, line);
  const auto row = nlohmann::json::parse(line);
  EXPECT_EQ(row["n"], 1);
  EXPECT_EQ(row["x"], "inf");
}

TEST(Artifacts, ByteIdenticalForEqualRuns) {
  auto c = config::load_scenario(kSource / "configs/reference_scenario.json");
  c.horizon = 700;
  c.record_detector_trace = true;
  const auto base = std::filesystem::temp_directory_path() / "femtocache_io_test";
  std::filesystem::remove_all(base);
  std::vector<std::vector<std::filesystem::path>> written;
  for (int i = 0; i < 2; ++i) {
    const auto dir = base / std::to_string(i);
    std::filesystem::create_directories(dir);
    const auto trace = simulator::run_scenario(c, 9, bandit::PolicyKind::kBandit);
    written.push_back(write_run_artifacts(
        dir, trace, simulator::compute_metrics(trace, c), c, Format::kCsv));
  }
  ASSERT_EQ(written[0].size(), written[1].size());
  ASSERT_FALSE(written[0].empty());
  for (std::size_t i = 0; i < written[0].size(); ++i) {
    EXPECT_EQ(written[0][i].filename(), written[1][i].filename());
    EXPECT_EQ(slurp(written[0][i]), slurp(written[1][i]));
  }
  const std::string rounds = slurp(base / "0" / "seed9_bandit_rounds.csv");
  EXPECT_EQ(rounds.rfind("# scenario=" + config::scenario_hash(c) +
                             " seed=9 policy=bandit\nround,start_slot,",
                         0),
            0u);
  const std::string detector = slurp(base / "0" / "seed9_bandit_detector.csv");
  EXPECT_NE(detector.find("\nt,file,count,running_mean,glr_stat,alarm\n"),
            std::string::npos);
  std::filesystem::remove_all(base);
}

}  // namespace
}  // namespace femtocache::io
