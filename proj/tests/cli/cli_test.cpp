// Copyright 2026 The kpiroot Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Each test gets its own scratch directory named after the test.
fs::path scratch() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() / "kpiroot_cli_tests" /
                       (std::string(info->test_suite_name()) + "." + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = scratch(); }

  fs::path gen_scenario(const std::string& name) {
    const fs::path out = dir_ / name;
    const auto r =
        run("gen --m 50 --n 2880 --period 48 --seed 7 --root-causes 3 --out " + out.string());
    EXPECT_EQ(r.code, 0) << r.err;
    return out;
  }

  Outcome run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string("KPIROOT_LOG=warn ") + KPIROOT_CLI_PATH + " " + args +
                            " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path dir_;
};

std::vector<std::string> truth_of(const fs::path& dataset) {
  const auto m = nlohmann::json::parse(slurp(dataset / "manifest.json"));
  return m.at("truth").get<std::vector<std::string>>();
}

TEST_F(Cli, GenWritesCsvsAndManifest) {
  const auto d = gen_scenario("d");
  std::size_t csvs = 0;
  for (const auto& e : fs::directory_iterator(d)) csvs += e.path().extension() == ".csv";
  EXPECT_EQ(csvs, 51u);
  EXPECT_TRUE(fs::exists(d / "manifest.json"));
}

TEST_F(Cli, GenWithoutPeriodIsUsageError) {
  const auto r = run("gen --m 50 --n 2880 --seed 7 --out " + (dir_ / "d").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--period"), std::string::npos);
}

TEST_F(Cli, GenIsDeterministic) {
  const auto a = gen_scenario("a");
  const auto b = gen_scenario("b");
  EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
  for (const auto& e : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
  }
}

TEST_F(Cli, GenRejectsInvalidSpec) {
  const auto r = run("gen --m 5 --n 2880 --period 48 --root-causes 9 --out " +
                     (dir_ / "d").string());
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(fs::exists(dir_ / "d" / "manifest.json"));
}

TEST_F(Cli, LocalizeFindsTruthInTopTen) {
  const auto d = gen_scenario("d");
  const auto r = run("localize " + d.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(r.out);
  std::set<std::string> top;
  for (std::size_t i = 0; i < 10; ++i) top.insert(report.at("ranking").at(i).at("kpi_id").get<std::string>());
  for (const auto& id : truth_of(d)) EXPECT_TRUE(top.count(id)) << id;
  EXPECT_FALSE(report.at("segments").empty());
  EXPECT_EQ(report.at("config").at("period"), 48);
  for (const char* stage :
       {"detection", "reduction", "symbolic_similarity", "causality", "scoring"}) {
    EXPECT_TRUE(report.at("execution").at("timings_seconds").contains(stage)) << stage;
  }
  for (const auto& row : report.at("ranking")) {
    for (const char* key : {"rank", "kpi_id", "similarity", "causality_raw", "causality_scaled",
                            "combined"}) {
      EXPECT_TRUE(row.contains(key)) << key;
    }
  }
}

TEST_F(Cli, LocalizeConstantAlarmExitsThree) {
  const auto d = gen_scenario("d");
  {
    std::ifstream in(d / "alarm.csv");
    std::string line;
    std::ostringstream rewritten;
    std::getline(in, line);
    rewritten << line << '\n';
    while (std::getline(in, line)) {
      rewritten << line.substr(0, line.find(',')) << ",5\n";
    }
    in.close();
    std::ofstream(d / "alarm.csv") << rewritten.str();
  }
  const auto r = run("localize " + d.string());
  EXPECT_EQ(r.code, 3);
  const auto report = nlohmann::json::parse(r.out);
  EXPECT_TRUE(report.at("segments").empty());
  EXPECT_FALSE(report.at("anomaly_found").get<bool>());
}

TEST_F(Cli, LocalizeCorruptCsvReportsLine) {
  const auto d = gen_scenario("d");
  const fs::path victim = d / "vm0003.csv";
  std::ifstream in(victim);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  in.close();
  lines[4] = "1700000240,not-a-number";
  std::ofstream out(victim);
  for (const auto& line : lines) out << line << '\n';
  out.close();

  const auto r = run("localize " + d.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("vm0003.csv:5:"), std::string::npos) << r.err;
}

TEST_F(Cli, LocalizeMissingDatasetFails) {
  const auto r = run("localize " + (dir_ / "absent").string());
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.code, 3);
}

TEST_F(Cli, JobsDoNotChangeTheReport) {
  const auto d = gen_scenario("d");
  const auto one = run("localize --reproducible --jobs 1 " + d.string());
  const auto four = run("localize --reproducible --jobs 4 " + d.string());
  ASSERT_EQ(one.code, 0);
  ASSERT_EQ(four.code, 0);
  EXPECT_EQ(one.out, four.out);
}

TEST_F(Cli, ReportConfigReplaysExactly) {
  const auto d = gen_scenario("d");
  const fs::path first = dir_ / "first.json";
  const fs::path second = dir_ / "second.json";
  ASSERT_EQ(run("localize --reproducible --lambda 0.8 --alpha 7 --w 48 --out " +
                first.string() + " " + d.string())
                .code,
            0);
  ASSERT_EQ(run("localize --reproducible --config " + first.string() + " --out " +
                second.string() + " " + d.string())
                .code,
            0);
  EXPECT_EQ(slurp(first), slurp(second));
  const auto j = nlohmann::json::parse(slurp(second));
  EXPECT_DOUBLE_EQ(j.at("config").at("lambda").get<double>(), 0.8);
  EXPECT_EQ(j.at("config").at("alpha"), 7);
}

TEST_F(Cli, EvalPerfectReportScoresOne) {
  const auto d = gen_scenario("d");
  const auto truth = truth_of(d);
  nlohmann::json report;
  report["incident_id"] = "scenario-7";
  report["predicted"] = truth;
  report["ranking"] = nlohmann::json::array();
  for (const auto& id : truth) report["ranking"].push_back({{"kpi_id", id}});
  report["ranking"].push_back({{"kpi_id", "vm0049"}});
  std::ofstream(dir_ / "perfect.json") << report.dump();

  const auto r = run("eval --reports " + (dir_ / "perfect.json").string() + " --truth " +
                     d.string() + " --k 1 3 10");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const auto& agg = j.at("aggregate");
  EXPECT_DOUBLE_EQ(agg.at("f1").get<double>(), 1.0);
  for (const char* k : {"hit@1", "hit@3", "hit@10", "ndcg@1", "ndcg@3", "ndcg@10"}) {
    EXPECT_DOUBLE_EQ(agg.at(k).get<double>(), 1.0) << k;
  }
}

TEST_F(Cli, EvalAggregatesIncidents) {
  const auto a = gen_scenario("a");
  const auto b = dir_ / "b";
  ASSERT_EQ(run("gen --m 50 --n 2880 --period 48 --seed 8 --out " + b.string()).code, 0);
  ASSERT_EQ(run("localize --out " + (dir_ / "ra.json").string() + " " + a.string()).code, 0);
  ASSERT_EQ(run("localize --out " + (dir_ / "rb.json").string() + " " + b.string()).code, 0);
  const auto r = run("eval --reports " + (dir_ / "ra.json").string() + " " +
                     (dir_ / "rb.json").string() + " --truth " + a.string() + " " + b.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("incidents"), 2);
  ASSERT_EQ(j.at("per_incident").size(), 2u);
  const double h0 = j.at("per_incident").at(0).at("metrics").at("hit@10");
  const double h1 = j.at("per_incident").at(1).at("metrics").at("hit@10");
  EXPECT_NEAR(j.at("aggregate").at("hit@10").get<double>(), (h0 + h1) / 2.0, 1e-12);
}

TEST_F(Cli, EvalMismatchedIncidentExitsOne) {
  const auto d = gen_scenario("d");
  nlohmann::json report;
  report["incident_id"] = "scenario-8";
  report["predicted"] = nlohmann::json::array();
  report["ranking"] = nlohmann::json::array();
  std::ofstream(dir_ / "other.json") << report.dump();
  const auto r =
      run("eval --reports " + (dir_ / "other.json").string() + " --truth " + d.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("scenario-8"), std::string::npos);
}

TEST_F(Cli, BenchEmitsOneRowPerStageAndRep) {
  const auto r = run("bench --sizes 960 --ms 10 --reps 5 --period 48");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n,m,rep,stage,seconds");
  std::map<std::string, int> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
    ASSERT_EQ(cells.size(), 5u) << line;
    EXPECT_EQ(cells[0], "960");
    EXPECT_EQ(cells[1], "10");
    EXPECT_GE(std::stod(cells[4]), 0.0);
    ++rows[cells[3]];
  }
  for (const char* stage :
       {"detection", "reduction", "symbolic_similarity", "causality", "scoring", "total"}) {
    EXPECT_EQ(rows[stage], 5) << stage;
  }
}

TEST_F(Cli, DetectConstantSeriesExitsThree) {
  {
    std::ofstream out(dir_ / "flat.csv");
    out << "timestamp,value\n";
    for (int t = 0; t < 480; ++t) out << 1700000000 + 60 * t << ",2.5\n";
  }
  const auto r = run("detect --period 24 " + (dir_ / "flat.csv").string());
  EXPECT_EQ(r.code, 3);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at("segments").empty());
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("localize --alpha 1 " + dir_.string()).code, 2);
  EXPECT_EQ(run("--version").code, 0);
}

}  // namespace
