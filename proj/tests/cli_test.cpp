// Copyright 2026 The Authors.
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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "crancache/cli.hpp"

namespace crancache {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

// Rows of a CSV metrics document, skipping "# key=value" lines and the
// column header.
std::vector<std::string> data_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

std::string header_value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  const std::string prefix = "# " + key + "=";
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  return {};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("crancache_cli_test_" + name)).string();
}

const std::vector<std::string> kSmall = {"--files", "200", "--requests", "2000", "--users", "50",
                                         "--bs", "3"};

std::vector<std::string> with_small(std::vector<std::string> args) {
  args.insert(args.end(), kSmall.begin(), kSmall.end());
  return args;
}

TEST(CliTest, SimulateWritesOneRowWithResolvedConfig) {
  const auto r = run_cli(with_small({"simulate", "--policy", "octopus", "--cache-total", "400MB",
                                     "--seed", "42"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(data_rows(r.out).size(), 1u);
  EXPECT_EQ(header_value(r.out, "seed"), "42");
  EXPECT_EQ(header_value(r.out, "files"), "200");
  EXPECT_EQ(header_value(r.out, "edge_capacity"), "2,2,2");
  EXPECT_EQ(header_value(r.out, "cloud_capacity"), "8");
  EXPECT_EQ(header_value(r.out, "workload_seed"), std::to_string(derive_seed(42, "workload")));
  EXPECT_NE(r.out.find(kMetricsCsvHeader), std::string::npos);
}

TEST(CliTest, ZeroCacheGivesZeroHitRatio) {
  const auto r = run_cli(with_small({"simulate", "--policy", "eo", "--cache-total", "0"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = data_rows(r.out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(crancache::detail::split(rows[0], ',')[4], "0");
}

TEST(CliTest, JsonOutput) {
  const auto r = run_cli(with_small({"simulate", "--policy", "lru", "--format", "json"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["config"]["policy"], "lru");
  ASSERT_EQ(doc["rows"].size(), 1u);
  EXPECT_EQ(doc["rows"][0]["requests"], 1600);
}

TEST(CliTest, MissingPolicyIsAConfigError) {
  const auto r = run_cli({"simulate", "--files", "10"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--policy"), std::string::npos);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(CliTest, UnknownPolicyAndBadValues) {
  EXPECT_EQ(run_cli(with_small({"simulate", "--policy", "belady"})).code, 1);
  EXPECT_EQ(run_cli(with_small({"simulate", "--policy", "eo", "--cache-total", "huge"})).code, 1);
  EXPECT_EQ(run_cli({"simulate", "--policy", "eo", "--format", "xml"}).code, 1);
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 1);
}

TEST(CliTest, SweepCacheTotalGivesNineRows) {
  const auto r = run_cli(with_small({"sweep", "--axis", "cache-total", "--values",
                                     "100MB,200MB,400MB", "--policies", "octopus,ecnc,eo"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = data_rows(r.out);
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0].substr(0, 14), "octopus,100MB,");
  EXPECT_EQ(rows[8].substr(0, 9), "eo,400MB,");
  EXPECT_EQ(header_value(r.out, "axis"), "cache-total");
}

TEST(CliTest, SweepZipfAlphaGivesFifteenRows) {
  const auto r = run_cli(with_small({"sweep", "--axis", "zipf-alpha", "--values", "0.6,0.7,0.8",
                                     "--policies", "octopus,exmpc,femtox,lfu,lru", "--jobs", "2"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(data_rows(r.out).size(), 15u);
}

TEST(CliTest, SweepOutputIsDeterministic) {
  const auto args = with_small({"sweep", "--axis", "policy", "--values",
                                "octopus,eo,ecnc,exmpc,femtox,lfu,lru", "--seed", "5"});
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(data_rows(a.out).size(), 7u);
  EXPECT_EQ(a.out, b.out);
}

TEST(CliTest, SweepNeedsValues) {
  EXPECT_EQ(run_cli(with_small({"sweep", "--axis", "cache-total", "--values", "",
                                "--policies", "eo"})).code, 1);
  EXPECT_EQ(run_cli(with_small({"sweep", "--axis", "cache-total", "--policies", "eo"})).code, 1);
  EXPECT_EQ(run_cli(with_small({"sweep", "--axis", "depth", "--values", "1", "--policies", "eo"}))
                .code, 1);
}

TEST(CliTest, GenTraceRoundTripsThroughValidate) {
  const auto path = temp_path("trace.csv");
  const std::vector<std::string> gen = {"gen-trace", "--files", "30", "--requests", "500",
                                        "--users", "7", "--seed", "3", "--out", path};
  ASSERT_EQ(run_cli(gen).code, 0);
  std::ifstream in(path);
  std::stringstream first;
  first << in.rdbuf();
  ASSERT_EQ(run_cli(gen).code, 0);
  std::ifstream again(path);
  std::stringstream second;
  second << again.rdbuf();
  EXPECT_EQ(first.str(), second.str());
  EXPECT_EQ(first.str().substr(0, 29), "timestamp,user_id,content_id\n");

  const auto v = run_cli({"validate-trace", "--trace", path});
  ASSERT_EQ(v.code, 0) << v.err;
  EXPECT_NE(v.out.find("events=500"), std::string::npos);

  const auto sim = run_cli({"simulate", "--policy", "lfu", "--trace", path, "--bs", "2",
                            "--cache-total", "100MB"});
  ASSERT_EQ(sim.code, 0) << sim.err;
  EXPECT_EQ(header_value(sim.out, "workload"), "trace");
  std::remove(path.c_str());
}

TEST(CliTest, TraceErrorsExitTwo) {
  const std::string dir = CRANCACHE_TEST_DIR;
  EXPECT_EQ(run_cli({"validate-trace", "--trace", dir + "/data/tiny_trace.csv"}).code, 0);
  EXPECT_EQ(run_cli({"validate-trace", "--trace", dir + "/data/bad_trace.csv"}).code, 2);
  EXPECT_EQ(run_cli({"validate-trace", "--trace", dir + "/data/missing.csv"}).code, 2);
  EXPECT_EQ(run_cli({"simulate", "--policy", "eo", "--trace", dir + "/data/missing.csv"}).code, 2);
}

TEST(CliTest, OracleCanonical) {
  const auto r = run_cli({"oracle", "--instance", "canonical"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("pcd_utility=170\n"), std::string::npos);
  EXPECT_NE(r.out.find("optimal_utility=170\n"), std::string::npos);
  EXPECT_NE(r.out.find("ratio=1\n"), std::string::npos);
}

TEST(CliTest, OracleTrialsReportMinimumRatio) {
  const auto r = run_cli({"oracle", "--trials", "200", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  double min_ratio = 0.0;
  ASSERT_TRUE(parse_double(doc["min_ratio"].get<std::string>(), min_ratio));
  EXPECT_GE(min_ratio, 0.5);
}

TEST(CliTest, OracleOversizedInstanceExitsThree) {
  const auto r = run_cli({"oracle", "--files", "100", "--bs", "3", "--cache-total", "1GB"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("C(F, M_r)"), std::string::npos);
}

TEST(CliTest, TopologyFileSetsBaseStations) {
  const auto topo = temp_path("topology.cfg");
  {
    std::ofstream out(topo);
    out << "num_bs=2\nedge_delay_ms=10,20\ncdn_delay_ms=100\npeer_delay_model=uturn\n";
  }
  const auto r = run_cli(with_small({"simulate", "--policy", "eo", "--topology", topo}));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(header_value(r.out, "bs"), "2");
  std::remove(topo.c_str());
}

TEST(CliTest, ConfigFileWithFlagOverride) {
  const auto cfg = temp_path("run.cfg");
  {
    std::ofstream out(cfg);
    out << "# small run\npolicy=eo\nfiles=100\nrequests=1000\nusers=20\nbs=2\n"
           "cache-total=0\nseed=9\n";
  }
  const auto a = run_cli({"simulate", "--config", cfg});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(header_value(a.out, "policy"), "eo");
  EXPECT_EQ(header_value(a.out, "seed"), "9");
  EXPECT_EQ(header_value(a.out, "files"), "100");

  const auto b = run_cli({"simulate", "--config", cfg, "--policy", "lru", "--seed", "10"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(header_value(b.out, "policy"), "lru");
  EXPECT_EQ(header_value(b.out, "seed"), "10");
  EXPECT_EQ(header_value(b.out, "bs"), "2");
  std::remove(cfg.c_str());

  EXPECT_EQ(run_cli({"simulate", "--config", "/nonexistent.cfg"}).code, 1);
}

TEST(CliTest, OutFileIsWritten) {
  const auto path = temp_path("metrics.csv");
  const auto r = run_cli(with_small({"simulate", "--policy", "exmpc", "--out", path}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(data_rows(text.str()).size(), 1u);
  std::remove(path.c_str());
  EXPECT_EQ(run_cli(with_small({"simulate", "--policy", "eo", "--out", "/nonexistent/dir/x.csv"}))
                .code, 2);
}

}  // namespace
}  // namespace crancache
