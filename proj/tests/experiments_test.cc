// Copyright 2026 The rismec Authors.
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


#include "rismec/experiments.h"

#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

namespace rismec::exp {
namespace {

ExperimentConfig Small() {
  return ParseConfig(R"({
    "system": {"num_users": 2, "num_elements": 3},
    "sweep": {"axis": "R", "values": [0.5, 1.0]},
    "seeds": {"first": 1, "count": 2}
  })");
}

TEST(ParseConfigTest, DefaultsAndUnits) {
  const ExperimentConfig d = ParseConfig("{}");
  EXPECT_EQ(d.system.num_users, 4);
  EXPECT_EQ(d.schemes.size(), 4u);
  EXPECT_EQ(d.sweep_axis, "none");

  const ExperimentConfig c = ParseConfig(R"({
    "system": {"bandwidth_mhz": 2, "task_mbits": [1, 2, 3, 4], "latency_s": 0.5},
    "seeds": [5, 7], "threads": 2
  })");
  EXPECT_EQ(c.system.bandwidth_hz, 2e6);
  EXPECT_EQ(c.system.task_bits[3], 4e6);
  EXPECT_EQ(c.system.latency_s, 0.5);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{5, 7}));
  EXPECT_EQ(Small().seeds, (std::vector<std::uint64_t>{1, 2}));
}

TEST(ParseConfigTest, Rejections) {
  EXPECT_THROW(ParseConfig(R"({"sytem": {}})"), std::invalid_argument);
  EXPECT_THROW(ParseConfig(R"({"system": {"latency": 1}})"), std::invalid_argument);
  EXPECT_THROW(ParseConfig(R"({"schemes": ["ofdma"]})"), std::invalid_argument);
  EXPECT_THROW(ParseConfig(R"({"sweep": {"axis": "R", "values": [2, 1]}})"),
               std::invalid_argument);
  EXPECT_THROW(ParseConfig(R"({"sweep": {"axis": "Q", "values": [1]}})"),
               std::invalid_argument);
  EXPECT_THROW(ParseConfig(R"({"seeds": []})"), std::invalid_argument);
  EXPECT_THROW(ParseConfig("not json"), std::invalid_argument);
}

TEST(ApplySweepTest, Axes) {
  SystemConfig cfg = SystemConfig::Default(2);
  PlacementScenario sc;
  ApplySweep("R", 1.5, cfg, sc);
  EXPECT_EQ(cfg.task_bits[1], 1.5e6);
  ApplySweep("T", 0.4, cfg, sc);
  EXPECT_EQ(cfg.latency_s, 0.4);
  ApplySweep("N", 15, cfg, sc);
  EXPECT_EQ(cfg.num_elements, 15);
  ApplySweep("ris_x", -100, cfg, sc);
  EXPECT_EQ(sc.ris.x, -100);
  ApplySweep("ris_y", 50, cfg, sc);
  EXPECT_EQ(sc.ris.y, 50);
}

TEST(RunTest, RowsOrderedAndValid) {
  const ExperimentConfig c = Small();
  const std::vector<Row> rows = run(c);
  ASSERT_EQ(rows.size(), 4u * 2u * 2u);
  EXPECT_EQ(rows.front().scheme, "noma");
  EXPECT_EQ(rows.back().scheme, "full_offload");
  for (const Row& r : rows) {
    EXPECT_TRUE(r.valid) << r.scheme << " " << r.note;
    EXPECT_NEAR(r.local_j + r.offload_j, r.total_j, 1e-12 * r.total_j);
    EXPECT_EQ(r.wall_ms, 0.0);
  }
  // Local computing ignores the channel.
  EXPECT_EQ(rows[8].scheme, "full_local");
  EXPECT_EQ(rows[8].total_j, rows[9].total_j);
  EXPECT_NEAR(rows[8].total_j, 2 * 1e-28 * std::pow(0.5e9, 3) / 0.36, 1e-12);
}

TEST(RunTest, DeterministicAcrossThreadCounts) {
  ExperimentConfig c = Small();
  std::ostringstream a, b;
  WriteRowsCsv(run(c), a);
  c.threads = 3;
  WriteRowsCsv(run(c), b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().rfind("scheme,sweep_axis,sweep_value,seed,total_j", 0), 0u);
}

TEST(RunTest, InfeasibleBecomesNanRow) {
  ExperimentConfig c = ParseConfig(R"({
    "system": {"num_users": 1, "num_elements": 0, "task_mbits": 20},
    "schemes": ["full_local"]
  })");
  const std::vector<Row> rows = run(c);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(std::isnan(rows[0].total_j));
  EXPECT_FALSE(rows[0].note.empty());
}

TEST(TraceTest, GroupsPerSchemeAndN) {
  ExperimentConfig c = ParseConfig(R"({
    "system": {"num_users": 2},
    "schemes": ["noma", "tdma"],
    "sweep": {"axis": "N", "values": [2, 3, 4]}
  })");
  const std::vector<TracePoint> trace = convergence_trace(c);
  std::set<std::pair<std::string, int>> groups;
  for (const TracePoint& p : trace) groups.insert({p.scheme, p.num_elements});
  EXPECT_EQ(groups.size(), 6u);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const TracePoint& a = trace[i - 1];
    const TracePoint& b = trace[i];
    if (a.scheme == b.scheme && a.num_elements == b.num_elements && a.seed == b.seed) {
      EXPECT_LE(b.objective, a.objective + 1e-8);
    }
  }
}

TEST(SummaryTest, Medians) {
  EXPECT_EQ(Median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(Median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_TRUE(std::isnan(Median({})));
  std::vector<Row> rows;
  for (double v : {1.0, 5.0, 3.0, std::nan("")}) {
    Row r;
    r.scheme = "noma";
    r.sweep_value = 1.0;
    r.total_j = r.local_j = v;
    r.valid = !std::isnan(v);
    rows.push_back(r);
  }
  const std::vector<SummaryRow> s = compare_schemes(rows);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].median_total_j, 3.0);
  EXPECT_EQ(s[0].rows, 4);
  EXPECT_EQ(s[0].failed, 1);
}

TEST(ManifestTest, HashIgnoresThreadsAndOutput) {
  ExperimentConfig a = Small();
  ExperimentConfig b = a;
  b.threads = 8;
  b.output = "elsewhere.csv";
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  b.system.latency_s = 0.7;
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
  std::ostringstream m;
  WriteManifest(a, "x.csv", 16, m);
  EXPECT_NE(m.str().find("config_hash"), std::string::npos);
}

}  // namespace
}  // namespace rismec::exp
