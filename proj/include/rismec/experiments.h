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


// Seeded experiment sweeps over the four schemes, CSV/JSON output and the
// per-scheme summaries used by the command-line tool.

#ifndef RISMEC_EXPERIMENTS_H_
#define RISMEC_EXPERIMENTS_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rismec/bcd.h"
#include "rismec/channel.h"
#include "rismec/model.h"

namespace rismec::exp {

inline constexpr const char* kSchemes[] = {"noma", "tdma", "full_local", "full_offload"};
inline constexpr const char* kAxes[] = {"R", "T", "N", "ris_x", "ris_y", "none"};

struct ExperimentConfig {
  SystemConfig system = SystemConfig::Default(4);
  PlacementScenario scenario;
  std::vector<std::string> schemes{"noma", "tdma", "full_local", "full_offload"};
  std::string sweep_axis = "none";
  std::vector<double> sweep_values;  // R in Mbit, T in s, N, or metres
  std::vector<std::uint64_t> seeds{1};
  bcd::BcdOptions solver;
  int threads = 1;
  std::string output = "results.csv";

  // Throws std::invalid_argument on an unknown scheme or axis, unsorted or
  // empty sweep values (unless the axis is none), or no seeds.
  void Validate() const;
};

// Keys carry their units: bandwidth_mhz, latency_s, task_mbits, ...
// Missing keys keep the defaults. Throws std::invalid_argument on unknown
// keys or bad values.
ExperimentConfig ParseConfig(const std::string& json_text);
ExperimentConfig LoadConfig(const std::string& path);

// The config after applying one sweep value (and the seed to the scenario).
void ApplySweep(const std::string& axis, double value, SystemConfig& cfg,
                PlacementScenario& scenario);

struct Row {
  std::string scheme;
  std::string sweep_axis;
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  double total_j = 0.0;
  double local_j = 0.0;
  double offload_j = 0.0;
  int iters = 0;
  bool converged = false;
  double wall_ms = 0.0;
  bool valid = true;  // allocation re-validated against the constraints
  std::string note;
};

struct RunOptions {
  bool timing = false;  // record wall time; off keeps the CSV reproducible
};

// One row per (scheme, sweep value, seed), sorted by (scheme order in the
// config, value, seed). Failures become rows with NaN energies.
std::vector<Row> run(const ExperimentConfig& config, const RunOptions& options = {});

// Single (scheme, value, seed) evaluation.
Row run_one(const ExperimentConfig& config, const std::string& scheme,
            double value, std::uint64_t seed, const RunOptions& options = {});

struct TracePoint {
  std::string scheme;
  int num_elements = 0;
  std::uint64_t seed = 0;
  int iteration = 0;
  double objective = 0.0;
};

// Outer-iteration objectives of noma (BCD) and tdma (search sweeps). Uses
// the N sweep values when the axis is N, else the configured N.
std::vector<TracePoint> convergence_trace(const ExperimentConfig& config);

struct SummaryRow {
  std::string scheme;
  double sweep_value = 0.0;
  double median_total_j = 0.0;
  double median_local_j = 0.0;
  double median_offload_j = 0.0;
  int rows = 0;
  int failed = 0;
};

// Per (scheme, value) medians over seeds, skipping failed rows.
std::vector<SummaryRow> compare_schemes(const std::vector<Row>& rows);

double Median(std::vector<double> values);

void WriteRowsCsv(const std::vector<Row>& rows, std::ostream& out);
void WriteTraceCsv(const std::vector<TracePoint>& trace, std::ostream& out);
void WriteSummaryCsv(const std::vector<SummaryRow>& summary, std::ostream& out);

// FNV-1a 64 of the canonical config dump.
std::uint64_t ConfigHash(const ExperimentConfig& config);
std::string ConfigJson(const ExperimentConfig& config);
void WriteManifest(const ExperimentConfig& config, const std::string& csv_path,
                   std::size_t rows, std::ostream& out);

}  // namespace rismec::exp

#endif  // RISMEC_EXPERIMENTS_H_
