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


// rismec: experiment front end.
//
//   rismec run     --config exp.json --out rows.csv
//   rismec sweep   --config exp.json --axis R --values 0.2,0.6,1.0
//   rismec compare --config exp.json --out summary.csv
//   rismec trace   --config exp.json --out trace.csv

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rismec/experiments.h"

namespace {

using rismec::exp::ExperimentConfig;

// "1-10" or "1,4,9".
std::vector<std::uint64_t> ParseSeeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  const auto dash = text.find('-');
  if (dash != std::string::npos) {
    const std::uint64_t a = std::stoull(text.substr(0, dash));
    const std::uint64_t b = std::stoull(text.substr(dash + 1));
    if (b < a) throw std::invalid_argument("empty seed range");
    for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw std::invalid_argument("no seeds in '" + text + "'");
  return seeds;
}

struct Common {
  std::string config_path;
  std::string out;
  std::string seeds;
  std::vector<std::string> schemes;
  int threads = 0;
  bool timing = false;
};

void AddCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "experiment config (JSON)");
  cmd->add_option("--out", c.out, "output CSV path (default: config output)");
  cmd->add_option("--seeds", c.seeds, "seed list '1,2,3' or range '1-10'");
  cmd->add_option("--scheme", c.schemes, "noma, tdma, full_local, full_offload")
      ->delimiter(',');
  cmd->add_option("--threads", c.threads, "worker threads");
  cmd->add_flag("--timing", c.timing, "record wall time per row");
}

ExperimentConfig Resolve(const Common& c) {
  ExperimentConfig config =
      c.config_path.empty() ? ExperimentConfig{} : rismec::exp::LoadConfig(c.config_path);
  if (!c.seeds.empty()) config.seeds = ParseSeeds(c.seeds);
  if (!c.schemes.empty()) config.schemes = c.schemes;
  if (c.threads > 0) config.threads = c.threads;
  if (!c.out.empty()) config.output = c.out;
  config.Validate();
  return config;
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

int WriteRun(const ExperimentConfig& config, bool timing) {
  rismec::exp::RunOptions options;
  options.timing = timing;
  const auto rows = rismec::exp::run(config, options);
  {
    std::ofstream out = OpenOut(config.output);
    rismec::exp::WriteRowsCsv(rows, out);
  }
  std::ofstream manifest = OpenOut(config.output + ".manifest.json");
  rismec::exp::WriteManifest(config, config.output, rows.size(), manifest);
  int failed = 0;
  for (const auto& r : rows) failed += r.note.empty() ? 0 : 1;
  std::cerr << rows.size() << " rows written to " << config.output;
  if (failed) std::cerr << " (" << failed << " with notes)";
  std::cerr << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-minimal offloading for RIS-aided NOMA edge computing"};
  app.require_subcommand(1);
  app.set_version_flag("--version", RISMEC_VERSION);

  Common run_args, sweep_args, compare_args, trace_args;
  CLI::App* run_cmd = app.add_subcommand("run", "one row per (scheme, value, seed)");
  AddCommon(run_cmd, run_args);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run with an overridden sweep");
  AddCommon(sweep_cmd, sweep_args);
  std::string axis;
  std::vector<double> values;
  sweep_cmd->add_option("--axis", axis, "R, T, N, ris_x, ris_y or none")->required();
  sweep_cmd->add_option("--values", values, "sorted sweep values")->delimiter(',');

  CLI::App* compare_cmd = app.add_subcommand("compare", "per-scheme medians");
  AddCommon(compare_cmd, compare_args);

  CLI::App* trace_cmd = app.add_subcommand("trace", "outer-iteration objectives");
  AddCommon(trace_cmd, trace_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return WriteRun(Resolve(run_args), run_args.timing);
    if (*sweep_cmd) {
      ExperimentConfig config = Resolve(sweep_args);
      config.sweep_axis = axis;
      config.sweep_values = values;
      config.Validate();
      return WriteRun(config, sweep_args.timing);
    }
    if (*compare_cmd) {
      const ExperimentConfig config = Resolve(compare_args);
      const auto summary = rismec::exp::compare_schemes(rismec::exp::run(config));
      std::ofstream out = OpenOut(config.output);
      rismec::exp::WriteSummaryCsv(summary, out);
      return 0;
    }
    if (*trace_cmd) {
      const ExperimentConfig config = Resolve(trace_args);
      std::ofstream out = OpenOut(config.output);
      rismec::exp::WriteTraceCsv(rismec::exp::convergence_trace(config), out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "rismec: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
