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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "rismec/tdma.h"

#ifndef RISMEC_VERSION
#define RISMEC_VERSION "unknown"
#endif

namespace rismec::exp {

namespace {

using nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void CheckKeys(const json& obj, std::initializer_list<const char*> allowed,
               const char* where) {
  if (!obj.is_object()) {
    throw std::invalid_argument(std::string(where) + " must be an object");
  }
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) {
      throw std::invalid_argument("unknown key '" + item.key() + "' in " + where);
    }
  }
}

// A scalar broadcast to every user, or one value per user.
std::vector<double> PerUser(const json& value, int num_users, double scale,
                            const char* key) {
  std::vector<double> out;
  if (value.is_number()) {
    out.assign(num_users, value.get<double>() * scale);
  } else if (value.is_array()) {
    for (const json& v : value) out.push_back(v.get<double>() * scale);
    if (static_cast<int>(out.size()) != num_users) {
      throw std::invalid_argument(std::string(key) + " needs num_users entries");
    }
  } else {
    throw std::invalid_argument(std::string(key) + " must be a number or array");
  }
  return out;
}

Point ReadPoint(const json& value, const char* key) {
  if (!value.is_array() || value.size() != 2) {
    throw std::invalid_argument(std::string(key) + " must be [x, y]");
  }
  return {value[0].get<double>(), value[1].get<double>()};
}

int SchemeIndex(const std::string& scheme) {
  for (int i = 0; i < 4; ++i) {
    if (scheme == kSchemes[i]) return i;
  }
  return -1;
}

std::string Format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

// Runs task(i) for i in [0, n) on up to `threads` workers.
void ParallelFor(std::size_t n, int threads, const std::function<void(std::size_t)>& task) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) task(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

void Fill(Row& row, const bcd::BcdResult& result) {
  row.total_j = result.energy.total;
  row.local_j = result.energy.LocalSum();
  row.offload_j = result.energy.OffloadSum();
  row.iters = result.iterations;
  row.converged = result.trace.converged;
}

}  // namespace

void ExperimentConfig::Validate() const {
  system.Validate();
  scenario.Validate(system.num_users);
  if (schemes.empty()) throw std::invalid_argument("no schemes requested");
  for (const std::string& s : schemes) {
    if (SchemeIndex(s) < 0) throw std::invalid_argument("unknown scheme '" + s + "'");
  }
  if (std::none_of(std::begin(kAxes), std::end(kAxes),
                   [&](const char* a) { return sweep_axis == a; })) {
    throw std::invalid_argument("unknown sweep axis '" + sweep_axis + "'");
  }
  if (sweep_axis != "none") {
    if (sweep_values.empty()) throw std::invalid_argument("sweep values are empty");
    if (!std::is_sorted(sweep_values.begin(), sweep_values.end())) {
      throw std::invalid_argument("sweep values must be sorted");
    }
  }
  if (seeds.empty()) throw std::invalid_argument("no seeds given");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

ExperimentConfig ParseConfig(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  CheckKeys(root, {"system", "scenario", "schemes", "sweep", "seeds", "solver",
                   "threads", "output"},
            "config");
  ExperimentConfig config;
  try {
    if (root.contains("system")) {
      const json& s = root["system"];
      CheckKeys(s, {"num_users", "num_antennas", "num_elements", "bandwidth_mhz",
                    "noise_dbm_per_hz", "latency_s", "capacitance", "task_mbits",
                    "cycles_per_bit", "local_cpu_ghz", "edge_cpu_ghz", "max_power_w"},
                "system");
      const int k = s.value("num_users", 4);
      SystemConfig cfg = SystemConfig::Default(k);
      cfg.num_antennas = s.value("num_antennas", cfg.num_antennas);
      cfg.num_elements = s.value("num_elements", cfg.num_elements);
      cfg.bandwidth_hz = s.value("bandwidth_mhz", cfg.bandwidth_hz / 1e6) * 1e6;
      cfg.noise_w = units::NoisePowerWatt(cfg.bandwidth_hz,
                                          s.value("noise_dbm_per_hz", -174.0));
      cfg.latency_s = s.value("latency_s", cfg.latency_s);
      cfg.capacitance = s.value("capacitance", cfg.capacitance);
      cfg.edge_cpu_hz = s.value("edge_cpu_ghz", cfg.edge_cpu_hz / 1e9) * 1e9;
      if (s.contains("task_mbits")) cfg.task_bits = PerUser(s["task_mbits"], k, 1e6, "task_mbits");
      if (s.contains("cycles_per_bit")) {
        cfg.cycles_per_bit = PerUser(s["cycles_per_bit"], k, 1.0, "cycles_per_bit");
      }
      if (s.contains("local_cpu_ghz")) {
        cfg.local_cpu_hz = PerUser(s["local_cpu_ghz"], k, 1e9, "local_cpu_ghz");
      }
      if (s.contains("max_power_w")) {
        cfg.max_power_w = PerUser(s["max_power_w"], k, 1.0, "max_power_w");
      }
      config.system = cfg;
    }
    if (root.contains("scenario")) {
      const json& s = root["scenario"];
      CheckKeys(s, {"bs_m", "ris_m", "user_area_center_m", "user_area_side_m",
                    "user_positions_m", "shadow_std_db", "shadow_direct",
                    "shadow_reflect", "shadow_bs_ris"},
                "scenario");
      PlacementScenario& sc = config.scenario;
      if (s.contains("bs_m")) sc.bs = ReadPoint(s["bs_m"], "bs_m");
      if (s.contains("ris_m")) sc.ris = ReadPoint(s["ris_m"], "ris_m");
      if (s.contains("user_area_center_m")) {
        sc.user_area_center = ReadPoint(s["user_area_center_m"], "user_area_center_m");
      }
      sc.user_area_side_m = s.value("user_area_side_m", sc.user_area_side_m);
      if (s.contains("user_positions_m")) {
        for (const json& p : s["user_positions_m"]) {
          sc.user_positions.push_back(ReadPoint(p, "user_positions_m entry"));
        }
      }
      sc.shadow_std_db = s.value("shadow_std_db", sc.shadow_std_db);
      sc.shadow_direct = s.value("shadow_direct", sc.shadow_direct);
      sc.shadow_reflect = s.value("shadow_reflect", sc.shadow_reflect);
      sc.shadow_bs_ris = s.value("shadow_bs_ris", sc.shadow_bs_ris);
    }
    if (root.contains("schemes")) {
      config.schemes = root["schemes"].get<std::vector<std::string>>();
    }
    if (root.contains("sweep")) {
      const json& s = root["sweep"];
      CheckKeys(s, {"axis", "values"}, "sweep");
      config.sweep_axis = s.value("axis", std::string("none"));
      if (s.contains("values")) config.sweep_values = s["values"].get<std::vector<double>>();
    }
    if (root.contains("seeds")) {
      const json& s = root["seeds"];
      if (s.is_array()) {
        config.seeds = s.get<std::vector<std::uint64_t>>();
      } else {
        CheckKeys(s, {"first", "count"}, "seeds");
        const std::uint64_t first = s.value("first", std::uint64_t{1});
        const int count = s.value("count", 1);
        config.seeds.clear();
        for (int i = 0; i < count; ++i) config.seeds.push_back(first + i);
      }
    }
    if (root.contains("solver")) {
      const json& s = root["solver"];
      CheckKeys(s, {"bcd_tol", "max_outer", "dual_max_iter", "dual_gap_tol",
                    "search_grid", "search_max_sweeps"},
                "solver");
      bcd::BcdOptions& o = config.solver;
      o.tol = s.value("bcd_tol", o.tol);
      o.max_outer = s.value("max_outer", o.max_outer);
      o.dual.max_iter = s.value("dual_max_iter", o.dual.max_iter);
      o.dual.gap_tol = s.value("dual_gap_tol", o.dual.gap_tol);
      o.search.grid_size = s.value("search_grid", o.search.grid_size);
      o.search.max_sweeps = s.value("search_max_sweeps", o.search.max_sweeps);
    }
    config.threads = root.value("threads", config.threads);
    config.output = root.value("output", config.output);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
  config.Validate();
  return config;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str());
}

void ApplySweep(const std::string& axis, double value, SystemConfig& cfg,
                PlacementScenario& scenario) {
  if (axis == "none") return;
  if (axis == "R") {
    cfg.SetTaskBits(value * 1e6);
  } else if (axis == "T") {
    cfg.latency_s = value;
  } else if (axis == "N") {
    if (value < 0.0 || value != std::floor(value)) {
      throw std::invalid_argument("N sweep values must be nonnegative integers");
    }
    cfg.num_elements = static_cast<int>(value);
  } else if (axis == "ris_x") {
    scenario.ris.x = value;
  } else if (axis == "ris_y") {
    scenario.ris.y = value;
  } else {
    throw std::invalid_argument("unknown sweep axis '" + axis + "'");
  }
}

Row run_one(const ExperimentConfig& config, const std::string& scheme, double value,
            std::uint64_t seed, const RunOptions& options) {
  Row row;
  row.scheme = scheme;
  row.sweep_axis = config.sweep_axis;
  row.sweep_value = config.sweep_axis == "none" ? 0.0 : value;
  row.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    SystemConfig cfg = config.system;
    PlacementScenario scenario = config.scenario;
    ApplySweep(config.sweep_axis, value, cfg, scenario);
    scenario.seed = seed;
    cfg.Validate();
    Allocation alloc;
    PhaseVector theta;
    SystemConfig check_cfg = cfg;
    if (scheme == "full_local") {
      row.total_j = row.local_j = tdma::full_local_energy(cfg);
      row.converged = true;
      alloc = Allocation::FullLocal(cfg.num_users);
      theta = PhaseVector::Zero(cfg.num_elements);
    } else {
      const ChannelSet ch = sample_channels(cfg, scenario);
      bcd::BcdResult result;
      if (scheme == "noma") {
        result = bcd::solve(cfg, ch, seed, config.solver);
      } else if (scheme == "tdma") {
        result = bcd::solve_tdma(cfg, ch, seed, config.solver);
      } else if (scheme == "full_offload") {
        result = bcd::solve_full_offload(cfg, ch, seed, config.solver);
        check_cfg = tdma::full_offload_config(cfg);
      } else {
        throw std::invalid_argument("unknown scheme '" + scheme + "'");
      }
      if (!result.feasible) throw std::runtime_error(result.note);
      Fill(row, result);
      alloc = result.allocation;
      theta = result.theta;
      const std::vector<Violation> bad = validate_allocation(
          alloc, check_cfg, snr_coefficients(ch, theta, cfg.noise_w), 1e-6);
      if (!bad.empty()) {
        row.valid = false;
        row.converged = false;
        row.note = "constraint violated: " + bad.front().constraint;
      }
    }
  } catch (const std::exception& e) {
    row.total_j = row.local_j = row.offload_j = kNan;
    row.converged = false;
    row.valid = false;
    row.note = e.what();
  }
  if (options.timing) {
    row.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  }
  return row;
}

std::vector<Row> run(const ExperimentConfig& config, const RunOptions& options) {
  config.Validate();
  struct Task {
    std::string scheme;
    double value;
    std::uint64_t seed;
  };
  std::vector<double> values = config.sweep_values;
  if (config.sweep_axis == "none" || values.empty()) values = {0.0};
  std::vector<std::string> schemes = config.schemes;
  std::stable_sort(schemes.begin(), schemes.end(), [](const auto& a, const auto& b) {
    return SchemeIndex(a) < SchemeIndex(b);
  });
  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());
  std::vector<Task> tasks;
  for (const std::string& s : schemes) {
    for (double v : values) {
      for (std::uint64_t seed : seeds) tasks.push_back({s, v, seed});
    }
  }
  std::vector<Row> rows(tasks.size());
  ParallelFor(tasks.size(), config.threads, [&](std::size_t i) {
    rows[i] = run_one(config, tasks[i].scheme, tasks[i].value, tasks[i].seed, options);
  });
  return rows;
}

std::vector<TracePoint> convergence_trace(const ExperimentConfig& config) {
  config.Validate();
  std::vector<int> ns;
  if (config.sweep_axis == "N") {
    for (double v : config.sweep_values) ns.push_back(static_cast<int>(v));
  } else {
    ns.push_back(config.system.num_elements);
  }
  std::vector<std::string> schemes;
  for (const char* s : {"noma", "tdma"}) {
    if (std::find(config.schemes.begin(), config.schemes.end(), s) !=
        config.schemes.end()) {
      schemes.push_back(s);
    }
  }
  if (schemes.empty()) schemes = {"noma", "tdma"};
  struct Task {
    std::string scheme;
    int n;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());
  for (const std::string& s : schemes) {
    for (int n : ns) {
      for (std::uint64_t seed : seeds) tasks.push_back({s, n, seed});
    }
  }
  std::vector<std::vector<TracePoint>> parts(tasks.size());
  ParallelFor(tasks.size(), config.threads, [&](std::size_t i) {
    const Task& task = tasks[i];
    SystemConfig cfg = config.system;
    cfg.num_elements = task.n;
    PlacementScenario scenario = config.scenario;
    if (config.sweep_axis != "N" && config.sweep_axis != "none" &&
        !config.sweep_values.empty()) {
      ApplySweep(config.sweep_axis, config.sweep_values.front(), cfg, scenario);
    }
    scenario.seed = task.seed;
    const ChannelSet ch = sample_channels(cfg, scenario);
    const bcd::BcdResult result =
        task.scheme == "noma" ? bcd::solve(cfg, ch, task.seed, config.solver)
                              : bcd::solve_tdma(cfg, ch, task.seed, config.solver);
    const std::vector<double>& j = result.trace.outer_objective;
    for (std::size_t it = 0; it < j.size(); ++it) {
      parts[i].push_back({task.scheme, task.n, task.seed, static_cast<int>(it + 1), j[it]});
    }
  });
  std::vector<TracePoint> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

double Median(std::vector<double> values) {
  if (values.empty()) return kNan;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<SummaryRow> compare_schemes(const std::vector<Row>& rows) {
  std::vector<SummaryRow> out;
  std::vector<std::pair<std::string, double>> keys;
  for (const Row& r : rows) {
    const auto key = std::make_pair(r.scheme, r.sweep_value);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const auto& [scheme, value] : keys) {
    SummaryRow s;
    s.scheme = scheme;
    s.sweep_value = value;
    std::vector<double> total, local, offload;
    for (const Row& r : rows) {
      if (r.scheme != scheme || r.sweep_value != value) continue;
      ++s.rows;
      if (!std::isfinite(r.total_j)) {
        ++s.failed;
        continue;
      }
      total.push_back(r.total_j);
      local.push_back(r.local_j);
      offload.push_back(r.offload_j);
    }
    s.median_total_j = Median(total);
    s.median_local_j = Median(local);
    s.median_offload_j = Median(offload);
    out.push_back(s);
  }
  return out;
}

void WriteRowsCsv(const std::vector<Row>& rows, std::ostream& out) {
  out << "scheme,sweep_axis,sweep_value,seed,total_j,local_j,offload_j,iters,"
         "converged,wall_ms\n";
  for (const Row& r : rows) {
    out << r.scheme << ',' << r.sweep_axis << ',' << Format("%.10g", r.sweep_value)
        << ',' << r.seed << ',' << Format("%.12e", r.total_j) << ','
        << Format("%.12e", r.local_j) << ',' << Format("%.12e", r.offload_j) << ','
        << r.iters << ',' << (r.converged ? "true" : "false") << ','
        << Format("%.3f", r.wall_ms) << '\n';
  }
}

void WriteTraceCsv(const std::vector<TracePoint>& trace, std::ostream& out) {
  out << "scheme,num_elements,seed,iteration,objective\n";
  for (const TracePoint& p : trace) {
    out << p.scheme << ',' << p.num_elements << ',' << p.seed << ',' << p.iteration
        << ',' << Format("%.12e", p.objective) << '\n';
  }
}

void WriteSummaryCsv(const std::vector<SummaryRow>& summary, std::ostream& out) {
  out << "scheme,sweep_value,median_total_j,median_local_j,median_offload_j,rows,"
         "failed\n";
  for (const SummaryRow& s : summary) {
    out << s.scheme << ',' << Format("%.10g", s.sweep_value) << ','
        << Format("%.12e", s.median_total_j) << ','
        << Format("%.12e", s.median_local_j) << ','
        << Format("%.12e", s.median_offload_j) << ',' << s.rows << ',' << s.failed
        << '\n';
  }
}

std::string ConfigJson(const ExperimentConfig& config) {
  const SystemConfig& s = config.system;
  const PlacementScenario& sc = config.scenario;
  json j;
  j["system"] = {{"num_users", s.num_users},
                 {"num_antennas", s.num_antennas},
                 {"num_elements", s.num_elements},
                 {"bandwidth_mhz", s.bandwidth_hz / 1e6},
                 {"noise_w", s.noise_w},
                 {"latency_s", s.latency_s},
                 {"capacitance", s.capacitance},
                 {"task_bits", s.task_bits},
                 {"cycles_per_bit", s.cycles_per_bit},
                 {"local_cpu_hz", s.local_cpu_hz},
                 {"edge_cpu_hz", s.edge_cpu_hz},
                 {"max_power_w", s.max_power_w}};
  json positions = json::array();
  for (const Point& p : sc.user_positions) positions.push_back({p.x, p.y});
  j["scenario"] = {{"bs_m", {sc.bs.x, sc.bs.y}},
                   {"ris_m", {sc.ris.x, sc.ris.y}},
                   {"user_area_center_m", {sc.user_area_center.x, sc.user_area_center.y}},
                   {"user_area_side_m", sc.user_area_side_m},
                   {"user_positions_m", positions},
                   {"shadow_std_db", sc.shadow_std_db},
                   {"shadow_direct", sc.shadow_direct},
                   {"shadow_reflect", sc.shadow_reflect},
                   {"shadow_bs_ris", sc.shadow_bs_ris}};
  j["schemes"] = config.schemes;
  j["sweep"] = {{"axis", config.sweep_axis}, {"values", config.sweep_values}};
  j["seeds"] = config.seeds;
  j["solver"] = {{"bcd_tol", config.solver.tol},
                 {"max_outer", config.solver.max_outer},
                 {"dual_max_iter", config.solver.dual.max_iter},
                 {"dual_gap_tol", config.solver.dual.gap_tol},
                 {"search_grid", config.solver.search.grid_size},
                 {"search_max_sweeps", config.solver.search.max_sweeps}};
  return j.dump();
}

std::uint64_t ConfigHash(const ExperimentConfig& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : ConfigJson(config)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void WriteManifest(const ExperimentConfig& config, const std::string& csv_path,
                   std::size_t rows, std::ostream& out) {
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(ConfigHash(config)));
  json j;
  j["config_hash"] = hash;
  j["config"] = json::parse(ConfigJson(config));
  j["seeds"] = config.seeds;
  j["version"] = RISMEC_VERSION;
  j["csv"] = csv_path;
  j["rows"] = rows;
  out << j.dump(2) << '\n';
}

}  // namespace rismec::exp
