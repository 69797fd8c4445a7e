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


#include "rismec/bcd.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

namespace rismec::bcd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlack = 1e-8;  // absolute J slack of the safeguard

using Clock = std::chrono::steady_clock;

double MsSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

const char* BlockName(Block block) {
  switch (block) {
    case Block::kDual:
      return "dual";
    case Block::kPhase:
      return "phase";
    case Block::kSearch:
      return "search";
  }
  return "unknown";
}

BcdResult solve(const SystemConfig& cfg, const ChannelSet& ch, std::uint64_t seed,
                const BcdOptions& options) {
  cfg.Validate();
  BcdResult result;
  result.theta = PhaseVector::Random(ch.num_elements(), seed);
  double j = kInf;
  double previous = kInf;
  for (int outer = 1; outer <= options.max_outer; ++outer) {
    result.iterations = outer;

    auto start = Clock::now();
    const std::vector<double> gamma = snr_coefficients(ch, result.theta, cfg.noise_w);
    dual::SolveReport report = dual::solve_given_phases(cfg, gamma, options.dual);
    TraceEntry entry{outer, Block::kDual, report.energy.total, false, 0.0};
    if (!report.feasible) {
      if (!std::isfinite(j)) {
        result.feasible = false;
        result.note = "dual block: " + report.note;
        result.trace.entries.push_back(entry);
        return result;
      }
    } else if (report.energy.total <= j + kSlack) {
      j = report.energy.total;
      result.allocation = std::move(report.allocation);
      result.energy = report.energy;
      entry.accepted = true;
    }
    entry.wall_ms = MsSince(start);
    result.trace.entries.push_back(entry);

    if (ch.num_elements() > 0 && result.allocation.tx_time_s > 0.0) {
      start = Clock::now();
      phase::PhaseResult ph = phase::solve_given_power(
          cfg, ch, result.allocation.power_w, result.theta, options.phase);
      TraceEntry pe{outer, Block::kPhase, ph.energy.total, false, 0.0};
      if (ph.feasible && ph.energy.total <= j + kSlack) {
        j = std::min(j, ph.energy.total);
        result.theta = ph.theta;
        result.allocation = std::move(ph.allocation);
        result.energy = ph.energy;
        pe.accepted = true;
      }
      pe.wall_ms = MsSince(start);
      result.trace.entries.push_back(pe);
    }

    result.trace.outer_objective.push_back(j);
    if (outer >= 2 && std::abs(previous - j) <= options.tol * std::abs(j)) {
      result.trace.converged = true;
      break;
    }
    previous = j;
  }
  return result;
}

BcdResult solve_tdma(const SystemConfig& cfg, const ChannelSet& ch,
                     std::uint64_t seed, const BcdOptions& options) {
  cfg.Validate();
  BcdResult result;
  auto start = Clock::now();
  tdma::SearchResult search = tdma::alternating_1d_search(
      cfg, ch, PhaseVector::Random(ch.num_elements(), seed), options.search);
  const double search_ms = MsSince(start);
  for (std::size_t i = 0; i < search.sweep_trace.size(); ++i) {
    result.trace.entries.push_back({static_cast<int>(i), Block::kSearch,
                                    search.sweep_trace[i], true,
                                    i + 1 == search.sweep_trace.size() ? search_ms : 0.0});
    result.trace.outer_objective.push_back(search.sweep_trace[i]);
  }
  result.theta = search.theta;
  result.iterations = search.sweeps;
  result.trace.converged = search.sweeps < options.search.max_sweeps;

  start = Clock::now();
  const std::vector<double> gamma = snr_coefficients(ch, result.theta, cfg.noise_w);
  tdma::TdmaReport report = tdma::solve_tdma_given_phases(cfg, gamma, options.dual);
  result.trace.entries.push_back({result.iterations, Block::kDual, report.energy.total,
                                  report.feasible, MsSince(start)});
  if (!report.feasible) {
    result.feasible = false;
    result.note = "dual block: " + report.note;
    return result;
  }
  result.allocation = std::move(report.allocation);
  result.energy = report.energy;
  return result;
}

BcdResult solve_full_offload(const SystemConfig& cfg, const ChannelSet& ch,
                             std::uint64_t seed, const BcdOptions& options) {
  cfg.Validate();
  const SystemConfig big = tdma::full_offload_config(cfg);
  BcdResult result;
  auto start = Clock::now();
  tdma::SearchResult search = tdma::alternating_1d_search(
      big, ch, PhaseVector::Random(ch.num_elements(), seed),
      [&big](std::span<const double> gamma) {
        return tdma::full_offload_energy(big, gamma);
      },
      options.search);
  const double search_ms = MsSince(start);
  for (std::size_t i = 0; i < search.sweep_trace.size(); ++i) {
    result.trace.entries.push_back({static_cast<int>(i), Block::kSearch,
                                    search.sweep_trace[i], true,
                                    i + 1 == search.sweep_trace.size() ? search_ms : 0.0});
    result.trace.outer_objective.push_back(search.sweep_trace[i]);
  }
  result.theta = search.theta;
  result.iterations = search.sweeps;

  start = Clock::now();
  dual::SolveReport report = tdma::full_offload_solve(cfg, ch, result.theta, options.dual);
  result.trace.entries.push_back({result.iterations, Block::kDual, report.energy.total,
                                  report.feasible, MsSince(start)});
  if (!report.feasible) {
    result.feasible = false;
    result.note = "dual block: " + report.note;
    return result;
  }
  result.trace.converged = report.converged;
  result.allocation = std::move(report.allocation);
  result.energy = report.energy;
  return result;
}

}  // namespace rismec::bcd
