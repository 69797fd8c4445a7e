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

// Benchmarks: the orthogonal (1/K resource share) scheme solved by duality
// with an alternating 1-D phase search, full local computing, and full
// offloading over NOMA.

#ifndef RISMEC_TDMA_H_
#define RISMEC_TDMA_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rismec/channel.h"
#include "rismec/dual_solver.h"
#include "rismec/model.h"

namespace rismec::tdma {

// (B / K) log2(1 + gamma p) with gamma in 1/W.
double tdma_rate(double gamma, double power_w, const SystemConfig& cfg);

// Same closed form as the NOMA offload subproblem with (upsilon, xi).
double tdma_optimal_d(double upsilon, double xi_k, const SystemConfig& cfg, int k);

// clip(eta B / (T K ln 2) - 1 / gamma, 0, P_k); 0 when gamma = 0.
double tdma_optimal_p(double eta_k, double gamma, const SystemConfig& cfg, int k);

// The rate cap when eta <= T xi (ties transmit), else 0.
double tdma_optimal_r(double eta_k, double xi_k, double power_w, double gamma,
                      const SystemConfig& cfg);

struct TdmaDualState {
  double upsilon = 0.0;
  std::vector<double> xi;
  std::vector<double> eta;
  int iteration = 0;
  double step_scale = 1.0;
  int stall = 0;
};

struct TdmaStepSizes {
  double upsilon = 0.0;
  std::vector<double> xi;
  std::vector<double> eta;
};

// upsilon <- [upsilon + d3 (sum d C - F)]^+, xi <- [xi + d4 (d - t r)]^+,
// eta <- [eta + d5 (r - cap(p))]^+.
TdmaDualState tdma_update_duals(const TdmaDualState& state, const Allocation& alloc,
                                std::span<const double> gamma,
                                const SystemConfig& cfg, const TdmaStepSizes& steps);

struct TdmaReport : dual::SolveReport {
  TdmaDualState tdma_duals;
};

// Exact optimum of the active (t = T) orthogonal branch: per-user 1-D convex
// problems coupled by a bisection on the edge-capacity price.
std::optional<dual::PrimalPoint> tdma_exact_active(const SystemConfig& cfg,
                                                   std::span<const double> gamma);

// min(full local, exact active branch); +inf when neither is feasible.
double tdma_energy(const SystemConfig& cfg, std::span<const double> gamma);

TdmaReport solve_tdma_given_phases(const SystemConfig& cfg,
                                   std::span<const double> gamma,
                                   const dual::DualOptions& options = {});

struct SearchOptions {
  int grid_size = 64;
  int refine_passes = 2;
  int refine_points = 17;
  int max_sweeps = 20;
  double tol = 1e-12;  // relative sweep improvement that stops the search
};

struct SearchResult {
  PhaseVector theta;
  std::vector<double> sweep_trace;  // objective before sweep 1, then after each
  std::vector<double> trace;        // objective after every coordinate update
  int sweeps = 0;
};

// Coordinate-wise grid minimization of tdma_energy over theta_1..theta_N.
SearchResult alternating_1d_search(const SystemConfig& cfg, const ChannelSet& ch,
                                   const PhaseVector& theta_init,
                                   const SearchOptions& options = {});

// Same search for an arbitrary objective of the SNR coefficients.
using GainObjective = std::function<double(std::span<const double>)>;
SearchResult alternating_1d_search(const SystemConfig& cfg, const ChannelSet& ch,
                                   const PhaseVector& theta_init,
                                   const GainObjective& objective,
                                   const SearchOptions& options = {});

// sum_k alpha R^3 C^3 / T^2. Throws std::domain_error when some user cannot
// finish locally (R C > F_k T).
double full_local_energy(const SystemConfig& cfg);

// F = 50 GHz and a 1e6 W power sentinel in place of the caps.
SystemConfig full_offload_config(const SystemConfig& cfg);

// Least T sum p delivering every R_k by T over NOMA, by power inversion at
// each decoding order (all K! for K <= 8, else weakest user interference
// free). Infinite when F or the power caps cannot carry the load.
double full_offload_energy(const SystemConfig& cfg, std::span<const double> gamma);

// d = R for every user over NOMA at the given phases.
dual::SolveReport full_offload_solve(const SystemConfig& cfg, const ChannelSet& ch,
                                     const PhaseVector& phases,
                                     const dual::DualOptions& options = {});

}  // namespace rismec::tdma

#endif  // RISMEC_TDMA_H_
