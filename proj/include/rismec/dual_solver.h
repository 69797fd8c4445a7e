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

// NOMA resource allocation for fixed RIS phases by Lagrangian duality.
//
// With per-watt SNR coefficients gamma_k the problem is
//
//   min  sum_k alpha (R_k - d_k)^3 C_k^3 / T^2 + t p_k
//   s.t. sum_k d_k C_k <= F,  d_k <= t r_k,  r in region(gamma p),
//        0 <= t <= T,  0 <= p <= P,  D <= d <= R.
//
// Relaxing the edge capacity (lambda) and the delivery constraints (mu)
// decouples d, which has a closed form, from (p, r), whose minimizer sits at
// the polymatroid vertex of the descending-mu order. The multipliers follow
// projected subgradient ascent. For t = T the primal problem is convex in
// (d, p), so the best primal point is also polished by an interior-point
// solve and the dual bound certifies the remaining gap.

#ifndef RISMEC_DUAL_SOLVER_H_
#define RISMEC_DUAL_SOLVER_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rismec/convex.h"
#include "rismec/model.h"
#include "rismec/noma.h"

namespace rismec::dual {

struct DualState {
  double lambda = 0.0;     // edge capacity, J per cycle
  std::vector<double> mu;  // bit delivery, J per bit
  int iteration = 0;
  double step_scale = 1.0;  // current Polyak factor or schedule numerator
  int stall = 0;            // iterations since the best dual value improved
};

struct StepSizes {
  double lambda = 0.0;     // delta_1
  std::vector<double> mu;  // delta_2, one per user
};

enum class StepRule {
  kPolyak,       // (best primal - g) / ||s||^2 in scaled coordinates
  kDiminishing,  // a / (1 + b i) in scaled coordinates
};

struct DualOptions {
  int max_iter = 2000;
  double gap_tol = 1e-5;  // relative primal-dual gap
  StepRule step_rule = StepRule::kPolyak;
  double step_scale = 1.0;   // Polyak factor, or a for the schedule
  double step_decay = 0.05;  // b of the diminishing schedule
  bool force_full_offload = false;  // fixes d = R, skips the t = 0 branch
  convex::Tolerances tolerances;
};

struct SolveReport {
  Allocation allocation;
  DualState duals;
  std::vector<double> primal_trace;  // best primal energy after iteration i
  std::vector<double> dual_trace;    // certified dual value at iteration i
  bool converged = false;
  bool feasible = true;
  int iterations = 0;
  double best_dual = 0.0;
  double gap = 0.0;  // (primal - best dual) / primal
  EnergyBreakdown energy;
  std::string note;
};

// Closed-form minimizer of local(d) + (lambda C_k + mu_k) d over [D_k, R_k].
double optimal_d(double lambda, double mu_k, const SystemConfig& cfg, int k);

// Energies of the two transmission-time branches. The idle branch (t = 0,
// everything local) is absent when some D_k > 0.
struct BranchCandidates {
  std::optional<double> idle;
  std::optional<double> active;
};

// T when the active branch is strictly cheaper, else 0. Throws
// std::domain_error when neither branch is available.
double choose_t(const BranchCandidates& candidates, double latency_s);

struct PowerSolution {
  std::vector<double> power;
  double value = 0.0;        // h(p) at the returned point
  double lower_bound = 0.0;  // certified lower bound on min h over the box
  double stationarity = 0.0;
  bool converged = false;
};

// Minimizes h(p) = T [sum_k p_k - sum_j c_j B log2(1 + sum_{i<=j} gamma p)]
// over 0 <= p <= P, where c_j = mu_{order[j]} - mu_{order[j+1]} and the last
// coefficient uses mu = 0. `order` must be descending in mu.
PowerSolution power_subproblem(std::span<const double> mu,
                               std::span<const int> order,
                               std::span<const double> gamma,
                               const SystemConfig& cfg,
                               std::span<const double> warm_start = {});

// lambda <- [lambda + delta_1 (sum d C - F)]^+,
// mu_k   <- [mu_k + delta_2k (d_k - t r_k)]^+.
DualState update_duals(const DualState& state, const Allocation& alloc,
                       const SystemConfig& cfg, const StepSizes& steps);

// Projected dual ascent with primal recovery, branch selection and time sharing.
SolveReport solve_given_phases(const SystemConfig& cfg,
                               std::span<const double> gamma,
                               const DualOptions& options = {});

// Convex (d, p) solve of the t = T problem. Coordinates listed in the masks
// are held at the values in `fixed_d` / `fixed_p`. Returns nullopt when no
// strictly feasible point exists.
struct PrimalPoint {
  std::vector<double> offload_bits;
  std::vector<double> power_w;
  double energy = 0.0;
};
std::optional<PrimalPoint> solve_active_branch(
    const SystemConfig& cfg, std::span<const double> gamma,
    const std::vector<bool>& hold_d, std::span<const double> fixed_d,
    const std::vector<bool>& hold_p, std::span<const double> fixed_p,
    const convex::Tolerances& tol = convex::DefaultTolerances());

// Cheapest d for fixed powers (local cost traded against the region).
std::optional<PrimalPoint> optimal_offload_for_power(
    const SystemConfig& cfg, std::span<const double> gamma,
    std::span<const double> power);

// Least total power delivering `bits` within the latency bound.
std::optional<PrimalPoint> min_power_for_offload(const SystemConfig& cfg,
                                                 std::span<const double> gamma,
                                                 std::span<const double> bits);

// SIC power inversion: the powers that deliver bits/T exactly at `order`.
std::vector<double> invert_vertex_power(std::span<const double> gamma,
                                        std::span<const double> bits,
                                        std::span<const int> order,
                                        double tx_time_s, double bandwidth_hz);

// Splits [0, t] into decoding-order slots delivering `bits`, trying the
// rotations and permutations inside the tie groups of `order` and then every
// order (K <= 6). Returns an empty list when no decomposition is found.
std::vector<TimeSlot> decompose_into_slots(const noma::RateRegion& region,
                                           std::span<const double> bits,
                                           double tx_time_s,
                                           const noma::DecodingOrder& order);

}  // namespace rismec::dual

#endif  // RISMEC_DUAL_SOLVER_H_
