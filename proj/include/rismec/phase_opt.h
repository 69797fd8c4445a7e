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

// RIS phase design for fixed transmit powers.
//
// Lifted variable: u_n = exp(-i theta_n), so that with
// V_k = diag(conj(h_k)) G the combined gain is the quadratic form
//
//   g_k(u) = ||hD_k||^2 + 2 Re(u^H V_k hD_k) + u^H V_k V_k^H u.
//
// The convex term is replaced by its tangent at u_ref (a global
// under-estimator), the unit-modulus constraint is relaxed to |u_n| <= 1 and
// enforced by a linearized penalty Q sum_n (1 - |u_n|^2). Each surrogate is a
// smooth convex program over (d, Re u, Im u) solved by the barrier method.

#ifndef RISMEC_PHASE_OPT_H_
#define RISMEC_PHASE_OPT_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rismec/channel.h"
#include "rismec/convex.h"
#include "rismec/model.h"

namespace rismec::phase {

// V_k[n, m] = conj(h_k[n]) G[n, m].
Eigen::MatrixXcd cascade_matrix(const ChannelSet& ch, int k);

// u = exp(-i theta) and back (theta = -arg u, wrapped to [0, 2 pi)).
Eigen::VectorXcd lift(const PhaseVector& phases);
PhaseVector unlift(const Eigen::VectorXcd& u);

// The quadratic-form expansion of the combined gain at lifted `u`.
double quadratic_gain(const ChannelSet& ch, const Eigen::VectorXcd& u, int k);

// Tangent under-estimator of quadratic_gain expanded at u_ref:
//   ||hD||^2 - u_ref^H A u_ref + 2 Re((V hD + A u_ref)^H u),  A = V V^H.
double linearized_gain_bound(const Eigen::VectorXcd& u,
                             const Eigen::VectorXcd& u_ref,
                             const ChannelSet& ch, int k);

struct InnerSolution {
  bool feasible = false;
  std::vector<double> offload_bits;
  Eigen::VectorXcd u;
  std::vector<double> surrogate_gain;  // eta_k: linearized gains at u
  double objective = 0.0;              // surrogate value including penalty
  convex::BarrierStatus status = convex::BarrierStatus::kNotStrictlyFeasible;
  std::string note;
};

// One convex surrogate with fixed powers `power_w`, expansion point `u_ref`
// (|u_ref| <= 1) and penalty weight `q`. K is limited to 8.
InnerSolution solve_inner(const SystemConfig& cfg, const ChannelSet& ch,
                          std::span<const double> power_w,
                          const Eigen::VectorXcd& u_ref, double q,
                          const convex::Tolerances& tol = convex::DefaultTolerances());

struct PhaseOptions {
  double q0_factor = 0.1;   // Q0 = q0_factor * energy swing / N
  double q_growth = 5.0;
  int max_rounds = 12;
  int max_sca = 50;
  double sca_tol = 1e-9;     // relative change that ends a round
  double completion = 1e-3;  // sum (1 - |u|^2) <= completion * N
};

struct ScaRecord {
  int round = 0;
  int iteration = 0;
  double q = 0.0;
  double objective = 0.0;  // energy + Q sum (1 - |u|^2) at true gains
  double penalty_residual = 0.0;
};

struct PhaseResult {
  bool feasible = true;
  bool converged = false;
  Allocation allocation;
  PhaseVector theta;
  EnergyBreakdown energy;
  double penalty_residual = 0.0;
  std::vector<ScaRecord> trace;
  std::string note;
};

// Penalty rounds of SCA iterations, then theta = -arg u and an
// exact re-solve of d (and the vertex decomposition) at the new gains.
PhaseResult solve_given_power(const SystemConfig& cfg, const ChannelSet& ch,
                              std::span<const double> power_w,
                              const PhaseVector& theta_init,
                              const PhaseOptions& options = {});

}  // namespace rismec::phase

#endif  // RISMEC_PHASE_OPT_H_
