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

// Small dense convex machinery used by the allocation solvers:
//  - minimize_box: projected gradient with Barzilai-Borwein trial steps and
//    Armijo backtracking for smooth convex objectives over a box;
//  - minimize_barrier: log-barrier interior point method with damped Newton
//    steps for smooth convex programs with inequality constraints;
//  - solve_lp: two-phase dense simplex (Bland's rule) for tiny LPs;
//  - kkt_residual: first-order diagnostics for box-constrained problems.

#ifndef RISMEC_CONVEX_H_
#define RISMEC_CONVEX_H_

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace rismec::convex {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Every solver tolerance in one place.
struct Tolerances {
  double box_stationarity = 1e-10;  // ||x - P(x - grad)||_inf
  int box_max_iter = 5000;
  double barrier_gap = 1e-10;       // m / t, relative to 1 + |objective|
  double newton_decrement = 1e-12;
  int barrier_max_newton = 400;
  double lp_feasibility = 1e-9;
  double lp_pivot = 1e-12;
};

const Tolerances& DefaultTolerances();

// value = f(x); when `grad` is non-null it receives the gradient.
using GradientFn = std::function<double(const VectorXd& x, VectorXd* grad)>;

struct BoxProblem {
  GradientFn objective;
  VectorXd lower;
  VectorXd upper;
};

struct BoxResult {
  VectorXd x;
  double value = 0.0;
  double stationarity = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // objective after each accepted step
};

VectorXd ProjectBox(const VectorXd& x, const VectorXd& lower,
                    const VectorXd& upper);

// Throws std::invalid_argument for mismatched sizes, non-finite or inverted
// bounds. `x0` is projected onto the box before the first step.
BoxResult minimize_box(const BoxProblem& problem, const VectorXd& x0,
                       double tol, int max_iter);

struct KktResidual {
  double stationarity = 0.0;     // ||grad - z_lower + z_upper||_inf
  double primal = 0.0;           // largest bound violation
  double complementarity = 0.0;  // max z_l (x - l), z_u (u - x)
  VectorXd lower_multipliers;
  VectorXd upper_multipliers;
};

struct BoundMultipliers {
  VectorXd lower;
  VectorXd upper;
};

// When `multipliers` is absent they are estimated from the gradient at the
// active bounds (|x - bound| <= active_tol * (1 + |bound|)).
KktResidual kkt_residual(const BoxProblem& problem, const VectorXd& x,
                         const std::optional<BoundMultipliers>& multipliers =
                             std::nullopt,
                         double active_tol = 1e-9);

// Smooth function evaluation with dense derivatives.
struct SmoothEval {
  double value = 0.0;
  VectorXd gradient;
  MatrixXd hessian;
};

// A block of `count` convex inequality constraints g_i(x) <= 0.
// `eval` fills values and the count x n Jacobian and returns false when x is
// outside the constraint's domain. `add_weighted_hessian` adds
// sum_i w_i * hess g_i(x) into `hessian`; it may be empty for affine blocks.
struct ConstraintBlock {
  int count = 0;
  std::function<bool(const VectorXd& x, VectorXd& values, MatrixXd& jacobian)>
      eval;
  std::function<void(const VectorXd& x, const VectorXd& weights,
                     MatrixXd& hessian)>
      add_weighted_hessian;
};

struct ConvexProgram {
  int dim = 0;
  // Returns false outside the objective's domain.
  std::function<bool(const VectorXd& x, SmoothEval& out)> objective;
  std::vector<ConstraintBlock> constraints;

  int num_constraints() const;
};

enum class BarrierStatus { kOptimal, kMaxIterations, kNotStrictlyFeasible };

struct BarrierResult {
  BarrierStatus status = BarrierStatus::kNotStrictlyFeasible;
  VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  double gap_bound = std::numeric_limits<double>::infinity();  // m / t
  int newton_steps = 0;
  VectorXd duals;  // one multiplier per constraint, block order
};

// Minimizes the objective subject to all constraint blocks starting from a
// strictly feasible `x0`.
BarrierResult minimize_barrier(const ConvexProgram& program,
                               const VectorXd& x0,
                               const Tolerances& tol = DefaultTolerances());

// Maximum constraint value over all blocks at x (+inf outside a domain).
double max_constraint_value(const ConvexProgram& program, const VectorXd& x);

// minimize cost.x  s.t.  a_ub x <= b_ub, a_eq x = b_eq, lower <= x <= upper.
// Lower bounds must be finite; upper bounds may be +inf.
struct LinearProgram {
  VectorXd cost;
  MatrixXd a_ub;
  VectorXd b_ub;
  MatrixXd a_eq;
  VectorXd b_eq;
  VectorXd lower;
  VectorXd upper;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  VectorXd x;
  double objective = 0.0;
};

// Never throws on degenerate data; malformed dimensions throw
// std::invalid_argument.
LpResult solve_lp(const LinearProgram& lp,
                  const Tolerances& tol = DefaultTolerances());

// Central finite-difference gradient, used to audit analytic gradients.
VectorXd FiniteDifferenceGradient(const GradientFn& f, const VectorXd& x,
                                  double step);

}  // namespace rismec::convex

#endif  // RISMEC_CONVEX_H_
