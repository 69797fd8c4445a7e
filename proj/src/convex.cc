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

#include "rismec/convex.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rismec::convex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-14;
constexpr double kMaxStep = 1e14;

void CheckBox(const VectorXd& lower, const VectorXd& upper, Eigen::Index n) {
  if (lower.size() != n || upper.size() != n) {
    throw std::invalid_argument("box bounds do not match the dimension");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) ||
        lower[i] > upper[i]) {
      throw std::invalid_argument("box bounds must be finite with lower <= upper");
    }
  }
}

}  // namespace

const Tolerances& DefaultTolerances() {
  static const Tolerances kDefaults;
  return kDefaults;
}

VectorXd ProjectBox(const VectorXd& x, const VectorXd& lower,
                    const VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

BoxResult minimize_box(const BoxProblem& problem, const VectorXd& x0,
                       double tol, int max_iter) {
  const Eigen::Index n = x0.size();
  CheckBox(problem.lower, problem.upper, n);
  BoxResult result;
  VectorXd x = ProjectBox(x0, problem.lower, problem.upper);
  VectorXd g(n);
  double f = problem.objective(x, &g);
  if (!std::isfinite(f)) {
    throw std::invalid_argument("objective is not finite at the start point");
  }
  double step = 1.0 / std::max(1.0, g.lpNorm<Eigen::Infinity>());
  VectorXd g_new(n);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    const VectorXd pg = x - ProjectBox(x - g, problem.lower, problem.upper);
    result.stationarity = pg.lpNorm<Eigen::Infinity>();
    if (result.stationarity <= tol) {
      result.converged = true;
      break;
    }
    bool accepted = false;
    VectorXd x_new;
    double f_new = kInf;
    for (int backtrack = 0; backtrack < 80; ++backtrack) {
      x_new = ProjectBox(x - step * g, problem.lower, problem.upper);
      f_new = problem.objective(x_new, &g_new);
      if (std::isfinite(f_new) && f_new <= f + kArmijo * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < kMinStep) break;
    }
    if (!accepted) break;
    const VectorXd s = x_new - x;
    const VectorXd y = g_new - g;
    x = x_new;
    f = f_new;
    g = g_new;
    result.trace.push_back(f);
    const double sy = s.dot(y);
    if (sy > 0.0) {
      step = std::clamp(s.squaredNorm() / sy, kMinStep, kMaxStep);
    } else {
      step = std::min(step * 4.0, kMaxStep);
    }
  }
  if (!result.converged) {
    const VectorXd pg = x - ProjectBox(x - g, problem.lower, problem.upper);
    result.stationarity = pg.lpNorm<Eigen::Infinity>();
    result.converged = result.stationarity <= tol;
  }
  result.x = x;
  result.value = f;
  result.iterations = iter;
  return result;
}

KktResidual kkt_residual(const BoxProblem& problem, const VectorXd& x,
                         const std::optional<BoundMultipliers>& multipliers,
                         double active_tol) {
  const Eigen::Index n = x.size();
  CheckBox(problem.lower, problem.upper, n);
  VectorXd g(n);
  problem.objective(x, &g);
  KktResidual out;
  out.lower_multipliers = VectorXd::Zero(n);
  out.upper_multipliers = VectorXd::Zero(n);
  if (multipliers) {
    if (multipliers->lower.size() != n || multipliers->upper.size() != n) {
      throw std::invalid_argument("multiplier size mismatch");
    }
    out.lower_multipliers = multipliers->lower;
    out.upper_multipliers = multipliers->upper;
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lo = problem.lower[i];
      const double hi = problem.upper[i];
      if (std::abs(x[i] - lo) <= active_tol * (1.0 + std::abs(lo))) {
        out.lower_multipliers[i] = std::max(g[i], 0.0);
      } else if (std::abs(hi - x[i]) <= active_tol * (1.0 + std::abs(hi))) {
        out.upper_multipliers[i] = std::max(-g[i], 0.0);
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = g[i] - out.lower_multipliers[i] + out.upper_multipliers[i];
    out.stationarity = std::max(out.stationarity, std::abs(r));
    out.primal = std::max({out.primal, problem.lower[i] - x[i],
                           x[i] - problem.upper[i]});
    out.complementarity = std::max(
        {out.complementarity,
         std::abs(out.lower_multipliers[i] * (x[i] - problem.lower[i])),
         std::abs(out.upper_multipliers[i] * (problem.upper[i] - x[i]))});
  }
  return out;
}

int ConvexProgram::num_constraints() const {
  int m = 0;
  for (const auto& block : constraints) m += block.count;
  return m;
}

namespace {

// Barrier function state at one point.
struct BarrierPoint {
  bool valid = false;
  double objective = 0.0;
  double phi = 0.0;
  VectorXd gradient;
  MatrixXd hessian;
  VectorXd constraint_values;
};

bool EvaluateConstraints(const ConvexProgram& program, const VectorXd& x,
                         VectorXd& values, MatrixXd& jacobian) {
  const int m = program.num_constraints();
  values.resize(m);
  jacobian.resize(m, program.dim);
  int offset = 0;
  VectorXd block_values;
  MatrixXd block_jacobian;
  for (const auto& block : program.constraints) {
    block_values.resize(block.count);
    block_jacobian.resize(block.count, program.dim);
    if (!block.eval(x, block_values, block_jacobian)) return false;
    values.segment(offset, block.count) = block_values;
    jacobian.middleRows(offset, block.count) = block_jacobian;
    offset += block.count;
  }
  return true;
}

// phi(x) = t f(x) - sum log(-g_i(x)); with_derivatives also fills the
// gradient and Hessian.
BarrierPoint EvaluateBarrier(const ConvexProgram& program, const VectorXd& x,
                             double t, bool with_derivatives) {
  BarrierPoint point;
  SmoothEval f;
  f.gradient.resize(program.dim);
  f.hessian.resize(program.dim, program.dim);
  if (!program.objective(x, f) || !std::isfinite(f.value)) return point;
  VectorXd values;
  MatrixXd jacobian;
  if (!EvaluateConstraints(program, x, values, jacobian)) return point;
  if (values.size() > 0 && !(values.maxCoeff() < 0.0)) return point;
  point.valid = true;
  point.objective = f.value;
  point.constraint_values = values;
  point.phi = t * f.value - (-values.array()).log().sum();
  if (!std::isfinite(point.phi)) {
    point.valid = false;
    return point;
  }
  if (!with_derivatives) return point;
  const VectorXd inv = (-values).cwiseInverse();
  point.gradient = t * f.gradient + jacobian.transpose() * inv;
  point.hessian = t * f.hessian +
                  jacobian.transpose() * inv.cwiseAbs2().asDiagonal() * jacobian;
  int offset = 0;
  for (const auto& block : program.constraints) {
    if (block.add_weighted_hessian) {
      block.add_weighted_hessian(x, inv.segment(offset, block.count),
                                 point.hessian);
    }
    offset += block.count;
  }
  return point;
}

}  // namespace

double max_constraint_value(const ConvexProgram& program, const VectorXd& x) {
  VectorXd values;
  MatrixXd jacobian;
  if (!EvaluateConstraints(program, x, values, jacobian)) return kInf;
  if (values.size() == 0) return -kInf;
  return values.maxCoeff();
}

BarrierResult minimize_barrier(const ConvexProgram& program,
                               const VectorXd& x0, const Tolerances& tol) {
  BarrierResult result;
  if (x0.size() != program.dim) {
    throw std::invalid_argument("start point does not match the dimension");
  }
  const int m = program.num_constraints();
  BarrierPoint start = EvaluateBarrier(program, x0, 1.0, false);
  result.x = x0;
  if (!start.valid) return result;

  VectorXd x = x0;
  double t = m > 0 ? 10.0 * m / (1.0 + std::abs(start.objective)) : 1.0;
  constexpr double kGrowth = 20.0;
  int newton = 0;
  bool done = false;
  while (!done) {
    // Centering.
    for (;;) {
      BarrierPoint point = EvaluateBarrier(program, x, t, true);
      if (!point.valid) break;
      Eigen::LDLT<MatrixXd> ldlt(point.hessian);
      VectorXd dx = ldlt.solve(-point.gradient);
      if (ldlt.info() != Eigen::Success || !dx.allFinite() ||
          point.gradient.dot(dx) >= 0.0) {
        const double reg =
            1e-12 * (1.0 + point.hessian.diagonal().cwiseAbs().maxCoeff());
        MatrixXd h = point.hessian;
        h.diagonal().array() += reg;
        dx = h.ldlt().solve(-point.gradient);
        if (!dx.allFinite() || point.gradient.dot(dx) >= 0.0) {
          dx = -point.gradient / (1.0 + point.gradient.norm());
        }
      }
      const double decrement = -point.gradient.dot(dx);
      if (decrement / 2.0 <= tol.newton_decrement) break;
      double s = 1.0;
      bool moved = false;
      while (s > 1e-20) {
        const VectorXd trial = x + s * dx;
        BarrierPoint next = EvaluateBarrier(program, trial, t, false);
        if (next.valid &&
            next.phi <= point.phi - 0.25 * s * decrement) {
          x = trial;
          moved = true;
          break;
        }
        s *= 0.5;
      }
      ++newton;
      if (!moved || newton >= tol.barrier_max_newton) break;
    }
    BarrierPoint here = EvaluateBarrier(program, x, t, false);
    result.value = here.objective;
    result.gap_bound = m / t;
    if (m == 0 || m / t <= tol.barrier_gap * (1.0 + std::abs(here.objective))) {
      result.status = BarrierStatus::kOptimal;
      done = true;
    } else if (newton >= tol.barrier_max_newton) {
      result.status = BarrierStatus::kMaxIterations;
      done = true;
    } else {
      t *= kGrowth;
    }
  }
  result.x = x;
  result.newton_steps = newton;
  VectorXd values;
  MatrixXd jacobian;
  EvaluateConstraints(program, x, values, jacobian);
  result.duals = (-t * values).cwiseInverse();
  return result;
}

namespace {

// Dense tableau simplex on  min c.y  s.t.  rows (y >= 0), with a given
// starting basis. Row r of `tab` holds [A | b]; the last row is the reduced
// cost row [c_bar | -z].
enum class PivotOutcome { kOptimal, kUnbounded, kStalled };

PivotOutcome RunSimplex(MatrixXd& tab, std::vector<int>& basis, int num_cols,
                        const std::vector<bool>& allowed, double pivot_tol) {
  const int rows = static_cast<int>(basis.size());
  const int rhs = num_cols;
  for (int iter = 0; iter < 100000; ++iter) {
    int enter = -1;
    for (int j = 0; j < num_cols; ++j) {
      if (allowed[j] && tab(rows, j) < -pivot_tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return PivotOutcome::kOptimal;
    int leave = -1;
    double best_ratio = kInf;
    for (int r = 0; r < rows; ++r) {
      const double a = tab(r, enter);
      if (a > pivot_tol) {
        const double ratio = tab(r, rhs) / a;
        if (ratio < best_ratio - 1e-15 ||
            (std::abs(ratio - best_ratio) <= 1e-15 && leave >= 0 &&
             basis[r] < basis[leave])) {
          best_ratio = ratio;
          leave = r;
        }
      }
    }
    if (leave < 0) return PivotOutcome::kUnbounded;
    tab.row(leave) /= tab(leave, enter);
    for (int r = 0; r <= rows; ++r) {
      if (r != leave && tab(r, enter) != 0.0) {
        tab.row(r) -= tab(r, enter) * tab.row(leave);
      }
    }
    basis[leave] = enter;
  }
  return PivotOutcome::kStalled;
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const Tolerances& tol) {
  const Eigen::Index n = lp.cost.size();
  const bool has_ub = lp.a_ub.size() > 0 || lp.b_ub.size() > 0;
  const bool has_eq = lp.a_eq.size() > 0 || lp.b_eq.size() > 0;
  if (lp.lower.size() != n || lp.upper.size() != n ||
      (has_ub && (lp.a_ub.cols() != n || lp.a_ub.rows() != lp.b_ub.size())) ||
      (has_eq && (lp.a_eq.cols() != n || lp.a_eq.rows() != lp.b_eq.size()))) {
    throw std::invalid_argument("linear program dimensions are inconsistent");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!std::isfinite(lp.lower[j])) {
      throw std::invalid_argument("linear program lower bounds must be finite");
    }
  }
  LpResult result;
  result.x = lp.lower;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (lp.upper[j] < lp.lower[j]) return result;  // empty box
  }

  // Collect rows over y = x - lower >= 0: (coefficients, rhs, is_equality).
  struct Row {
    VectorXd a;
    double b;
    bool eq;
  };
  std::vector<Row> rows;
  const Eigen::Index n_ub = has_ub ? lp.a_ub.rows() : 0;
  const Eigen::Index n_eq = has_eq ? lp.a_eq.rows() : 0;
  for (Eigen::Index i = 0; i < n_ub; ++i) {
    VectorXd a = lp.a_ub.row(i).transpose();
    rows.push_back({a, lp.b_ub[i] - a.dot(lp.lower), false});
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isfinite(lp.upper[j])) {
      VectorXd a = VectorXd::Zero(n);
      a[j] = 1.0;
      rows.push_back({a, lp.upper[j] - lp.lower[j], false});
    }
  }
  for (Eigen::Index i = 0; i < n_eq; ++i) {
    VectorXd a = lp.a_eq.row(i).transpose();
    rows.push_back({a, lp.b_eq[i] - a.dot(lp.lower), true});
  }
  const int m = static_cast<int>(rows.size());

  // Columns: structural y (n), one slack/surplus per inequality, one
  // artificial per row that lacks a natural basic column.
  int num_slack = 0;
  for (const Row& row : rows) num_slack += row.eq ? 0 : 1;
  std::vector<int> slack_col(m, -1), art_col(m, -1);
  int col = static_cast<int>(n);
  for (int r = 0; r < m; ++r) {
    if (!rows[r].eq) slack_col[r] = col++;
  }
  const int first_art = col;
  for (int r = 0; r < m; ++r) {
    const bool natural = !rows[r].eq && rows[r].b >= 0.0;
    if (!natural) art_col[r] = col++;
  }
  const int num_cols = col;
  MatrixXd tab = MatrixXd::Zero(m + 1, num_cols + 1);
  std::vector<int> basis(m);
  for (int r = 0; r < m; ++r) {
    const double sign = rows[r].b < 0.0 ? -1.0 : 1.0;
    tab.block(r, 0, 1, n) = sign * rows[r].a.transpose();
    if (slack_col[r] >= 0) tab(r, slack_col[r]) = sign;
    tab(r, num_cols) = sign * rows[r].b;
    if (art_col[r] >= 0) {
      tab(r, art_col[r]) = 1.0;
      basis[r] = art_col[r];
    } else {
      basis[r] = slack_col[r];
    }
  }

  // Phase 1: minimize the sum of artificials.
  std::vector<bool> allowed(num_cols, true);
  if (first_art < num_cols) {
    for (int r = 0; r < m; ++r) {
      if (art_col[r] >= 0) tab.row(m) -= tab.row(r);
    }
    for (int c = first_art; c < num_cols; ++c) tab(m, c) = 0.0;
    RunSimplex(tab, basis, num_cols, allowed, tol.lp_pivot);
    const double infeas = -tab(m, num_cols);
    if (infeas > tol.lp_feasibility * (1.0 + tab.col(num_cols).head(m).cwiseAbs().maxCoeff())) {
      return result;
    }
    // Drive remaining artificials out of the basis.
    for (int r = 0; r < m; ++r) {
      if (basis[r] < first_art) continue;
      int pivot = -1;
      for (int c = 0; c < first_art; ++c) {
        if (std::abs(tab(r, c)) > 1e-9) {
          pivot = c;
          break;
        }
      }
      if (pivot < 0) continue;  // redundant row; artificial stays at zero
      tab.row(r) /= tab(r, pivot);
      for (int q = 0; q <= m; ++q) {
        if (q != r && tab(q, pivot) != 0.0) tab.row(q) -= tab(q, pivot) * tab.row(r);
      }
      basis[r] = pivot;
    }
    for (int c = first_art; c < num_cols; ++c) allowed[c] = false;
  }

  // Phase 2 objective row.
  tab.row(m).setZero();
  tab.block(m, 0, 1, n) = lp.cost.transpose();
  for (int r = 0; r < m; ++r) {
    const int b = basis[r];
    if (b < n && lp.cost[b] != 0.0) tab.row(m) -= lp.cost[b] * tab.row(r);
  }
  const PivotOutcome outcome =
      RunSimplex(tab, basis, num_cols, allowed, tol.lp_pivot);
  if (outcome == PivotOutcome::kUnbounded) {
    result.status = LpStatus::kUnbounded;
    return result;
  }
  VectorXd y = VectorXd::Zero(n);
  for (int r = 0; r < m; ++r) {
    if (basis[r] < n) y[basis[r]] = std::max(tab(r, num_cols), 0.0);
  }
  result.x = ProjectBox(y + lp.lower, lp.lower,
                        lp.upper.cwiseMin(VectorXd::Constant(n, kInf)));
  for (Eigen::Index j = 0; j < n; ++j) {
    result.x[j] = std::min(result.x[j], lp.upper[j]);
  }
  result.objective = lp.cost.dot(result.x);
  result.status = LpStatus::kOptimal;
  return result;
}

VectorXd FiniteDifferenceGradient(const GradientFn& f, const VectorXd& x,
                                  double step) {
  VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    VectorXd hi = x, lo = x;
    hi[i] += step;
    lo[i] -= step;
    g[i] = (f(hi, nullptr) - f(lo, nullptr)) / (2.0 * step);
  }
  return g;
}

}  // namespace rismec::convex
