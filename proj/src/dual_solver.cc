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

#include "rismec/dual_solver.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rismec::dual {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530942;
// Exhaustive subset constraints stay affordable up to this many users.
constexpr int kMaxSubsetUsers = 12;
// A user that cannot move this fraction of its task is treated as silent.
constexpr double kNegligibleCapacity = 1e-9;

double MinOffload(const SystemConfig& cfg, int k) {
  const double excess =
      cfg.task_bits[k] * cfg.cycles_per_bit[k] - cfg.local_cpu_hz[k] * cfg.latency_s;
  return std::clamp(excess / cfg.cycles_per_bit[k], 0.0, cfg.task_bits[k]);
}

double LocalEnergy(const SystemConfig& cfg, int k, double d) {
  const double cycles = (cfg.task_bits[k] - d) * cfg.cycles_per_bit[k];
  return cfg.capacitance * cycles * cycles * cycles /
         (cfg.latency_s * cfg.latency_s);
}

double FullLocal(const SystemConfig& cfg) {
  double e = 0.0;
  for (int k = 0; k < cfg.num_users; ++k) e += LocalEnergy(cfg, k, 0.0);
  return e;
}

double PrimalEnergy(const SystemConfig& cfg, std::span<const double> d,
                    std::span<const double> p) {
  double e = 0.0;
  for (int k = 0; k < cfg.num_users; ++k) {
    e += LocalEnergy(cfg, k, d[k]) + cfg.latency_s * p[k];
  }
  return e;
}

void CheckGamma(const SystemConfig& cfg, std::span<const double> gamma) {
  if (static_cast<int>(gamma.size()) != cfg.num_users) {
    throw std::invalid_argument("one SNR coefficient per user is required");
  }
  for (double g : gamma) {
    if (!std::isfinite(g) || g < 0.0) {
      throw std::invalid_argument("SNR coefficients must be finite and >= 0");
    }
  }
}

// Builds the convex program over the free coordinates of (d / R, p / P).
class ActiveBranch {
 public:
  ActiveBranch(const SystemConfig& cfg, std::span<const double> gamma,
               std::vector<bool> hold_d, std::vector<double> d,
               std::vector<bool> hold_p, std::vector<double> p)
      : cfg_(cfg),
        gamma_(gamma.begin(), gamma.end()),
        hold_d_(std::move(hold_d)),
        hold_p_(std::move(hold_p)),
        d_(std::move(d)),
        p_(std::move(p)) {
    const int k_users = cfg.num_users;
    for (int k = 0; k < k_users; ++k) {
      lower_d_.push_back(MinOffload(cfg, k));
    }
    // Users who cannot move a meaningful share of their task stay silent.
    for (int k = 0; k < k_users; ++k) {
      const double max_power = hold_p_[k] ? p_[k] : cfg.max_power_w[k];
      const double capacity = cfg.latency_s * cfg.bandwidth_hz *
                              std::log2(1.0 + gamma_[k] * max_power);
      if (capacity < kNegligibleCapacity * cfg.task_bits[k]) {
        if ((hold_d_[k] && d_[k] > 0.0) || (!hold_d_[k] && lower_d_[k] > 0.0)) {
          infeasible_ = true;
        }
        hold_d_[k] = true;
        d_[k] = 0.0;
        if (!hold_p_[k]) {
          hold_p_[k] = true;
          p_[k] = 0.0;
        }
      } else if (!hold_d_[k] &&
                 lower_d_[k] >= cfg.task_bits[k] * (1.0 - 1e-12)) {
        hold_d_[k] = true;
        d_[k] = cfg.task_bits[k];
      }
    }
    for (int k = 0; k < k_users; ++k) {
      if (!hold_d_[k]) free_d_.push_back(k);
    }
    for (int k = 0; k < k_users; ++k) {
      if (!hold_p_[k]) free_p_.push_back(k);
    }
  }

  bool infeasible() const { return infeasible_; }
  int dim() const { return static_cast<int>(free_d_.size() + free_p_.size()); }

  void Unpack(const VectorXd& x, std::vector<double>& d,
              std::vector<double>& p) const {
    d = d_;
    p = p_;
    int i = 0;
    for (int k : free_d_) d[k] = cfg_.task_bits[k] * x[i++];
    for (int k : free_p_) p[k] = cfg_.max_power_w[k] * x[i++];
  }

  std::optional<PrimalPoint> Solve(const convex::Tolerances& tol) {
    if (infeasible_) return std::nullopt;
    const int k_users = cfg_.num_users;
    if (k_users > kMaxSubsetUsers) return std::nullopt;
    if (dim() == 0) {
      if (!ConstantFeasible()) return std::nullopt;
      return Point(VectorXd());
    }
    convex::ConvexProgram program = Build();
    if (!constant_ok_) return std::nullopt;
    VectorXd x0(dim());
    bool found = false;
    for (double s = 0.5; s > 1e-15; s *= 0.5) {
      int i = 0;
      for (int k : free_d_) {
        const double lo = lower_d_[k] / cfg_.task_bits[k];
        x0[i++] = lo + s * (1.0 - lo);
      }
      for (std::size_t j = 0; j < free_p_.size(); ++j) x0[i++] = 1.0 - 1e-3;
      if (max_constraint_value(program, x0) < 0.0) {
        found = true;
        break;
      }
      if (free_d_.empty()) break;
    }
    if (!found) return std::nullopt;
    const convex::BarrierResult res = convex::minimize_barrier(program, x0, tol);
    if (res.status == convex::BarrierStatus::kNotStrictlyFeasible) {
      return std::nullopt;
    }
    return Point(res.x);
  }

 private:
  PrimalPoint Point(const VectorXd& x) const {
    PrimalPoint out;
    Unpack(x, out.offload_bits, out.power_w);
    out.energy = PrimalEnergy(cfg_, out.offload_bits, out.power_w);
    return out;
  }

  // Subset constraints without free coordinates must already hold.
  bool ConstantFeasible() const {
    const int k_users = cfg_.num_users;
    const double scale = cfg_.latency_s * cfg_.bandwidth_hz;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k_users); ++mask) {
      double bits = 0.0, snr = 0.0;
      for (int k = 0; k < k_users; ++k) {
        if (mask & (std::uint64_t{1} << k)) {
          bits += d_[k];
          snr += gamma_[k] * p_[k];
        }
      }
      if (bits / scale - std::log2(1.0 + snr) > 1e-12) return false;
    }
    double cycles = 0.0;
    for (int k = 0; k < k_users; ++k) cycles += d_[k] * cfg_.cycles_per_bit[k];
    return cycles <= cfg_.edge_cpu_hz * (1.0 + 1e-12);
  }

  convex::ConvexProgram Build() {
    const int k_users = cfg_.num_users;
    const int n = dim();
    const int nd = static_cast<int>(free_d_.size());
    convex::ConvexProgram program;
    program.dim = n;
    program.objective = [this, nd](const VectorXd& x, convex::SmoothEval& out) {
      std::vector<double> d, p;
      Unpack(x, d, p);
      out.value = PrimalEnergy(cfg_, d, p);
      out.gradient.setZero();
      out.hessian.setZero();
      const double t2 = cfg_.latency_s * cfg_.latency_s;
      for (int i = 0; i < nd; ++i) {
        const int k = free_d_[i];
        const double r = cfg_.task_bits[k];
        const double c3 = std::pow(cfg_.cycles_per_bit[k], 3);
        const double rest = r - d[k];
        if (rest < 0.0) return false;
        out.gradient[i] = -3.0 * cfg_.capacitance * c3 * rest * rest * r / t2;
        out.hessian(i, i) = 6.0 * cfg_.capacitance * c3 * rest * r * r / t2;
      }
      for (std::size_t j = 0; j < free_p_.size(); ++j) {
        out.gradient[nd + j] = cfg_.latency_s * cfg_.max_power_w[free_p_[j]];
      }
      return true;
    };

    // Box constraints on every free coordinate.
    convex::ConstraintBlock box;
    box.count = 2 * n;
    box.eval = [this, n, nd](const VectorXd& x, VectorXd& v, MatrixXd& jac) {
      jac.setZero();
      for (int i = 0; i < n; ++i) {
        const double lo =
            i < nd ? lower_d_[free_d_[i]] / cfg_.task_bits[free_d_[i]] : 0.0;
        v[2 * i] = lo - x[i];
        jac(2 * i, i) = -1.0;
        v[2 * i + 1] = x[i] - 1.0;
        jac(2 * i + 1, i) = 1.0;
      }
      return true;
    };
    program.constraints.push_back(box);

    if (nd > 0) {
      convex::ConstraintBlock edge;
      edge.count = 1;
      edge.eval = [this, nd](const VectorXd& x, VectorXd& v, MatrixXd& jac) {
        std::vector<double> d, p;
        Unpack(x, d, p);
        double cycles = 0.0;
        for (int k = 0; k < cfg_.num_users; ++k) cycles += d[k] * cfg_.cycles_per_bit[k];
        v[0] = (cycles - cfg_.edge_cpu_hz) / cfg_.edge_cpu_hz;
        jac.setZero();
        for (int i = 0; i < nd; ++i) {
          const int k = free_d_[i];
          jac(0, i) = cfg_.task_bits[k] * cfg_.cycles_per_bit[k] / cfg_.edge_cpu_hz;
        }
        return true;
      };
      program.constraints.push_back(edge);
    }

    // Rate-region constraints: sum_S d / (T B) <= log2(1 + sum_S gamma p).
    constant_ok_ = true;
    masks_.clear();
    std::vector<int> var_of_d(k_users, -1), var_of_p(k_users, -1);
    for (int i = 0; i < nd; ++i) var_of_d[free_d_[i]] = i;
    for (std::size_t j = 0; j < free_p_.size(); ++j) var_of_p[free_p_[j]] = nd + j;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k_users); ++mask) {
      bool has_free = false;
      for (int k = 0; k < k_users; ++k) {
        if ((mask & (std::uint64_t{1} << k)) && (var_of_d[k] >= 0 || var_of_p[k] >= 0)) {
          has_free = true;
        }
      }
      if (has_free) masks_.push_back(mask);
    }
    if (!ConstantSubsetsHold(var_of_d, var_of_p)) constant_ok_ = false;
    var_of_d_ = var_of_d;
    var_of_p_ = var_of_p;
    convex::ConstraintBlock region;
    region.count = static_cast<int>(masks_.size());
    region.eval = [this](const VectorXd& x, VectorXd& v, MatrixXd& jac) {
      std::vector<double> d, p;
      Unpack(x, d, p);
      jac.setZero();
      const double scale = cfg_.latency_s * cfg_.bandwidth_hz;
      for (std::size_t s = 0; s < masks_.size(); ++s) {
        double bits = 0.0, snr = 0.0;
        for (int k = 0; k < cfg_.num_users; ++k) {
          if (masks_[s] & (std::uint64_t{1} << k)) {
            bits += d[k];
            snr += gamma_[k] * p[k];
          }
        }
        if (!(1.0 + snr > 0.0)) return false;
        v[s] = bits / scale - std::log2(1.0 + snr);
        for (int k = 0; k < cfg_.num_users; ++k) {
          if (!(masks_[s] & (std::uint64_t{1} << k))) continue;
          if (var_of_d_[k] >= 0) jac(s, var_of_d_[k]) = cfg_.task_bits[k] / scale;
          if (var_of_p_[k] >= 0) {
            jac(s, var_of_p_[k]) =
                -gamma_[k] * cfg_.max_power_w[k] / ((1.0 + snr) * kLn2);
          }
        }
      }
      return true;
    };
    region.add_weighted_hessian = [this](const VectorXd& x, const VectorXd& w,
                                         MatrixXd& hess) {
      std::vector<double> d, p;
      Unpack(x, d, p);
      VectorXd a(hess.rows());
      for (std::size_t s = 0; s < masks_.size(); ++s) {
        double snr = 0.0;
        a.setZero();
        for (int k = 0; k < cfg_.num_users; ++k) {
          if (!(masks_[s] & (std::uint64_t{1} << k))) continue;
          snr += gamma_[k] * p[k];
          if (var_of_p_[k] >= 0) a[var_of_p_[k]] = gamma_[k] * cfg_.max_power_w[k];
        }
        hess.noalias() += (w[s] / ((1.0 + snr) * (1.0 + snr) * kLn2)) * a * a.transpose();
      }
    };
    program.constraints.push_back(region);
    return program;
  }

  bool ConstantSubsetsHold(const std::vector<int>& var_of_d,
                           const std::vector<int>& var_of_p) const {
    const int k_users = cfg_.num_users;
    const double scale = cfg_.latency_s * cfg_.bandwidth_hz;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k_users); ++mask) {
      double bits = 0.0, snr = 0.0;
      bool has_free = false;
      for (int k = 0; k < k_users; ++k) {
        if (!(mask & (std::uint64_t{1} << k))) continue;
        if (var_of_d[k] >= 0 || var_of_p[k] >= 0) has_free = true;
        bits += d_[k];
        snr += gamma_[k] * p_[k];
      }
      if (!has_free && bits / scale - std::log2(1.0 + snr) > 1e-12) return false;
    }
    return true;
  }

  const SystemConfig& cfg_;
  std::vector<double> gamma_;
  std::vector<bool> hold_d_, hold_p_;
  std::vector<double> d_, p_;
  std::vector<double> lower_d_;
  std::vector<int> free_d_, free_p_;
  std::vector<std::uint64_t> masks_;
  std::vector<int> var_of_d_, var_of_p_;
  bool infeasible_ = false;
  bool constant_ok_ = true;
};

// Fits `d` under the edge capacity by shrinking towards D.
void FitEdgeCapacity(const SystemConfig& cfg, std::span<const double> lower,
                     std::vector<double>& d) {
  double cycles = 0.0, base = 0.0;
  for (int k = 0; k < cfg.num_users; ++k) {
    cycles += d[k] * cfg.cycles_per_bit[k];
    base += lower[k] * cfg.cycles_per_bit[k];
  }
  if (cycles <= cfg.edge_cpu_hz || cycles <= base) return;
  const double s = std::max(0.0, (cfg.edge_cpu_hz - base) / (cycles - base));
  for (int k = 0; k < cfg.num_users; ++k) d[k] = lower[k] + s * (d[k] - lower[k]);
}

bool WithinPower(const SystemConfig& cfg, std::span<const double> p) {
  for (int k = 0; k < cfg.num_users; ++k) {
    if (!(p[k] <= cfg.max_power_w[k])) return false;
  }
  return true;
}

// Power inversion at `order` with d shrunk towards D until the caps hold.
std::optional<PrimalPoint> RecoverByInversion(const SystemConfig& cfg,
                                              std::span<const double> gamma,
                                              std::span<const double> lower,
                                              std::vector<double> d,
                                              std::span<const int> order) {
  FitEdgeCapacity(cfg, lower, d);
  auto at = [&](double s) {
    std::vector<double> ds(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) ds[k] = lower[k] + s * (d[k] - lower[k]);
    return ds;
  };
  auto power_at = [&](const std::vector<double>& ds) {
    return invert_vertex_power(gamma, ds, order, cfg.latency_s, cfg.bandwidth_hz);
  };
  std::vector<double> ds = d;
  std::vector<double> p = power_at(ds);
  if (!WithinPower(cfg, p)) {
    if (!WithinPower(cfg, power_at(at(0.0)))) return std::nullopt;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (WithinPower(cfg, power_at(at(mid))) ? lo : hi) = mid;
    }
    ds = at(lo);
    p = power_at(ds);
  }
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::max(p[k], 0.0);
  PrimalPoint out{ds, p, PrimalEnergy(cfg, ds, p)};
  return out;
}

}  // namespace

double optimal_d(double lambda, double mu_k, const SystemConfig& cfg, int k) {
  if (k < 0 || k >= cfg.num_users) throw std::invalid_argument("bad user index");
  const double c = cfg.cycles_per_bit[k];
  const double price = std::max(lambda * c + mu_k, 0.0);
  const double d = cfg.task_bits[k] -
                   std::sqrt(price / (3.0 * cfg.capacitance * c)) * cfg.latency_s / c;
  return std::clamp(d, MinOffload(cfg, k), cfg.task_bits[k]);
}

double choose_t(const BranchCandidates& candidates, double latency_s) {
  if (!candidates.idle && !candidates.active) {
    throw std::domain_error("neither transmission-time branch is feasible");
  }
  if (!candidates.active) return 0.0;
  if (!candidates.idle) return latency_s;
  return *candidates.active < *candidates.idle ? latency_s : 0.0;
}

PowerSolution power_subproblem(std::span<const double> mu,
                               std::span<const int> order,
                               std::span<const double> gamma,
                               const SystemConfig& cfg,
                               std::span<const double> warm_start) {
  const int k_users = cfg.num_users;
  if (static_cast<int>(mu.size()) != k_users ||
      static_cast<int>(order.size()) != k_users ||
      static_cast<int>(gamma.size()) != k_users) {
    throw std::invalid_argument("power subproblem size mismatch");
  }
  std::vector<double> coef(k_users);
  for (int j = 0; j < k_users; ++j) {
    const double next = j + 1 < k_users ? mu[order[j + 1]] : 0.0;
    coef[j] = std::max(mu[order[j]] - next, 0.0);
  }
  const double t = cfg.latency_s;
  const double b = cfg.bandwidth_hz;
  const std::vector<int> perm(order.begin(), order.end());
  const std::vector<double> g(gamma.begin(), gamma.end());
  auto objective = [&, perm, g, coef](const VectorXd& p, VectorXd* grad) {
    double value = t * p.sum();
    double snr = 0.0;
    std::vector<double> inv(k_users);
    for (int j = 0; j < k_users; ++j) {
      snr += g[perm[j]] * p[perm[j]];
      value -= t * coef[j] * b * std::log2(1.0 + snr);
      inv[j] = coef[j] / (1.0 + snr);
    }
    if (grad) {
      double tail = 0.0;
      for (int j = k_users - 1; j >= 0; --j) {
        tail += inv[j];
        (*grad)[perm[j]] = t - t * b * g[perm[j]] * tail / kLn2;
      }
    }
    return value;
  };
  convex::BoxProblem problem;
  problem.objective = objective;
  problem.lower = VectorXd::Zero(k_users);
  problem.upper = Eigen::Map<const VectorXd>(cfg.max_power_w.data(), k_users);
  VectorXd x0(k_users);
  if (static_cast<int>(warm_start.size()) == k_users) {
    for (int k = 0; k < k_users; ++k) x0[k] = warm_start[k];
  } else {
    for (int k = 0; k < k_users; ++k) {
      x0[k] = gamma[k] > 0.0 ? mu[k] * b / kLn2 - 1.0 / gamma[k] : 0.0;
    }
  }
  const convex::BoxResult res =
      convex::minimize_box(problem, x0, 1e-10 * std::max(t, 1e-3), 5000);
  PowerSolution out;
  out.power.assign(res.x.data(), res.x.data() + k_users);
  out.value = res.value;
  out.stationarity = res.stationarity;
  out.converged = res.converged;
  VectorXd grad(k_users);
  objective(res.x, &grad);
  double bound = res.value;
  for (int k = 0; k < k_users; ++k) {
    bound += std::min(grad[k] * (0.0 - res.x[k]),
                      grad[k] * (problem.upper[k] - res.x[k]));
  }
  out.lower_bound = std::min(bound, res.value);
  return out;
}

DualState update_duals(const DualState& state, const Allocation& alloc,
                       const SystemConfig& cfg, const StepSizes& steps) {
  const int k_users = cfg.num_users;
  DualState next = state;
  double cycles = 0.0;
  for (int k = 0; k < k_users; ++k) cycles += alloc.offload_bits[k] * cfg.cycles_per_bit[k];
  next.lambda = std::max(0.0, state.lambda + steps.lambda * (cycles - cfg.edge_cpu_hz));
  next.mu.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    const double residual =
        alloc.offload_bits[k] - alloc.tx_time_s * alloc.rate_bps[k];
    next.mu[k] = std::max(0.0, state.mu[k] + steps.mu[k] * residual);
  }
  next.iteration = state.iteration + 1;
  return next;
}

std::vector<double> invert_vertex_power(std::span<const double> gamma,
                                        std::span<const double> bits,
                                        std::span<const int> order,
                                        double tx_time_s, double bandwidth_hz) {
  std::vector<double> p(gamma.size(), 0.0);
  double prev = 1.0;
  double cumulative = 0.0;
  for (int user : order) {
    cumulative += bits[user] / tx_time_s;
    const double level = std::exp2(cumulative / bandwidth_hz);
    const double snr = level - prev;
    prev = level;
    if (snr <= 0.0) {
      p[user] = 0.0;
    } else {
      p[user] = gamma[user] > 0.0 ? snr / gamma[user] : kInf;
    }
  }
  return p;
}

std::optional<PrimalPoint> solve_active_branch(
    const SystemConfig& cfg, std::span<const double> gamma,
    const std::vector<bool>& hold_d, std::span<const double> fixed_d,
    const std::vector<bool>& hold_p, std::span<const double> fixed_p,
    const convex::Tolerances& tol) {
  cfg.Validate();
  CheckGamma(cfg, gamma);
  const std::size_t k_users = static_cast<std::size_t>(cfg.num_users);
  if (hold_d.size() != k_users || hold_p.size() != k_users ||
      fixed_d.size() != k_users || fixed_p.size() != k_users) {
    throw std::invalid_argument("mask sizes must match the user count");
  }
  ActiveBranch branch(cfg, gamma, hold_d,
                      std::vector<double>(fixed_d.begin(), fixed_d.end()), hold_p,
                      std::vector<double>(fixed_p.begin(), fixed_p.end()));
  return branch.Solve(tol);
}

std::optional<PrimalPoint> optimal_offload_for_power(
    const SystemConfig& cfg, std::span<const double> gamma,
    std::span<const double> power) {
  const std::size_t k_users = static_cast<std::size_t>(cfg.num_users);
  const std::vector<double> zeros(k_users, 0.0);
  return solve_active_branch(cfg, gamma, std::vector<bool>(k_users, false), zeros,
                             std::vector<bool>(k_users, true), power);
}

std::optional<PrimalPoint> min_power_for_offload(const SystemConfig& cfg,
                                                 std::span<const double> gamma,
                                                 std::span<const double> bits) {
  const std::size_t k_users = static_cast<std::size_t>(cfg.num_users);
  const std::vector<double> zeros(k_users, 0.0);
  return solve_active_branch(cfg, gamma, std::vector<bool>(k_users, true), bits,
                             std::vector<bool>(k_users, false), zeros);
}

std::vector<TimeSlot> decompose_into_slots(const noma::RateRegion& region,
                                           std::span<const double> bits,
                                           double tx_time_s,
                                           const noma::DecodingOrder& order) {
  const int k_users = region.num_users();
  std::vector<std::vector<std::vector<int>>> candidates;
  candidates.push_back(noma::tie_group_rotations(order));
  if (!order.tie_groups.empty()) {
    candidates.push_back(noma::tie_group_permutations(order));
  }
  if (k_users <= 6) {
    std::vector<int> perm(k_users);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> all;
    do {
      all.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    candidates.push_back(std::move(all));
  }
  for (const auto& orders : candidates) {
    std::vector<std::vector<double>> vertices;
    for (const auto& o : orders) vertices.push_back(noma::vertex_rates(region, o));
    const noma::TimeSharingResult ts = noma::time_sharing(bits, tx_time_s, vertices);
    if (ts.status != noma::TimeSharingStatus::kFeasible) continue;
    std::vector<TimeSlot> slots;
    for (std::size_t j = 0; j < orders.size(); ++j) {
      if (ts.durations[j] > 1e-15 * std::max(tx_time_s, 1e-300)) {
        slots.push_back({ts.durations[j], orders[j], vertices[j]});
      }
    }
    return slots;
  }
  return {};
}

SolveReport solve_given_phases(const SystemConfig& cfg,
                               std::span<const double> gamma,
                               const DualOptions& options) {
  cfg.Validate();
  CheckGamma(cfg, gamma);
  const int k_users = cfg.num_users;
  const double t_max = cfg.latency_s;
  SolveReport report;

  std::vector<double> lower(k_users);
  for (int k = 0; k < k_users; ++k) {
    lower[k] = options.force_full_offload ? cfg.task_bits[k] : MinOffload(cfg, k);
  }
  const bool idle_ok =
      !options.force_full_offload &&
      std::all_of(lower.begin(), lower.end(), [](double v) { return v <= 0.0; });
  const std::optional<double> idle =
      idle_ok ? std::optional<double>(FullLocal(cfg)) : std::nullopt;

  // Interior-point solution of the convex active branch.
  std::vector<bool> hold(k_users, options.force_full_offload);
  std::optional<PrimalPoint> best = solve_active_branch(
      cfg, gamma, hold, lower, std::vector<bool>(k_users, false),
      std::vector<double>(k_users, 0.0), options.tolerances);
  double upper = best ? best->energy : kInf;
  if (idle) upper = std::min(upper, *idle);

  DualState state;
  state.mu.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    const double span = (cfg.task_bits[k] - (options.force_full_offload ? 0.0 : lower[k])) / 2.0;
    const double c = cfg.cycles_per_bit[k];
    state.mu[k] = 3.0 * cfg.capacitance * c * c * c * span * span / (t_max * t_max);
  }
  state.step_scale = options.step_scale;

  double best_dual = -kInf;
  std::vector<double> warm;
  Allocation iterate = Allocation::FullLocal(k_users);
  iterate.tx_time_s = t_max;
  bool converged = false;
  int it = 0;
  for (; it < options.max_iter; ++it) {
    const noma::DecodingOrder order = noma::optimal_order(state.mu);
    const PowerSolution power =
        power_subproblem(state.mu, order.perm, gamma, cfg, warm);
    warm = power.power;
    const noma::RateRegion region =
        noma::RateRegion::FromPower(gamma, power.power, cfg.bandwidth_hz);
    iterate.rate_bps = noma::vertex_rates(region, order.perm);
    iterate.power_w = power.power;
    double dual_value = -state.lambda * cfg.edge_cpu_hz + std::min(0.0, power.lower_bound);
    for (int k = 0; k < k_users; ++k) {
      const double d = options.force_full_offload
                           ? cfg.task_bits[k]
                           : optimal_d(state.lambda, state.mu[k], cfg, k);
      iterate.offload_bits[k] = d;
      dual_value += LocalEnergy(cfg, k, d) +
                    (state.lambda * cfg.cycles_per_bit[k] + state.mu[k]) * d;
    }
    if (dual_value > best_dual) {
      best_dual = dual_value;
      state.stall = 0;
    } else {
      ++state.stall;
    }

    // Cheap recovery at the current vertex order.
    if (auto rec = RecoverByInversion(cfg, gamma, lower, iterate.offload_bits,
                                      order.perm)) {
      if (rec->energy < upper) {
        upper = rec->energy;
        if (!best || rec->energy < best->energy) best = rec;
      }
    }
    report.dual_trace.push_back(dual_value);
    report.primal_trace.push_back(upper);
    if (upper - best_dual <= options.gap_tol * std::abs(upper)) {
      converged = true;
      ++it;
      break;
    }

    // Subgradient in coordinates scaled by F and R_k.
    double cycles = 0.0;
    for (int k = 0; k < k_users; ++k) cycles += iterate.offload_bits[k] * cfg.cycles_per_bit[k];
    const double s_lambda = cycles - cfg.edge_cpu_hz;
    std::vector<double> s_mu(k_users);
    double norm2 = 0.0;
    if (state.lambda > 0.0 || s_lambda > 0.0) {
      norm2 += std::pow(s_lambda / cfg.edge_cpu_hz, 2);
    }
    for (int k = 0; k < k_users; ++k) {
      s_mu[k] = iterate.offload_bits[k] - t_max * iterate.rate_bps[k];
      if (state.mu[k] > 0.0 || s_mu[k] > 0.0) {
        norm2 += std::pow(s_mu[k] / cfg.task_bits[k], 2);
      }
    }
    if (norm2 <= 0.0) break;  // dual optimum reached
    double length;
    if (options.step_rule == StepRule::kPolyak) {
      if (state.stall >= 30) {
        state.step_scale = std::max(state.step_scale * 0.5, 1e-3);
        state.stall = 0;
      }
      const double target = std::isfinite(upper) ? upper : best_dual + 1.0;
      length = state.step_scale * std::max(target - dual_value, 0.0) / norm2;
    } else {
      const double scale = std::isfinite(upper) ? std::abs(upper) : 1.0;
      length = options.step_scale * scale /
               (1.0 + options.step_decay * it) / std::sqrt(norm2);
    }
    StepSizes steps;
    steps.lambda = length / (cfg.edge_cpu_hz * cfg.edge_cpu_hz);
    steps.mu.resize(k_users);
    for (int k = 0; k < k_users; ++k) {
      steps.mu[k] = length / (cfg.task_bits[k] * cfg.task_bits[k]);
    }
    const double kept_scale = state.step_scale;
    const int kept_stall = state.stall;
    state = update_duals(state, iterate, cfg, steps);
    state.step_scale = kept_scale;
    state.stall = kept_stall;
  }
  report.iterations = it;
  report.best_dual = best_dual;
  report.duals = state;

  const std::optional<double> active =
      best ? std::optional<double>(best->energy) : std::nullopt;
  if (!idle && !active) {
    report.feasible = false;
    report.converged = false;
    report.allocation = Allocation::FullLocal(k_users);
    report.allocation.offload_bits = lower;
    report.energy.total = kInf;
    report.gap = kInf;
    report.note = "infeasible: the minimum offload cannot be delivered";
    return report;
  }
  const double t = choose_t({idle, active}, t_max);
  Allocation alloc = Allocation::FullLocal(k_users);
  if (t > 0.0) {
    alloc.tx_time_s = t;
    alloc.offload_bits = best->offload_bits;
    alloc.power_w = best->power_w;
    for (int k = 0; k < k_users; ++k) alloc.rate_bps[k] = alloc.offload_bits[k] / t;
    const noma::DecodingOrder order = noma::optimal_order(state.mu);
    alloc.order = order.perm;
    const noma::RateRegion region =
        noma::RateRegion::FromPower(gamma, alloc.power_w, cfg.bandwidth_hz);
    alloc.slots = decompose_into_slots(region, alloc.offload_bits, t, order);
    if (alloc.slots.empty() &&
        std::any_of(alloc.offload_bits.begin(), alloc.offload_bits.end(),
                    [](double d) { return d > 0.0; })) {
      report.note = "no vertex decomposition found; rates are a region point";
    }
  }
  report.allocation = std::move(alloc);
  report.energy = total_energy(report.allocation, cfg);
  const double primal = report.energy.total;
  report.gap = primal > 0.0 ? (primal - best_dual) / primal : primal - best_dual;
  report.converged = converged || report.gap <= options.gap_tol;
  return report;
}

}  // namespace rismec::dual
