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

#include "rismec/phase_opt.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "rismec/dual_solver.h"
#include "rismec/noma.h"

namespace rismec::phase {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr double kLn2 = 0.69314718055994530942;
constexpr int kMaxUsers = 8;

double MinOffload(const SystemConfig& cfg, int k) {
  const double excess =
      cfg.task_bits[k] * cfg.cycles_per_bit[k] - cfg.local_cpu_hz[k] * cfg.latency_s;
  return std::clamp(excess / cfg.cycles_per_bit[k], 0.0, cfg.task_bits[k]);
}

double LocalEnergy(const SystemConfig& cfg, int k, double d) {
  const double cycles = (cfg.task_bits[k] - d) * cfg.cycles_per_bit[k];
  return cfg.capacitance * cycles * cycles * cycles / (cfg.latency_s * cfg.latency_s);
}

double Energy(const SystemConfig& cfg, std::span<const double> d,
              std::span<const double> p) {
  double e = 0.0;
  for (int k = 0; k < cfg.num_users; ++k) {
    e += LocalEnergy(cfg, k, d[k]) + cfg.latency_s * p[k];
  }
  return e;
}

double PenaltyResidual(const VectorXcd& u) {
  return (1.0 - u.array().abs2()).sum();
}

// Extreme per-watt SNRs any phase vector can reach: (|h_d| -/+ sum_n |v_n|)^2.
void GainEnvelope(const ChannelSet& ch, double noise_w, std::vector<double>& lo,
                  std::vector<double>& hi) {
  const int k_users = static_cast<int>(ch.direct.size());
  lo.assign(k_users, 0.0);
  hi.assign(k_users, 0.0);
  for (int k = 0; k < k_users; ++k) {
    const double direct = ch.direct[k].norm();
    const double reflect = cascade_matrix(ch, k).rowwise().norm().sum();
    const double low = std::max(direct - reflect, 0.0);
    lo[k] = low * low / noise_w;
    hi[k] = (direct + reflect) * (direct + reflect) / noise_w;
  }
}

// Affine surrogate gain L_k(u) = c_k + 2 Re(b_k^H u).
struct AffineGain {
  double constant = 0.0;
  VectorXcd b;
};

AffineGain Linearize(const ChannelSet& ch, const VectorXcd& u_ref, int k) {
  const MatrixXcd v = cascade_matrix(ch, k);
  const VectorXcd& hd = ch.direct[k];
  const VectorXcd a_u = v * (v.adjoint() * u_ref);
  AffineGain out;
  out.b = v * hd + a_u;
  out.constant = hd.squaredNorm() - u_ref.dot(a_u).real();
  return out;
}

void CheckSizes(const SystemConfig& cfg, const ChannelSet& ch,
                std::span<const double> power) {
  if (ch.num_users() != cfg.num_users ||
      static_cast<int>(power.size()) != cfg.num_users) {
    throw std::invalid_argument("channel, power and config sizes disagree");
  }
}

}  // namespace

MatrixXcd cascade_matrix(const ChannelSet& ch, int k) {
  if (k < 0 || k >= ch.num_users()) throw std::invalid_argument("bad user index");
  if (ch.reflect[k].size() != ch.bs_ris.rows()) {
    throw std::invalid_argument("RIS link length differs from G's rows");
  }
  return ch.reflect[k].conjugate().asDiagonal() * ch.bs_ris;
}

VectorXcd lift(const PhaseVector& phases) { return phases.unit().conjugate(); }

PhaseVector unlift(const VectorXcd& u) {
  VectorXd angles(u.size());
  for (Eigen::Index n = 0; n < u.size(); ++n) angles[n] = -std::arg(u[n]);
  return PhaseVector::FromAngles(angles);
}

double quadratic_gain(const ChannelSet& ch, const VectorXcd& u, int k) {
  const MatrixXcd v = cascade_matrix(ch, k);
  if (u.size() != v.rows()) throw std::invalid_argument("u has the wrong length");
  const VectorXcd& hd = ch.direct[k];
  const VectorXcd vh = v * hd;
  const VectorXcd vu = v.adjoint() * u;
  return hd.squaredNorm() + 2.0 * u.dot(vh).real() + vu.squaredNorm();
}

double linearized_gain_bound(const VectorXcd& u, const VectorXcd& u_ref,
                             const ChannelSet& ch, int k) {
  if (u.size() != u_ref.size()) throw std::invalid_argument("u and u_ref differ");
  const AffineGain lin = Linearize(ch, u_ref, k);
  return lin.constant + 2.0 * lin.b.dot(u).real();
}

InnerSolution solve_inner(const SystemConfig& cfg, const ChannelSet& ch,
                          std::span<const double> power_w,
                          const VectorXcd& u_ref, double q,
                          const convex::Tolerances& tol) {
  cfg.Validate();
  CheckSizes(cfg, ch, power_w);
  const int k_users = cfg.num_users;
  const int n = ch.num_elements();
  if (k_users > kMaxUsers) throw std::invalid_argument("phase solver supports K <= 8");
  if (u_ref.size() != n) throw std::invalid_argument("u_ref has the wrong length");
  InnerSolution out;

  std::vector<AffineGain> gains(k_users);
  for (int k = 0; k < k_users; ++k) gains[k] = Linearize(ch, u_ref, k);
  std::vector<double> p(power_w.begin(), power_w.end());
  std::vector<double> lower(k_users), d_fixed(k_users, 0.0);
  std::vector<int> free_d, var_of_d(k_users, -1);
  for (int k = 0; k < k_users; ++k) {
    lower[k] = MinOffload(cfg, k);
    if (p[k] <= 0.0) {
      if (lower[k] > 0.0) {
        out.note = "a user with zero power must offload";
        return out;
      }
      d_fixed[k] = 0.0;
    } else if (lower[k] >= cfg.task_bits[k] * (1.0 - 1e-12)) {
      d_fixed[k] = cfg.task_bits[k];
    } else {
      var_of_d[k] = static_cast<int>(free_d.size());
      free_d.push_back(k);
    }
  }
  const int nd = static_cast<int>(free_d.size());
  const int dim = nd + 2 * n;
  const double noise = cfg.noise_w;
  const double rate_scale = cfg.latency_s * cfg.bandwidth_hz;

  auto unpack = [&](const VectorXd& x, std::vector<double>& d, VectorXcd& u) {
    d = d_fixed;
    for (int i = 0; i < nd; ++i) d[free_d[i]] = cfg.task_bits[free_d[i]] * x[i];
    u.resize(n);
    for (int e = 0; e < n; ++e) u[e] = {x[nd + e], x[nd + n + e]};
  };
  // Gradient of the surrogate gain of user k in the u coordinates.
  std::vector<VectorXd> gain_grad(k_users, VectorXd::Zero(dim));
  for (int k = 0; k < k_users; ++k) {
    for (int e = 0; e < n; ++e) {
      gain_grad[k][nd + e] = 2.0 * gains[k].b[e].real();
      gain_grad[k][nd + n + e] = 2.0 * gains[k].b[e].imag();
    }
  }
  auto surrogate = [&](int k, const VectorXcd& u) {
    return gains[k].constant + 2.0 * gains[k].b.dot(u).real();
  };

  convex::ConvexProgram program;
  program.dim = dim;
  program.objective = [&](const VectorXd& x, convex::SmoothEval& f) {
    std::vector<double> d;
    VectorXcd u;
    unpack(x, d, u);
    f.gradient.setZero();
    f.hessian.setZero();
    const double t2 = cfg.latency_s * cfg.latency_s;
    for (int i = 0; i < nd; ++i) {
      const int k = free_d[i];
      const double r = cfg.task_bits[k];
      const double c3 = std::pow(cfg.cycles_per_bit[k], 3);
      const double rest = r - d[k];
      if (rest < 0.0) return false;
      f.gradient[i] = -3.0 * cfg.capacitance * c3 * rest * rest * r / t2;
      f.hessian(i, i) = 6.0 * cfg.capacitance * c3 * rest * r * r / t2;
    }
    double penalty = 0.0;
    for (int e = 0; e < n; ++e) {
      penalty += 1.0 + std::norm(u_ref[e]) - 2.0 * (std::conj(u_ref[e]) * u[e]).real();
      f.gradient[nd + e] = -2.0 * q * u_ref[e].real();
      f.gradient[nd + n + e] = -2.0 * q * u_ref[e].imag();
    }
    f.value = Energy(cfg, d, p) + q * penalty;
    return true;
  };

  if (nd > 0) {
    convex::ConstraintBlock box;
    box.count = 2 * nd;
    box.eval = [&](const VectorXd& x, VectorXd& v, MatrixXd& jac) {
      jac.setZero();
      for (int i = 0; i < nd; ++i) {
        const int k = free_d[i];
        v[2 * i] = lower[k] / cfg.task_bits[k] - x[i];
        jac(2 * i, i) = -1.0;
        v[2 * i + 1] = x[i] - 1.0;
        jac(2 * i + 1, i) = 1.0;
      }
      return true;
    };
    program.constraints.push_back(box);

    convex::ConstraintBlock edge;
    edge.count = 1;
    edge.eval = [&](const VectorXd& x, VectorXd& v, MatrixXd& jac) {
      std::vector<double> d;
      VectorXcd u;
      unpack(x, d, u);
      double cycles = 0.0;
      for (int k = 0; k < k_users; ++k) cycles += d[k] * cfg.cycles_per_bit[k];
      v[0] = (cycles - cfg.edge_cpu_hz) / cfg.edge_cpu_hz;
      jac.setZero();
      for (int i = 0; i < nd; ++i) {
        const int k = free_d[i];
        jac(0, i) = cfg.task_bits[k] * cfg.cycles_per_bit[k] / cfg.edge_cpu_hz;
      }
      return true;
    };
    program.constraints.push_back(edge);
  }

  convex::ConstraintBlock unit;
  unit.count = n;
  unit.eval = [&](const VectorXd& x, VectorXd& v, MatrixXd& jac) {
    jac.setZero();
    for (int e = 0; e < n; ++e) {
      const double re = x[nd + e], im = x[nd + n + e];
      v[e] = re * re + im * im - 1.0;
      jac(e, nd + e) = 2.0 * re;
      jac(e, nd + n + e) = 2.0 * im;
    }
    return true;
  };
  unit.add_weighted_hessian = [&](const VectorXd&, const VectorXd& w, MatrixXd& h) {
    for (int e = 0; e < n; ++e) {
      h(nd + e, nd + e) += 2.0 * w[e];
      h(nd + n + e, nd + n + e) += 2.0 * w[e];
    }
  };
  program.constraints.push_back(unit);

  // Subset rate constraints with the surrogate gains.
  std::vector<std::uint64_t> masks;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k_users); ++mask) {
    bool transmits = false;
    for (int k = 0; k < k_users; ++k) {
      if ((mask & (std::uint64_t{1} << k)) && p[k] > 0.0) transmits = true;
    }
    if (transmits) masks.push_back(mask);
  }
  auto subset_terms = [&](std::uint64_t mask, const std::vector<double>& d,
                          const VectorXcd& u, double& bits, double& snr,
                          VectorXd& grad_snr) {
    bits = 0.0;
    snr = 0.0;
    grad_snr.setZero();
    for (int k = 0; k < k_users; ++k) {
      if (!(mask & (std::uint64_t{1} << k))) continue;
      bits += d[k];
      if (p[k] > 0.0) {
        snr += p[k] * surrogate(k, u) / noise;
        grad_snr += (p[k] / noise) * gain_grad[k];
      }
    }
  };
  convex::ConstraintBlock region;
  region.count = static_cast<int>(masks.size());
  region.eval = [&](const VectorXd& x, VectorXd& v, MatrixXd& jac) {
    std::vector<double> d;
    VectorXcd u;
    unpack(x, d, u);
    VectorXd grad(dim);
    for (std::size_t s = 0; s < masks.size(); ++s) {
      double bits, snr;
      subset_terms(masks[s], d, u, bits, snr, grad);
      if (!(1.0 + snr > 0.0)) return false;
      v[s] = bits / rate_scale - std::log2(1.0 + snr);
      jac.row(s) = -grad.transpose() / ((1.0 + snr) * kLn2);
      for (int k = 0; k < k_users; ++k) {
        if ((masks[s] & (std::uint64_t{1} << k)) && var_of_d[k] >= 0) {
          jac(s, var_of_d[k]) = cfg.task_bits[k] / rate_scale;
        }
      }
    }
    return true;
  };
  region.add_weighted_hessian = [&](const VectorXd& x, const VectorXd& w,
                                    MatrixXd& h) {
    std::vector<double> d;
    VectorXcd u;
    unpack(x, d, u);
    VectorXd grad(dim);
    for (std::size_t s = 0; s < masks.size(); ++s) {
      double bits, snr;
      subset_terms(masks[s], d, u, bits, snr, grad);
      h.noalias() += (w[s] / ((1.0 + snr) * (1.0 + snr) * kLn2)) * grad * grad.transpose();
    }
  };
  program.constraints.push_back(region);

  // Strictly feasible start: shrink u_ref slightly and move d up from D.
  VectorXd x0(dim);
  for (int e = 0; e < n; ++e) {
    const std::complex<double> u0 = 0.999 * u_ref[e];
    x0[nd + e] = u0.real();
    x0[nd + n + e] = u0.imag();
  }
  bool found = false;
  for (double s = 0.5; s > 1e-15; s *= 0.5) {
    for (int i = 0; i < nd; ++i) {
      const double lo = lower[free_d[i]] / cfg.task_bits[free_d[i]];
      x0[i] = lo + s * (1.0 - lo);
    }
    if (convex::max_constraint_value(program, x0) < 0.0) {
      found = true;
      break;
    }
    if (nd == 0) break;
  }
  if (!found) {
    out.note = "no strictly feasible start: the minimum offload is not deliverable";
    return out;
  }
  const convex::BarrierResult res = convex::minimize_barrier(program, x0, tol);
  out.status = res.status;
  if (res.status == convex::BarrierStatus::kNotStrictlyFeasible) {
    out.note = "barrier start rejected";
    return out;
  }
  out.feasible = true;
  unpack(res.x, out.offload_bits, out.u);
  out.objective = res.value;
  out.surrogate_gain.resize(k_users);
  for (int k = 0; k < k_users; ++k) out.surrogate_gain[k] = surrogate(k, out.u);
  return out;
}

PhaseResult solve_given_power(const SystemConfig& cfg, const ChannelSet& ch,
                              std::span<const double> power_w,
                              const PhaseVector& theta_init,
                              const PhaseOptions& options) {
  cfg.Validate();
  CheckSizes(cfg, ch, power_w);
  const int k_users = cfg.num_users;
  const int n = ch.num_elements();
  if (theta_init.size() != n) throw std::invalid_argument("theta has the wrong length");
  PhaseResult result;
  result.theta = theta_init;
  const std::vector<double> p(power_w.begin(), power_w.end());

  std::vector<double> lower(k_users);
  bool idle_ok = true;
  for (int k = 0; k < k_users; ++k) {
    lower[k] = MinOffload(cfg, k);
    if (lower[k] > 0.0) idle_ok = false;
  }
  const bool silent = std::all_of(p.begin(), p.end(), [](double v) { return v <= 0.0; });
  auto full_local = [&]() {
    result.allocation = Allocation::FullLocal(k_users);
    result.energy = total_energy(result.allocation, cfg);
  };
  if (silent) {
    if (!idle_ok) {
      result.feasible = false;
      result.note = "zero power cannot deliver the minimum offload";
      return result;
    }
    full_local();
    result.converged = true;
    return result;
  }

  VectorXcd u = lift(theta_init);
  const std::vector<double> gamma0 = snr_coefficients(ch, theta_init, cfg.noise_w);
  const auto start = dual::optimal_offload_for_power(cfg, gamma0, p);
  // Q is measured against the energy swing the surface can cause, which is
  // far below the energy itself when the cascade is weak.
  double scale = start ? start->energy : 1.0;
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
  if (n > 0 && start) {
    std::vector<double> lo, hi;
    GainEnvelope(ch, cfg.noise_w, lo, hi);
    const auto best = dual::optimal_offload_for_power(cfg, hi, p);
    const auto worst = dual::optimal_offload_for_power(cfg, lo, p);
    const double swing = (worst ? worst->energy : start->energy) - (best ? best->energy : 0.0);
    if (best && std::isfinite(swing) && swing > 0.0) scale = std::min(scale, swing);
  }

  if (n > 0) {
    double q = options.q0_factor * scale / n;
    double energy = std::numeric_limits<double>::infinity();
    for (int round = 0; round < options.max_rounds; ++round) {
      // J_Q of the incumbent at the new weight.
      double prev = energy + q * PenaltyResidual(u);
      bool stalled = false;
      for (int it = 0; it < options.max_sca; ++it) {
        const InnerSolution sol = solve_inner(cfg, ch, p, u, q);
        if (!sol.feasible) {
          result.note = sol.note;
          stalled = true;
          break;
        }
        const double residual = PenaltyResidual(sol.u);
        const double e = Energy(cfg, sol.offload_bits, p);
        const double objective = e + q * residual;
        // An inexact inner solve may land above its own expansion point.
        if (objective > prev) break;
        u = sol.u;
        energy = e;
        result.trace.push_back({round, it, q, objective, residual});
        if (std::abs(prev - objective) <= options.sca_tol * std::abs(objective)) break;
        prev = objective;
      }
      if (stalled) break;
      result.penalty_residual = PenaltyResidual(u);
      if (result.penalty_residual <= options.completion * n) {
        result.converged = true;
        break;
      }
      q *= options.q_growth;
    }
    result.theta = unlift(u);
  } else {
    result.converged = true;
  }

  // Exact d at the unit-modulus phases.
  const std::vector<double> gamma = snr_coefficients(ch, result.theta, cfg.noise_w);
  const auto active = dual::optimal_offload_for_power(cfg, gamma, p);
  std::optional<double> idle;
  if (idle_ok) {
    double e = 0.0;
    for (int k = 0; k < k_users; ++k) e += LocalEnergy(cfg, k, 0.0);
    idle = e;
  }
  if (!active && !idle) {
    result.feasible = false;
    result.note = "minimum offload not deliverable at the final phases";
    return result;
  }
  const double t = dual::choose_t(
      {idle, active ? std::optional<double>(active->energy) : std::nullopt},
      cfg.latency_s);
  if (t == 0.0) {
    full_local();
    return result;
  }
  Allocation alloc = Allocation::FullLocal(k_users);
  alloc.tx_time_s = t;
  alloc.offload_bits = active->offload_bits;
  alloc.power_w = active->power_w;
  for (int k = 0; k < k_users; ++k) alloc.rate_bps[k] = alloc.offload_bits[k] / t;
  noma::DecodingOrder order;
  order.perm = alloc.order;
  const noma::RateRegion region =
      noma::RateRegion::FromPower(gamma, alloc.power_w, cfg.bandwidth_hz);
  alloc.slots = dual::decompose_into_slots(region, alloc.offload_bits, t, order);
  if (!alloc.slots.empty()) alloc.order = alloc.slots.front().order;
  result.allocation = std::move(alloc);
  result.energy = total_energy(result.allocation, cfg);
  return result;
}

}  // namespace rismec::phase
