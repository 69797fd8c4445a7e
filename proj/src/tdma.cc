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

#include "rismec/tdma.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace rismec::tdma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530942;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double MinOffload(const SystemConfig& cfg, int k) {
  const double excess =
      cfg.task_bits[k] * cfg.cycles_per_bit[k] - cfg.local_cpu_hz[k] * cfg.latency_s;
  return std::clamp(excess / cfg.cycles_per_bit[k], 0.0, cfg.task_bits[k]);
}

double LocalEnergy(const SystemConfig& cfg, int k, double d) {
  const double cycles = (cfg.task_bits[k] - d) * cfg.cycles_per_bit[k];
  return cfg.capacitance * cycles * cycles * cycles / (cfg.latency_s * cfg.latency_s);
}

// Power that carries d bits in T seconds over a 1/K share.
double InversePower(double d, double gamma, const SystemConfig& cfg) {
  if (d <= 0.0) return 0.0;
  const double share = cfg.bandwidth_hz / cfg.num_users;
  return std::expm1(kLn2 * d / (cfg.latency_s * share)) / gamma;
}

// Per-user minimizer of local(d) + T p(d) + upsilon C d over [lo, hi].
double BestOffload(const SystemConfig& cfg, int k, double gamma, double upsilon,
                   double lo, double hi) {
  if (hi <= lo) return lo;
  const double share = cfg.bandwidth_hz / cfg.num_users;
  const double c = cfg.cycles_per_bit[k];
  const double r = cfg.task_bits[k];
  const double t = cfg.latency_s;
  auto slope = [&](double d) {
    const double rest = r - d;
    return -3.0 * cfg.capacitance * c * c * c * rest * rest / (t * t) +
           kLn2 * std::exp2(d / (t * share)) / (share * gamma) + upsilon * c;
  };
  if (slope(hi) <= 0.0) return hi;
  if (slope(lo) >= 0.0) return lo;
  double a = lo, b = hi;
  for (int i = 0; i < 200 && b - a > 1e-15 * r; ++i) {
    const double mid = 0.5 * (a + b);
    (slope(mid) > 0.0 ? b : a) = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace

double tdma_rate(double gamma, double power_w, const SystemConfig& cfg) {
  return cfg.bandwidth_hz / cfg.num_users * std::log2(1.0 + gamma * power_w);
}

double tdma_optimal_d(double upsilon, double xi_k, const SystemConfig& cfg, int k) {
  return dual::optimal_d(upsilon, xi_k, cfg, k);
}

double tdma_optimal_p(double eta_k, double gamma, const SystemConfig& cfg, int k) {
  if (!(gamma > 0.0)) return 0.0;
  const double p = eta_k * cfg.bandwidth_hz /
                       (cfg.latency_s * cfg.num_users * kLn2) -
                   1.0 / gamma;
  return std::clamp(p, 0.0, cfg.max_power_w[k]);
}

double tdma_optimal_r(double eta_k, double xi_k, double power_w, double gamma,
                      const SystemConfig& cfg) {
  return eta_k <= cfg.latency_s * xi_k ? tdma_rate(gamma, power_w, cfg) : 0.0;
}

TdmaDualState tdma_update_duals(const TdmaDualState& state, const Allocation& alloc,
                                std::span<const double> gamma,
                                const SystemConfig& cfg, const TdmaStepSizes& steps) {
  const int k_users = cfg.num_users;
  TdmaDualState next = state;
  double cycles = 0.0;
  for (int k = 0; k < k_users; ++k) cycles += alloc.offload_bits[k] * cfg.cycles_per_bit[k];
  next.upsilon = std::max(0.0, state.upsilon + steps.upsilon * (cycles - cfg.edge_cpu_hz));
  next.xi.resize(k_users);
  next.eta.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    const double delivery = alloc.offload_bits[k] - alloc.tx_time_s * alloc.rate_bps[k];
    next.xi[k] = std::max(0.0, state.xi[k] + steps.xi[k] * delivery);
    const double cap = tdma_rate(gamma[k], alloc.power_w[k], cfg);
    next.eta[k] = std::max(0.0, state.eta[k] + steps.eta[k] * (alloc.rate_bps[k] - cap));
  }
  next.iteration = state.iteration + 1;
  return next;
}

std::optional<dual::PrimalPoint> tdma_exact_active(const SystemConfig& cfg,
                                                   std::span<const double> gamma) {
  const int k_users = cfg.num_users;
  std::vector<double> lo(k_users), hi(k_users);
  double base_cycles = 0.0;
  for (int k = 0; k < k_users; ++k) {
    lo[k] = MinOffload(cfg, k);
    hi[k] = gamma[k] > 0.0
                ? std::min(cfg.task_bits[k],
                           cfg.latency_s * tdma_rate(gamma[k], cfg.max_power_w[k], cfg))
                : 0.0;
    if (lo[k] > hi[k] * (1.0 + 1e-12)) return std::nullopt;
    hi[k] = std::max(hi[k], lo[k]);
    base_cycles += lo[k] * cfg.cycles_per_bit[k];
  }
  if (base_cycles > cfg.edge_cpu_hz) return std::nullopt;
  auto offload_at = [&](double upsilon) {
    std::vector<double> d(k_users);
    for (int k = 0; k < k_users; ++k) {
      d[k] = gamma[k] > 0.0 ? BestOffload(cfg, k, gamma[k], upsilon, lo[k], hi[k]) : lo[k];
    }
    return d;
  };
  auto cycles_of = [&](const std::vector<double>& d) {
    double c = 0.0;
    for (int k = 0; k < k_users; ++k) c += d[k] * cfg.cycles_per_bit[k];
    return c;
  };
  std::vector<double> d = offload_at(0.0);
  if (cycles_of(d) > cfg.edge_cpu_hz) {
    double a = 0.0, b = 1e-15;
    while (cycles_of(offload_at(b)) > cfg.edge_cpu_hz && b < 1e10) b *= 2.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (a + b);
      (cycles_of(offload_at(mid)) > cfg.edge_cpu_hz ? a : b) = mid;
    }
    d = offload_at(b);
  }
  dual::PrimalPoint out;
  out.offload_bits = d;
  out.power_w.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    out.power_w[k] =
        gamma[k] > 0.0 ? std::min(InversePower(d[k], gamma[k], cfg), cfg.max_power_w[k])
                       : 0.0;
    out.energy += LocalEnergy(cfg, k, d[k]) + cfg.latency_s * out.power_w[k];
  }
  return out;
}

double tdma_energy(const SystemConfig& cfg, std::span<const double> gamma) {
  double best = kInf;
  bool idle_ok = true;
  double idle = 0.0;
  for (int k = 0; k < cfg.num_users; ++k) {
    if (MinOffload(cfg, k) > 0.0) idle_ok = false;
    idle += LocalEnergy(cfg, k, 0.0);
  }
  if (idle_ok) best = idle;
  if (auto active = tdma_exact_active(cfg, gamma)) best = std::min(best, active->energy);
  return best;
}

TdmaReport solve_tdma_given_phases(const SystemConfig& cfg,
                                   std::span<const double> gamma,
                                   const dual::DualOptions& options) {
  cfg.Validate();
  const int k_users = cfg.num_users;
  if (static_cast<int>(gamma.size()) != k_users) {
    throw std::invalid_argument("one SNR coefficient per user is required");
  }
  const double t_max = cfg.latency_s;
  TdmaReport report;

  std::vector<double> lower(k_users);
  bool idle_ok = true;
  double idle_energy = 0.0;
  for (int k = 0; k < k_users; ++k) {
    lower[k] = MinOffload(cfg, k);
    if (lower[k] > 0.0) idle_ok = false;
    idle_energy += LocalEnergy(cfg, k, 0.0);
  }
  const std::optional<double> idle =
      idle_ok ? std::optional<double>(idle_energy) : std::nullopt;
  const std::optional<dual::PrimalPoint> best = tdma_exact_active(cfg, gamma);
  double upper = best ? best->energy : kInf;
  if (idle) upper = std::min(upper, *idle);

  TdmaDualState state;
  state.xi.resize(k_users);
  state.eta.assign(k_users, 0.0);
  for (int k = 0; k < k_users; ++k) {
    const double span = (cfg.task_bits[k] - lower[k]) / 2.0;
    const double c = cfg.cycles_per_bit[k];
    state.xi[k] = 3.0 * cfg.capacitance * c * c * c * span * span / (t_max * t_max);
  }
  state.step_scale = options.step_scale;

  double best_dual = -kInf;
  bool converged = false;
  int it = 0;
  Allocation iterate = Allocation::FullLocal(k_users);
  for (; it < options.max_iter; ++it) {
    // Lagrangian minimizers; r stays in [0, cap(p)].
    double active_value = 0.0, idle_value = 0.0;
    std::vector<double> p(k_users), cap(k_users), r(k_users);
    for (int k = 0; k < k_users; ++k) {
      const double weight = std::max(state.eta[k], t_max * state.xi[k]);
      p[k] = tdma_optimal_p(weight, gamma[k], cfg, k);
      cap[k] = tdma_rate(gamma[k], p[k], cfg);
      r[k] = tdma_optimal_r(state.eta[k], state.xi[k], p[k], gamma[k], cfg);
      active_value += t_max * p[k] - weight * cap[k];
      idle_value -= state.eta[k] * tdma_rate(gamma[k], cfg.max_power_w[k], cfg);
    }
    const bool transmit = active_value <= idle_value;
    iterate.tx_time_s = transmit ? t_max : 0.0;
    for (int k = 0; k < k_users; ++k) {
      iterate.power_w[k] = transmit ? p[k] : cfg.max_power_w[k];
      iterate.rate_bps[k] = transmit ? r[k] : 0.0;
    }
    double dual_value = -state.upsilon * cfg.edge_cpu_hz + std::min(active_value, idle_value);
    for (int k = 0; k < k_users; ++k) {
      const double d = tdma_optimal_d(state.upsilon, state.xi[k], cfg, k);
      iterate.offload_bits[k] = d;
      dual_value += LocalEnergy(cfg, k, d) +
                    (state.upsilon * cfg.cycles_per_bit[k] + state.xi[k]) * d;
    }
    if (dual_value > best_dual) {
      best_dual = dual_value;
      state.stall = 0;
    } else {
      ++state.stall;
    }
    report.dual_trace.push_back(dual_value);
    report.primal_trace.push_back(upper);
    if (upper - best_dual <= options.gap_tol * std::abs(upper)) {
      converged = true;
      ++it;
      break;
    }

    // Subgradients scaled by F, R_k and R_k / T.
    double cycles = 0.0;
    for (int k = 0; k < k_users; ++k) cycles += iterate.offload_bits[k] * cfg.cycles_per_bit[k];
    const double s_up = cycles - cfg.edge_cpu_hz;
    double norm2 = 0.0;
    if (state.upsilon > 0.0 || s_up > 0.0) norm2 += std::pow(s_up / cfg.edge_cpu_hz, 2);
    for (int k = 0; k < k_users; ++k) {
      const double s_xi = iterate.offload_bits[k] - iterate.tx_time_s * iterate.rate_bps[k];
      const double s_eta =
          iterate.rate_bps[k] - tdma_rate(gamma[k], iterate.power_w[k], cfg);
      if (state.xi[k] > 0.0 || s_xi > 0.0) norm2 += std::pow(s_xi / cfg.task_bits[k], 2);
      if (state.eta[k] > 0.0 || s_eta > 0.0) {
        norm2 += std::pow(s_eta * t_max / cfg.task_bits[k], 2);
      }
    }
    if (norm2 <= 0.0) break;
    double length;
    if (options.step_rule == dual::StepRule::kPolyak) {
      if (state.stall >= 30) {
        state.step_scale = std::max(state.step_scale * 0.5, 1e-3);
        state.stall = 0;
      }
      const double target = std::isfinite(upper) ? upper : best_dual + 1.0;
      length = state.step_scale * std::max(target - dual_value, 0.0) / norm2;
    } else {
      const double scale = std::isfinite(upper) ? std::abs(upper) : 1.0;
      length = options.step_scale * scale / (1.0 + options.step_decay * it) /
               std::sqrt(norm2);
    }
    TdmaStepSizes steps;
    steps.upsilon = length / (cfg.edge_cpu_hz * cfg.edge_cpu_hz);
    steps.xi.resize(k_users);
    steps.eta.resize(k_users);
    for (int k = 0; k < k_users; ++k) {
      const double rk = cfg.task_bits[k];
      steps.xi[k] = length / (rk * rk);
      steps.eta[k] = length * t_max * t_max / (rk * rk);
    }
    const double kept_scale = state.step_scale;
    const int kept_stall = state.stall;
    state = tdma_update_duals(state, iterate, gamma, cfg, steps);
    state.step_scale = kept_scale;
    state.stall = kept_stall;
  }
  report.iterations = it;
  report.best_dual = best_dual;
  report.tdma_duals = state;

  const std::optional<double> active =
      best ? std::optional<double>(best->energy) : std::nullopt;
  if (!idle && !active) {
    report.feasible = false;
    report.allocation = Allocation::FullLocal(k_users);
    report.allocation.offload_bits = lower;
    report.energy.total = kInf;
    report.gap = kInf;
    report.note = "infeasible: the minimum offload cannot be delivered";
    return report;
  }
  const double t = dual::choose_t({idle, active}, t_max);
  Allocation alloc = Allocation::FullLocal(k_users);
  if (t > 0.0) {
    alloc.tx_time_s = t;
    alloc.offload_bits = best->offload_bits;
    alloc.power_w = best->power_w;
    for (int k = 0; k < k_users; ++k) {
      alloc.rate_bps[k] = tdma_rate(gamma[k], alloc.power_w[k], cfg);
    }
  }
  report.allocation = std::move(alloc);
  report.energy = total_energy(report.allocation, cfg);
  const double primal = report.energy.total;
  report.gap = primal > 0.0 ? (primal - best_dual) / primal : primal - best_dual;
  report.converged = converged || report.gap <= options.gap_tol;
  return report;
}

SearchResult alternating_1d_search(const SystemConfig& cfg, const ChannelSet& ch,
                                   const PhaseVector& theta_init,
                                   const SearchOptions& options) {
  return alternating_1d_search(
      cfg, ch, theta_init,
      [&cfg](std::span<const double> gamma) { return tdma_energy(cfg, gamma); },
      options);
}

SearchResult alternating_1d_search(const SystemConfig& cfg, const ChannelSet& ch,
                                   const PhaseVector& theta_init,
                                   const GainObjective& objective,
                                   const SearchOptions& options) {
  if (options.grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
  const int k_users = cfg.num_users;
  const int n = ch.num_elements();
  if (theta_init.size() != n || ch.num_users() != k_users) {
    throw std::invalid_argument("phase, channel and config sizes disagree");
  }
  SearchResult result;
  result.theta = theta_init;
  Eigen::VectorXd theta = theta_init.theta;

  // a_k = hD_k + sum_n c_kn exp(-i theta_n),  c_kn = conj(G[n, :])^T h_k[n].
  std::vector<Eigen::VectorXcd> combined(k_users);
  for (int k = 0; k < k_users; ++k) {
    combined[k] = ch.direct[k];
    for (int e = 0; e < n; ++e) {
      combined[k] += ch.bs_ris.row(e).adjoint() * (std::polar(1.0, -theta[e]) * ch.reflect[k][e]);
    }
  }
  std::vector<double> gamma(k_users);
  for (int k = 0; k < k_users; ++k) gamma[k] = combined[k].squaredNorm() / cfg.noise_w;
  double current = objective(gamma);
  result.sweep_trace.push_back(current);
  if (n == 0) return result;

  std::vector<double> base_norm(k_users), coef_norm(k_users);
  std::vector<std::complex<double>> cross(k_users);
  std::vector<Eigen::VectorXcd> base(k_users), coef(k_users);
  auto evaluate = [&](double angle) {
    const std::complex<double> z = std::polar(1.0, -angle);
    for (int k = 0; k < k_users; ++k) {
      const double g = base_norm[k] + coef_norm[k] + 2.0 * (z * cross[k]).real();
      gamma[k] = std::max(g, 0.0) / cfg.noise_w;
    }
    return objective(gamma);
  };

  const double step = kTwoPi / options.grid_size;
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    const double before = current;
    for (int e = 0; e < n; ++e) {
      for (int k = 0; k < k_users; ++k) {
        coef[k] = ch.bs_ris.row(e).adjoint() * ch.reflect[k][e];
        base[k] = combined[k] - coef[k] * std::polar(1.0, -theta[e]);
        base_norm[k] = base[k].squaredNorm();
        coef_norm[k] = coef[k].squaredNorm();
        cross[k] = base[k].dot(coef[k]);  // base^H c
      }
      double best_angle = theta[e];
      double best_value = current;
      for (int j = 0; j < options.grid_size; ++j) {
        const double angle = j * step;
        const double v = evaluate(angle);
        if (v < best_value) {
          best_value = v;
          best_angle = angle;
        }
      }
      double half_span = step;
      for (int pass = 0; pass < options.refine_passes; ++pass) {
        const double center = best_angle;
        const int m = options.refine_points;
        for (int i = 0; i < m; ++i) {
          const double angle = center + half_span * (2.0 * i / (m - 1) - 1.0);
          const double v = evaluate(angle);
          if (v < best_value) {
            best_value = v;
            best_angle = angle;
          }
        }
        half_span /= 8.0;
      }
      if (best_value < current) {
        best_angle = std::fmod(best_angle, kTwoPi);
        if (best_angle < 0.0) best_angle += kTwoPi;
        theta[e] = best_angle;
        current = best_value;
        for (int k = 0; k < k_users; ++k) {
          combined[k] = base[k] + coef[k] * std::polar(1.0, -best_angle);
        }
      }
      result.trace.push_back(current);
    }
    ++result.sweeps;
    result.sweep_trace.push_back(current);
    if (before - current <= options.tol * std::abs(current)) break;
  }
  result.theta = PhaseVector::FromAngles(theta);
  return result;
}

double full_local_energy(const SystemConfig& cfg) {
  double e = 0.0;
  for (int k = 0; k < cfg.num_users; ++k) {
    if (cfg.task_bits[k] * cfg.cycles_per_bit[k] >
        cfg.local_cpu_hz[k] * cfg.latency_s * (1.0 + 1e-12)) {
      throw std::domain_error("a user cannot finish its task locally");
    }
    e += LocalEnergy(cfg, k, 0.0);
  }
  return e;
}

double full_offload_energy(const SystemConfig& cfg, std::span<const double> gamma) {
  const int k_users = cfg.num_users;
  double cycles = 0.0;
  for (int k = 0; k < k_users; ++k) {
    cycles += cfg.task_bits[k] * cfg.cycles_per_bit[k];
    if (!(gamma[k] > 0.0)) return kInf;
  }
  if (cycles > cfg.edge_cpu_hz * (1.0 + 1e-12)) return kInf;
  std::vector<int> order(k_users);
  std::iota(order.begin(), order.end(), 0);
  auto cost = [&](const std::vector<int>& o) {
    const std::vector<double> p = dual::invert_vertex_power(
        gamma, cfg.task_bits, o, cfg.latency_s, cfg.bandwidth_hz);
    double sum = 0.0;
    for (int k = 0; k < k_users; ++k) {
      if (p[k] > cfg.max_power_w[k]) return kInf;
      sum += p[k];
    }
    return cfg.latency_s * sum;
  };
  if (k_users > 8) {
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return gamma[a] < gamma[b]; });
    return cost(order);
  }
  double best = kInf;
  do {
    best = std::min(best, cost(order));
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

SystemConfig full_offload_config(const SystemConfig& cfg) {
  SystemConfig out = cfg;
  out.edge_cpu_hz = 50e9;
  out.max_power_w.assign(static_cast<std::size_t>(cfg.num_users), 1e6);
  return out;
}

dual::SolveReport full_offload_solve(const SystemConfig& cfg, const ChannelSet& ch,
                                     const PhaseVector& phases,
                                     const dual::DualOptions& options) {
  const SystemConfig big = full_offload_config(cfg);
  dual::DualOptions opts = options;
  opts.force_full_offload = true;
  const std::vector<double> gamma = snr_coefficients(ch, phases, big.noise_w);
  dual::SolveReport report = dual::solve_given_phases(big, gamma, opts);
  if (report.feasible) {
    for (int k = 0; k < cfg.num_users; ++k) {
      if (report.allocation.power_w[k] >= 1e6 * (1.0 - 1e-9)) {
        report.feasible = false;
        report.note = "power sentinel reached";
      }
    }
  }
  return report;
}

}  // namespace rismec::tdma
