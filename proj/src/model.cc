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

#include "rismec/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rismec/noma.h"

namespace rismec {

namespace units {

double DbmToWatt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

double WattToDbm(double watt) { return 10.0 * std::log10(watt * 1e3); }

double NoisePowerWatt(double bandwidth_hz, double density_dbm_per_hz) {
  return DbmToWatt(density_dbm_per_hz + 10.0 * std::log10(bandwidth_hz));
}

}  // namespace units

SystemConfig SystemConfig::Default(int num_users) {
  if (num_users < 1) throw std::invalid_argument("num_users must be >= 1");
  SystemConfig cfg;
  cfg.num_users = num_users;
  cfg.noise_w = units::NoisePowerWatt(cfg.bandwidth_hz);
  cfg.task_bits.assign(num_users, 1e6);
  cfg.cycles_per_bit.assign(num_users, 1e3);
  cfg.local_cpu_hz.assign(num_users, 10e9);
  cfg.max_power_w.assign(num_users, 1.0);
  return cfg;
}

void SystemConfig::Validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (num_users < 1) throw std::invalid_argument("num_users must be >= 1");
  if (num_antennas < 1) throw std::invalid_argument("num_antennas must be >= 1");
  if (num_elements < 0) throw std::invalid_argument("num_elements must be >= 0");
  if (!positive(bandwidth_hz) || !positive(noise_w) || !positive(latency_s) ||
      !positive(capacitance) || !positive(edge_cpu_hz)) {
    throw std::invalid_argument("scalar system constants must be positive");
  }
  const std::size_t k = static_cast<std::size_t>(num_users);
  for (const auto* v : {&task_bits, &cycles_per_bit, &local_cpu_hz, &max_power_w}) {
    if (v->size() != k) {
      throw std::invalid_argument("per-user arrays must have num_users entries");
    }
    if (!std::all_of(v->begin(), v->end(), positive)) {
      throw std::invalid_argument("per-user constants must be positive");
    }
  }
}

void SystemConfig::SetTaskBits(double bits) {
  task_bits.assign(static_cast<std::size_t>(num_users), bits);
}

Allocation Allocation::FullLocal(int num_users) {
  Allocation a;
  a.offload_bits.assign(num_users, 0.0);
  a.power_w.assign(num_users, 0.0);
  a.rate_bps.assign(num_users, 0.0);
  a.order.resize(num_users);
  std::iota(a.order.begin(), a.order.end(), 0);
  return a;
}

std::vector<double> Allocation::DeliveredBits() const {
  std::vector<double> bits(rate_bps.size(), 0.0);
  if (slots.empty()) {
    for (std::size_t k = 0; k < bits.size(); ++k) bits[k] = tx_time_s * rate_bps[k];
    return bits;
  }
  for (const TimeSlot& slot : slots) {
    for (std::size_t k = 0; k < bits.size() && k < slot.rates.size(); ++k) {
      bits[k] += slot.duration_s * slot.rates[k];
    }
  }
  return bits;
}

double EnergyBreakdown::LocalSum() const {
  return std::accumulate(local.begin(), local.end(), 0.0);
}

double EnergyBreakdown::OffloadSum() const {
  return std::accumulate(offload.begin(), offload.end(), 0.0);
}

double local_energy(double task_bits, double offload_bits, double cycles_per_bit,
                    double latency_s, double capacitance) {
  if (!(latency_s > 0.0)) throw std::domain_error("latency must be positive");
  if (offload_bits < 0.0 || offload_bits > task_bits) {
    throw std::domain_error("offloaded bits must lie in [0, R]");
  }
  const double cycles = (task_bits - offload_bits) * cycles_per_bit;
  return capacitance * cycles * cycles * cycles / (latency_s * latency_s);
}

double offload_energy(double tx_time_s, double power_w) {
  return tx_time_s * power_w;
}

std::vector<double> min_offload_bits(const SystemConfig& cfg) {
  std::vector<double> d(cfg.task_bits.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double excess = cfg.task_bits[k] * cfg.cycles_per_bit[k] -
                          cfg.local_cpu_hz[k] * cfg.latency_s;
    d[k] = std::clamp(excess / cfg.cycles_per_bit[k], 0.0, cfg.task_bits[k]);
  }
  return d;
}

EnergyBreakdown total_energy(const Allocation& alloc, const SystemConfig& cfg) {
  const int k_users = cfg.num_users;
  if (static_cast<int>(alloc.offload_bits.size()) != k_users ||
      static_cast<int>(alloc.power_w.size()) != k_users) {
    throw std::invalid_argument("allocation size does not match the config");
  }
  EnergyBreakdown e;
  e.local.resize(k_users);
  e.offload.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    // Tolerate rounding just past R from solvers that land on the bound.
    double d = alloc.offload_bits[k];
    const double r = cfg.task_bits[k];
    if (d > r && d <= r * (1.0 + 1e-12)) d = r;
    e.local[k] = local_energy(r, d, cfg.cycles_per_bit[k], cfg.latency_s,
                              cfg.capacitance);
    e.offload[k] = offload_energy(alloc.tx_time_s, alloc.power_w[k]);
    e.total += e.local[k] + e.offload[k];
  }
  return e;
}

std::vector<Violation> validate_allocation(const Allocation& alloc,
                                           const SystemConfig& cfg,
                                           std::span<const double> snr,
                                           double tol) {
  std::vector<Violation> out;
  const int k_users = cfg.num_users;
  auto add = [&out](const char* name, int user, double residual) {
    out.push_back({name, user, residual});
  };
  if (static_cast<int>(alloc.offload_bits.size()) != k_users ||
      static_cast<int>(alloc.power_w.size()) != k_users ||
      static_cast<int>(alloc.rate_bps.size()) != k_users) {
    add("shape", -1, 1.0);
    return out;
  }
  const double t_scale = cfg.latency_s;
  if (alloc.tx_time_s < -tol * t_scale) add("time_nonnegative", -1, -alloc.tx_time_s);
  if (alloc.tx_time_s > cfg.latency_s * (1.0 + tol)) {
    add("latency", -1, alloc.tx_time_s - cfg.latency_s);
  }
  double cycles = 0.0;
  const std::vector<double> d_min = min_offload_bits(cfg);
  for (int k = 0; k < k_users; ++k) {
    const double d = alloc.offload_bits[k];
    const double r = cfg.task_bits[k];
    cycles += d * cfg.cycles_per_bit[k];
    if (d > r + tol * r) add("offload_upper", k, d - r);
    if (d < d_min[k] - tol * r) add("offload_lower", k, d_min[k] - d);
    const double p = alloc.power_w[k];
    if (p < -tol * cfg.max_power_w[k]) add("power_nonnegative", k, -p);
    if (p > cfg.max_power_w[k] * (1.0 + tol)) add("power_cap", k, p - cfg.max_power_w[k]);
    if (alloc.rate_bps[k] < 0.0) add("rate_nonnegative", k, -alloc.rate_bps[k]);
  }
  if (cycles > cfg.edge_cpu_hz * (1.0 + tol)) {
    add("edge_capacity", -1, cycles - cfg.edge_cpu_hz);
  }
  const std::vector<double> delivered = alloc.DeliveredBits();
  for (int k = 0; k < k_users; ++k) {
    const double need = alloc.offload_bits[k];
    if (delivered[k] < need - tol * std::max(cfg.task_bits[k], 1.0)) {
      add("delivery", k, need - delivered[k]);
    }
  }
  if (!alloc.slots.empty()) {
    double used = 0.0;
    for (const TimeSlot& slot : alloc.slots) used += slot.duration_s;
    if (used > alloc.tx_time_s * (1.0 + tol) + tol * t_scale) {
      add("slot_time", -1, used - alloc.tx_time_s);
    }
  }
  if (static_cast<int>(snr.size()) == k_users && k_users <= noma::kMaxMembershipUsers) {
    const noma::RateRegion region =
        noma::RateRegion::FromPower(snr, alloc.power_w, cfg.bandwidth_hz);
    if (alloc.slots.empty()) {
      const double v = noma::max_region_violation(region, alloc.rate_bps);
      const double scale = std::max(1.0, noma::subset_capacity(
                                             region, (std::uint64_t{1} << k_users) - 1));
      if (v > tol * scale + 1e-9 * cfg.bandwidth_hz) add("rate_region", -1, v);
    } else {
      for (const TimeSlot& slot : alloc.slots) {
        const double v = noma::max_region_violation(region, slot.rates);
        const double scale = std::max(1.0, noma::subset_capacity(
                                               region, (std::uint64_t{1} << k_users) - 1));
        if (v > tol * scale + 1e-9 * cfg.bandwidth_hz) add("rate_region", -1, v);
      }
    }
  }
  return out;
}

}  // namespace rismec
