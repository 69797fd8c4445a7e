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

// Scenario constants and the per-user energy model of the RIS-aided MEC
// uplink. All quantities are stored in SI base units: bits, Hz, W, s and CPU
// cycles. Conversions from the customary Mbit/MHz/GHz/dBm units happen at the
// configuration boundary (see units below).

#ifndef RISMEC_MODEL_H_
#define RISMEC_MODEL_H_

#include <span>
#include <string>
#include <vector>

namespace rismec {

namespace units {

inline constexpr double kMega = 1e6;
inline constexpr double kGiga = 1e9;

// Power in W for a level in dBm.
double DbmToWatt(double dbm);
double WattToDbm(double watt);

// Thermal noise power in W over `bandwidth_hz` for a density in dBm/Hz.
double NoisePowerWatt(double bandwidth_hz, double density_dbm_per_hz = -174.0);

}  // namespace units

struct SystemConfig {
  int num_users = 4;      // K
  int num_antennas = 4;   // M
  int num_elements = 10;  // N
  double bandwidth_hz = 1e6;
  double noise_w = 0.0;
  double latency_s = 0.6;
  double capacitance = 1e-28;
  std::vector<double> task_bits;        // R_k
  std::vector<double> cycles_per_bit;   // C_k
  std::vector<double> local_cpu_hz;     // F_k
  double edge_cpu_hz = 20e9;            // F
  std::vector<double> max_power_w;      // P_k

  // Defaults of the reference simulation setup with `num_users` identical
  // users: 1 Mbit tasks, 1000 cycles/bit, 10 GHz user CPUs, a 20 GHz edge
  // server, 1 W power caps, 1 MHz bandwidth and -174 dBm/Hz noise.
  static SystemConfig Default(int num_users = 4);

  // Throws std::invalid_argument when a field breaks its invariant.
  void Validate() const;

  // Sets every R_k to `bits`.
  void SetTaskBits(double bits);
};

// One SIC decoding order held for `duration_s` seconds. `rates` are the vertex
// rates of that order, indexed by user.
struct TimeSlot {
  double duration_s = 0.0;
  std::vector<int> order;
  std::vector<double> rates;
};

struct Allocation {
  std::vector<double> offload_bits;  // d_k
  double tx_time_s = 0.0;            // t
  std::vector<double> power_w;       // p_k
  std::vector<double> rate_bps;      // r_k
  std::vector<int> order;            // decoding permutation, 0-based
  std::vector<TimeSlot> slots;

  // Everything computed locally: d = 0, t = 0, p = r = 0.
  static Allocation FullLocal(int num_users);

  // Bits delivered to the edge per user: sum of slot durations times slot
  // rates when slots are present, otherwise t * r_k.
  std::vector<double> DeliveredBits() const;
};

struct EnergyBreakdown {
  std::vector<double> local;
  std::vector<double> offload;
  double total = 0.0;

  double LocalSum() const;
  double OffloadSum() const;
};

// alpha * (R - d)^3 * C^3 / T^2. Throws std::domain_error for d outside
// [0, R] or T <= 0.
double local_energy(double task_bits, double offload_bits, double cycles_per_bit,
                    double latency_s, double capacitance);

// t * p.
double offload_energy(double tx_time_s, double power_w);

// D_k = max((R_k C_k - F_k T) / C_k, 0): bits that must leave the device for
// the local CPU to meet the deadline.
std::vector<double> min_offload_bits(const SystemConfig& cfg);

EnergyBreakdown total_energy(const Allocation& alloc, const SystemConfig& cfg);

struct Violation {
  std::string constraint;  // "edge_capacity", "delivery", "rate_region", ...
  int user = -1;           // -1 when the constraint is not per-user
  double residual = 0.0;   // amount by which the constraint is exceeded
};

// Checks every constraint of the energy minimization problem against an
// allocation. `snr` holds the per-watt SNR coefficients gamma_k used to build
// the NOMA rate region. Tolerances are relative to each constraint's scale.
// An empty result means the allocation is feasible.
std::vector<Violation> validate_allocation(const Allocation& alloc,
                                           const SystemConfig& cfg,
                                           std::span<const double> snr,
                                           double tol = 1e-9);

}  // namespace rismec

#endif  // RISMEC_MODEL_H_
