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

// The uplink NOMA capacity region
//
//   C = { r : sum_{k in S} r_k <= B log2(1 + sum_{k in S} snr_k), all S != {} }
//
// is a polymatroid. Its vertices are the SIC rate vectors of the K! decoding
// orders, and a weighted sum rate is maximized by the vertex that sorts users
// by decreasing weight.
//
// Order convention: order[0] occupies the interference-free position, i.e.
//   r_{order[j]} = B log2((1 + sum_{i<=j} snr_{order[i]})
//                         / (1 + sum_{i<j} snr_{order[i]})).
// Users are 0-based throughout.

#ifndef RISMEC_NOMA_H_
#define RISMEC_NOMA_H_

#include <cstdint>
#include <span>
#include <vector>

namespace rismec::noma {

// Received SNR terms snr_k = gamma_k * p_k and the bandwidth in Hz.
struct RateRegion {
  std::vector<double> snr;
  double bandwidth_hz = 1.0;

  int num_users() const { return static_cast<int>(snr.size()); }

  // Region for per-watt coefficients `gamma` at powers `power`.
  static RateRegion FromPower(std::span<const double> gamma,
                              std::span<const double> power,
                              double bandwidth_hz);
};

struct DecodingOrder {
  std::vector<int> perm;
  // Groups (size >= 2) of users whose weights tie; ordered as they appear in
  // `perm`.
  std::vector<std::vector<int>> tie_groups;
};

// Relative threshold under which two multipliers count as tied.
inline constexpr double kTieTolerance = 1e-8;

// Rank function f(S) in bits/s. `users` are 0-based indices; throws
// std::out_of_range for an invalid or repeated index.
double subset_capacity(const RateRegion& region, std::span<const int> users);
// Same, for a bitmask subset (bit k set means user k is in S).
double subset_capacity(const RateRegion& region, std::uint64_t mask);

// SIC rates of `order`. Throws std::invalid_argument if `order` is not a
// permutation of the users.
std::vector<double> vertex_rates(const RateRegion& region,
                                 std::span<const int> order);

// Users sorted by decreasing mu, ties broken by index. Throws
// std::invalid_argument for negative or non-finite entries.
DecodingOrder optimal_order(std::span<const double> mu);

struct WeightedRateResult {
  DecodingOrder order;
  std::vector<double> rates;
  double objective = 0.0;  // sum mu_k r_k
};

// Maximizes sum mu_k r_k over the region in O(K log K).
WeightedRateResult weighted_rate_max(const RateRegion& region,
                                     std::span<const double> mu);

inline constexpr int kMaxMembershipUsers = 20;

// True iff every one of the 2^K - 1 subset inequalities holds within
// `tol * max(1, f(full set))`, and all rates are nonnegative within the same
// slack. Throws std::invalid_argument when K > kMaxMembershipUsers.
bool membership(const RateRegion& region, std::span<const double> rates,
                double tol = 1e-9);

// Largest violation of the subset inequalities, in bits/s (<= 0 when inside).
double max_region_violation(const RateRegion& region,
                            std::span<const double> rates);

enum class TimeSharingStatus { kFeasible, kInfeasible };

struct TimeSharingResult {
  TimeSharingStatus status = TimeSharingStatus::kInfeasible;
  std::vector<double> durations;  // tau per vertex, same order as the input
  std::vector<double> delivered;  // sum_phi tau_phi r_k^phi per user
};

// Finds slot lengths tau >= 0 with sum tau <= t and sum_phi tau_phi r^phi_k
// >= d_k for every user, minimizing the total time used. Each entry of
// `vertices` is a rate vector indexed by user.
TimeSharingResult time_sharing(std::span<const double> bits, double tx_time_s,
                               const std::vector<std::vector<double>>& vertices);

// Orders obtained by cyclically rotating every tie group of `order` in place:
// prod_l |group_l| orders, the first being `order.perm` itself.
std::vector<std::vector<int>> tie_group_rotations(const DecodingOrder& order);

// All orders that permute users within tie groups: prod_l |group_l|! orders.
std::vector<std::vector<int>> tie_group_permutations(const DecodingOrder& order);

}  // namespace rismec::noma

#endif  // RISMEC_NOMA_H_
