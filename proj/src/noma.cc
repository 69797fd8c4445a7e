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

#include "rismec/noma.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rismec/convex.h"

namespace rismec::noma {

namespace {

void CheckPermutation(std::span<const int> order, int k_users) {
  if (static_cast<int>(order.size()) != k_users) {
    throw std::invalid_argument("order must list every user once");
  }
  std::vector<bool> seen(k_users, false);
  for (int u : order) {
    if (u < 0 || u >= k_users || seen[u]) {
      throw std::invalid_argument("order is not a permutation");
    }
    seen[u] = true;
  }
}

double Capacity(double bandwidth_hz, double snr_sum) {
  return bandwidth_hz * std::log2(1.0 + snr_sum);
}

// Positions [begin, end) of each tie group inside `order.perm`.
std::vector<std::pair<int, int>> GroupSpans(const DecodingOrder& order) {
  std::vector<std::pair<int, int>> spans;
  for (const auto& group : order.tie_groups) {
    auto it = std::find(order.perm.begin(), order.perm.end(), group.front());
    const int begin = static_cast<int>(it - order.perm.begin());
    spans.emplace_back(begin, begin + static_cast<int>(group.size()));
  }
  return spans;
}

}  // namespace

RateRegion RateRegion::FromPower(std::span<const double> gamma,
                                 std::span<const double> power,
                                 double bandwidth_hz) {
  if (gamma.size() != power.size()) {
    throw std::invalid_argument("gamma and power sizes differ");
  }
  RateRegion region;
  region.bandwidth_hz = bandwidth_hz;
  region.snr.resize(gamma.size());
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    region.snr[k] = std::max(gamma[k] * power[k], 0.0);
  }
  return region;
}

double subset_capacity(const RateRegion& region, std::span<const int> users) {
  const int k_users = region.num_users();
  std::vector<bool> seen(k_users, false);
  double sum = 0.0;
  for (int u : users) {
    if (u < 0 || u >= k_users || seen[u]) {
      throw std::out_of_range("invalid or repeated user index");
    }
    seen[u] = true;
    sum += region.snr[u];
  }
  return Capacity(region.bandwidth_hz, sum);
}

double subset_capacity(const RateRegion& region, std::uint64_t mask) {
  const int k_users = region.num_users();
  if (k_users < 64 && (mask >> k_users) != 0) {
    throw std::out_of_range("subset mask names a missing user");
  }
  double sum = 0.0;
  for (int k = 0; k < k_users; ++k) {
    if (mask & (std::uint64_t{1} << k)) sum += region.snr[k];
  }
  return Capacity(region.bandwidth_hz, sum);
}

std::vector<double> vertex_rates(const RateRegion& region,
                                 std::span<const int> order) {
  const int k_users = region.num_users();
  CheckPermutation(order, k_users);
  std::vector<double> rates(k_users, 0.0);
  double before = 0.0;
  for (int user : order) {
    const double after = before + region.snr[user];
    rates[user] = region.bandwidth_hz * (std::log2(1.0 + after) - std::log2(1.0 + before));
    before = after;
  }
  return rates;
}

DecodingOrder optimal_order(std::span<const double> mu) {
  for (double m : mu) {
    if (!std::isfinite(m) || m < 0.0) {
      throw std::invalid_argument("multipliers must be finite and nonnegative");
    }
  }
  DecodingOrder out;
  out.perm.resize(mu.size());
  std::iota(out.perm.begin(), out.perm.end(), 0);
  std::stable_sort(out.perm.begin(), out.perm.end(),
                   [&mu](int a, int b) { return mu[a] > mu[b]; });
  std::vector<int> group;
  auto flush = [&]() {
    if (group.size() >= 2) out.tie_groups.push_back(group);
    group.clear();
  };
  for (std::size_t i = 0; i < out.perm.size(); ++i) {
    const int user = out.perm[i];
    if (!group.empty()) {
      const double prev = mu[group.back()];
      const double cur = mu[user];
      if (prev - cur > kTieTolerance * std::max(prev, cur)) flush();
    }
    group.push_back(user);
  }
  flush();
  return out;
}

WeightedRateResult weighted_rate_max(const RateRegion& region,
                                     std::span<const double> mu) {
  if (static_cast<int>(mu.size()) != region.num_users()) {
    throw std::invalid_argument("one multiplier per user is required");
  }
  WeightedRateResult out;
  out.order = optimal_order(mu);
  out.rates = vertex_rates(region, out.order.perm);
  for (std::size_t k = 0; k < mu.size(); ++k) out.objective += mu[k] * out.rates[k];
  return out;
}

double max_region_violation(const RateRegion& region,
                            std::span<const double> rates) {
  const int k_users = region.num_users();
  if (static_cast<int>(rates.size()) != k_users) {
    throw std::invalid_argument("one rate per user is required");
  }
  if (k_users > kMaxMembershipUsers) {
    throw std::invalid_argument("too many users for exhaustive subset checks");
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (double r : rates) worst = std::max(worst, -r);
  const std::uint64_t full = (std::uint64_t{1} << k_users) - 1;
  for (std::uint64_t mask = 1; mask <= full; ++mask) {
    double sum_rate = 0.0;
    double sum_snr = 0.0;
    for (int k = 0; k < k_users; ++k) {
      if (mask & (std::uint64_t{1} << k)) {
        sum_rate += rates[k];
        sum_snr += region.snr[k];
      }
    }
    worst = std::max(worst, sum_rate - Capacity(region.bandwidth_hz, sum_snr));
  }
  return worst;
}

bool membership(const RateRegion& region, std::span<const double> rates,
                double tol) {
  const int k_users = region.num_users();
  if (k_users > kMaxMembershipUsers) {
    throw std::invalid_argument("too many users for exhaustive subset checks");
  }
  const double scale =
      std::max(1.0, subset_capacity(region, (std::uint64_t{1} << k_users) - 1));
  return max_region_violation(region, rates) <= tol * scale;
}

TimeSharingResult time_sharing(std::span<const double> bits, double tx_time_s,
                               const std::vector<std::vector<double>>& vertices) {
  const int k_users = static_cast<int>(bits.size());
  const int n = static_cast<int>(vertices.size());
  TimeSharingResult out;
  if (n == 0 || !(tx_time_s >= 0.0)) return out;
  for (const auto& v : vertices) {
    if (static_cast<int>(v.size()) != k_users) {
      throw std::invalid_argument("vertex length differs from user count");
    }
  }
  convex::LinearProgram lp;
  lp.cost = Eigen::VectorXd::Ones(n);
  lp.a_ub = Eigen::MatrixXd::Zero(k_users + 1, n);
  lp.b_ub = Eigen::VectorXd::Zero(k_users + 1);
  // Rows scaled by the user's demand so the tolerances are relative.
  for (int k = 0; k < k_users; ++k) {
    const double scale = std::max(bits[k], 1.0);
    for (int j = 0; j < n; ++j) lp.a_ub(k, j) = -vertices[j][k] / scale;
    lp.b_ub[k] = -bits[k] / scale;
  }
  lp.a_ub.row(k_users).setOnes();
  lp.b_ub[k_users] = tx_time_s;
  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper = Eigen::VectorXd::Constant(n, tx_time_s);
  const convex::LpResult sol = convex::solve_lp(lp);
  if (sol.status != convex::LpStatus::kOptimal) return out;
  out.status = TimeSharingStatus::kFeasible;
  out.durations.assign(sol.x.data(), sol.x.data() + n);
  out.delivered.assign(k_users, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < k_users; ++k) out.delivered[k] += out.durations[j] * vertices[j][k];
  }
  return out;
}

std::vector<std::vector<int>> tie_group_rotations(const DecodingOrder& order) {
  std::vector<std::vector<int>> out{order.perm};
  for (const auto& [begin, end] : GroupSpans(order)) {
    std::vector<std::vector<int>> next;
    for (const auto& base : out) {
      for (int shift = 0; shift < end - begin; ++shift) {
        std::vector<int> perm = base;
        std::rotate(perm.begin() + begin, perm.begin() + begin + shift,
                    perm.begin() + end);
        next.push_back(std::move(perm));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<std::vector<int>> tie_group_permutations(const DecodingOrder& order) {
  std::vector<std::vector<int>> out{order.perm};
  for (const auto& [begin, end] : GroupSpans(order)) {
    std::vector<std::vector<int>> next;
    for (const auto& base : out) {
      std::vector<int> perm = base;
      std::sort(perm.begin() + begin, perm.begin() + end);
      do {
        next.push_back(perm);
      } while (std::next_permutation(perm.begin() + begin, perm.begin() + end));
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace rismec::noma
