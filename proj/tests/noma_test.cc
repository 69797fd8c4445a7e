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
#include <random>

#include <gtest/gtest.h>

namespace rismec::noma {
namespace {

constexpr double kB = 1e6;

TEST(SubsetCapacityTest, Examples) {
  const RateRegion one{{1.0}, kB};
  EXPECT_EQ(subset_capacity(one, std::uint64_t{0}), 0.0);
  EXPECT_DOUBLE_EQ(subset_capacity(one, std::uint64_t{1}), kB);
  const RateRegion two{{1.0, 2.0}, kB};
  const std::vector<int> both = {0, 1};
  EXPECT_DOUBLE_EQ(subset_capacity(two, both), 2.0 * kB);
  const std::vector<int> repeated = {1, 1};
  EXPECT_THROW(subset_capacity(two, repeated), std::out_of_range);
}

TEST(RateRegionTest, FromPower) {
  const std::vector<double> g = {2.0, 4.0}, p = {0.5, 0.25};
  const RateRegion r = RateRegion::FromPower(g, p, kB);
  EXPECT_DOUBLE_EQ(r.snr[0], 1.0);
  EXPECT_DOUBLE_EQ(r.snr[1], 1.0);
}

TEST(VertexRatesTest, Examples) {
  const RateRegion two{{1.0, 2.0}, kB};
  const std::vector<int> first = {0, 1}, second = {1, 0};
  // order[0] sees no interference.
  auto r = vertex_rates(two, first);
  EXPECT_NEAR(r[0], kB, 1e-6);
  EXPECT_NEAR(r[1], kB, 1e-6);
  r = vertex_rates(two, second);
  EXPECT_NEAR(r[1], kB * std::log2(3.0), 1e-6);
  EXPECT_NEAR(r[0], kB * std::log2(4.0 / 3.0), 1e-6);
  EXPECT_NEAR(r[0] + r[1], 2.0 * kB, 1e-6);
  const RateRegion single{{3.0}, kB};
  const std::vector<int> only = {0};
  EXPECT_DOUBLE_EQ(vertex_rates(single, only)[0], kB * 2.0);
  const std::vector<int> bad = {0, 0};
  EXPECT_THROW(vertex_rates(two, bad), std::invalid_argument);
}

TEST(OptimalOrderTest, DescendingWithTies) {
  const std::vector<double> mu = {0.5, 0.9};
  EXPECT_EQ(optimal_order(mu).perm, (std::vector<int>{1, 0}));
  EXPECT_TRUE(optimal_order(mu).tie_groups.empty());
  const std::vector<double> tied = {1.0, 1.0, 1.0};
  const DecodingOrder o = optimal_order(tied);
  EXPECT_EQ(o.perm, (std::vector<int>{0, 1, 2}));
  ASSERT_EQ(o.tie_groups.size(), 1u);
  EXPECT_EQ(o.tie_groups[0].size(), 3u);
  const std::vector<double> negative = {1.0, -1.0};
  EXPECT_THROW(optimal_order(negative), std::invalid_argument);
}

TEST(WeightedRateMaxTest, MatchesEnumeration) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 3;
    std::vector<double> snr(k), mu(k);
    for (int i = 0; i < k; ++i) {
      snr[i] = std::pow(10.0, 3.0 * u(gen) - 1.0);
      mu[i] = u(gen);
    }
    const RateRegion region{snr, kB};
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    double best = -1.0;
    do {
      std::vector<double> r(k);
      double prev = 1.0;
      for (int i : perm) {
        r[i] = kB * std::log2((prev + snr[i]) / prev);
        prev += snr[i];
      }
      best = std::max(best, std::inner_product(mu.begin(), mu.end(), r.begin(), 0.0));
    } while (std::next_permutation(perm.begin(), perm.end()));
    const WeightedRateResult got = weighted_rate_max(region, mu);
    EXPECT_NEAR(got.objective, best, 1e-10 * best);
    for (int i = 0; i + 1 < k; ++i) {
      EXPECT_GE(mu[got.order.perm[i]], mu[got.order.perm[i + 1]]);
    }
  }
}

TEST(WeightedRateMaxTest, ZeroWeights) {
  const RateRegion region{{1.0, 5.0}, kB};
  const std::vector<double> mu = {0.0, 0.0};
  const WeightedRateResult r = weighted_rate_max(region, mu);
  EXPECT_EQ(r.objective, 0.0);
  EXPECT_EQ(r.order.perm, (std::vector<int>{0, 1}));
}

TEST(MembershipTest, Examples) {
  const RateRegion region{{1.0, 2.0, 0.5}, kB};
  const std::vector<int> order = {2, 0, 1};
  std::vector<double> r = vertex_rates(region, order);
  EXPECT_TRUE(membership(region, r));
  for (double& x : r) x *= 1.01;
  EXPECT_FALSE(membership(region, r));
  EXPECT_GT(max_region_violation(region, r), 0.0);
  const std::vector<double> zero(3, 0.0);
  EXPECT_TRUE(membership(region, zero));
  EXPECT_LE(max_region_violation(region, zero), 0.0);
}

TEST(TimeSharingTest, SymmetricUsersSplitEvenly) {
  const RateRegion region{{1.0, 1.0}, kB};
  const std::vector<int> a = {0, 1}, b = {1, 0};
  const auto ra = vertex_rates(region, a), rb = vertex_rates(region, b);
  const double t = 0.6;
  const std::vector<double> bits = {0.5 * t * (ra[0] + rb[0]), 0.5 * t * (ra[1] + rb[1])};
  const TimeSharingResult ts = time_sharing(bits, t, {ra, rb});
  ASSERT_EQ(ts.status, TimeSharingStatus::kFeasible);
  EXPECT_NEAR(ts.durations[0], t / 2, 1e-9);
  EXPECT_NEAR(ts.durations[1], t / 2, 1e-9);
}

TEST(TimeSharingTest, SingleVertexAndInfeasible) {
  const std::vector<double> r = {2e5, 3e5};
  const std::vector<double> bits = {0.5 * 2e5, 0.5 * 3e5};
  const TimeSharingResult ts = time_sharing(bits, 0.5, {r});
  ASSERT_EQ(ts.status, TimeSharingStatus::kFeasible);
  EXPECT_NEAR(ts.durations[0], 0.5, 1e-12);
  const std::vector<double> too_many = {2e5, 3e5};
  EXPECT_EQ(time_sharing(too_many, 0.5, {r}).status, TimeSharingStatus::kInfeasible);
}

TEST(TieGroupsTest, RotationsAndPermutations) {
  const std::vector<double> mu = {2.0, 1.0, 1.0, 1.0};
  const DecodingOrder o = optimal_order(mu);
  const auto rot = tie_group_rotations(o);
  ASSERT_EQ(rot.size(), 3u);
  EXPECT_EQ(rot[0], o.perm);
  EXPECT_EQ(tie_group_permutations(o).size(), 6u);
}

}  // namespace
}  // namespace rismec::noma
