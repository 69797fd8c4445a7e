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
#include <numbers>

#include <gtest/gtest.h>

namespace rismec::tdma {
namespace {

constexpr double kLn2 = 0.69314718055994530942;

std::vector<double> DefaultGains(SystemConfig& cfg, int seed) {
  cfg = SystemConfig::Default(4);
  PlacementScenario sc;
  sc.seed = seed;
  const ChannelSet ch = sample_channels(cfg, sc);
  return snr_coefficients(ch, PhaseVector::Random(cfg.num_elements, seed), cfg.noise_w);
}

TEST(TdmaRateTest, Examples) {
  const SystemConfig two = SystemConfig::Default(2);
  EXPECT_EQ(tdma_rate(5.0, 0.0, two), 0.0);
  EXPECT_DOUBLE_EQ(tdma_rate(2.0, 0.5, two), 5e5);
  const SystemConfig one = SystemConfig::Default(1);
  EXPECT_DOUBLE_EQ(tdma_rate(3.0, 1.0, one), 2e6);
}

TEST(TdmaClosedFormsTest, OptimalD) {
  SystemConfig cfg = SystemConfig::Default(1);
  cfg.latency_s = 1.0;
  EXPECT_DOUBLE_EQ(tdma_optimal_d(0.0, 0.0, cfg, 0), 1e6);
  EXPECT_NEAR(tdma_optimal_d(0.0, 1.2e-8, cfg, 0), 8e5, 1e-4);
  EXPECT_DOUBLE_EQ(tdma_optimal_d(0.0, 1e30, cfg, 0), 0.0);
}

TEST(TdmaClosedFormsTest, OptimalPower) {
  const SystemConfig cfg = SystemConfig::Default(2);
  const double gamma = 4.0, t = cfg.latency_s, b = cfg.bandwidth_hz;
  EXPECT_EQ(tdma_optimal_p(0.0, gamma, cfg, 0), 0.0);
  const double eta = (0.5 + 1.0 / gamma) * t * 2 * kLn2 / b;
  const double p = tdma_optimal_p(eta, gamma, cfg, 0);
  EXPECT_NEAR(p, 0.5, 1e-12);
  // Stationarity of T p - eta (B/K) log2(1 + gamma p), by grid.
  auto f = [&](double x) { return t * x - eta * b / 2 * std::log2(1 + gamma * x); };
  double best = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    if (f(i / 1e5) < f(best)) best = i / 1e5;
  }
  EXPECT_NEAR(p, best, 1e-5);
  EXPECT_EQ(tdma_optimal_p(100.0 * eta, gamma, cfg, 0), 1.0);
  EXPECT_EQ(tdma_optimal_p(eta, 0.0, cfg, 0), 0.0);
}

TEST(TdmaClosedFormsTest, OptimalRateThreshold) {
  SystemConfig cfg = SystemConfig::Default(1);
  cfg.latency_s = 1.0;
  EXPECT_EQ(tdma_optimal_r(2.0, 1.0, 0.5, 3.0, cfg), 0.0);
  EXPECT_DOUBLE_EQ(tdma_optimal_r(1.0, 2.0, 0.5, 3.0, cfg), tdma_rate(3.0, 0.5, cfg));
  EXPECT_DOUBLE_EQ(tdma_optimal_r(1.0, 1.0, 0.5, 3.0, cfg), tdma_rate(3.0, 0.5, cfg));
}

TEST(TdmaUpdateDualsTest, Arithmetic) {
  SystemConfig cfg = SystemConfig::Default(1);
  cfg.task_bits = {1e8};
  const std::vector<double> gamma = {3.0};
  Allocation a = Allocation::FullLocal(1);
  a.offload_bits = {(cfg.edge_cpu_hz + 1e6) / 1e3};
  a.power_w = {1.0};
  a.tx_time_s = cfg.latency_s;
  a.rate_bps = {tdma_rate(3.0, 1.0, cfg) - 1e3};
  TdmaDualState s;
  s.xi = {0.0};
  s.eta = {1e-7};
  TdmaStepSizes step{1e-9, {0.0}, {1e-11}};
  const TdmaDualState n = tdma_update_duals(s, a, gamma, cfg, step);
  EXPECT_NEAR(n.upsilon, 1e-3, 1e-12);
  EXPECT_NEAR(n.eta[0], 9e-8, 1e-18);

  TdmaDualState zero;
  zero.xi = {0.0};
  zero.eta = {0.0};
  const TdmaDualState same = tdma_update_duals(zero, Allocation::FullLocal(1), gamma, cfg, step);
  EXPECT_EQ(same.upsilon, 0.0);
  EXPECT_EQ(same.xi[0], 0.0);
  EXPECT_EQ(same.eta[0], 0.0);
}

TEST(TdmaExactTest, MatchesPerUserGrid) {
  SystemConfig cfg = SystemConfig::Default(2);
  const std::vector<double> gamma = {5.0, 40.0};
  const auto point = tdma_exact_active(cfg, gamma);
  ASSERT_TRUE(point.has_value());
  const double t = cfg.latency_s, share = cfg.bandwidth_hz / 2;
  for (int k = 0; k < 2; ++k) {
    const double cap = t * share * std::log2(1 + gamma[k]);
    auto f = [&](double d) {
      const double c = (1e6 - d) * 1e3;
      return 1e-28 * c * c * c / (t * t) + t * std::expm1(kLn2 * d / (t * share)) / gamma[k];
    };
    const double hi = std::min(1e6, cap);
    double best = 0.0;
    for (int i = 0; i <= 200000; ++i) {
      const double d = hi * i / 200000.0;
      if (f(d) < f(best)) best = d;
    }
    EXPECT_NEAR(point->offload_bits[k], best, hi / 200000.0 + 1e-6);
  }
}

TEST(SolveTdmaTest, SingleUserMatchesNoma) {
  for (int seed = 1; seed <= 5; ++seed) {
    SystemConfig cfg = SystemConfig::Default(1);
    PlacementScenario sc;
    sc.seed = seed;
    const ChannelSet ch = sample_channels(cfg, sc);
    const auto gamma = snr_coefficients(ch, PhaseVector::Random(10, seed), cfg.noise_w);
    const double noma = dual::solve_given_phases(cfg, gamma).energy.total;
    const double tdma = solve_tdma_given_phases(cfg, gamma).energy.total;
    EXPECT_NEAR(tdma / noma, 1.0, 1e-4);
  }
}

TEST(SolveTdmaTest, ZeroGainsFullLocal) {
  const SystemConfig cfg = SystemConfig::Default(3);
  const std::vector<double> gamma(3, 0.0);
  const TdmaReport r = solve_tdma_given_phases(cfg, gamma);
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.allocation.tx_time_s, 0.0);
  EXPECT_NEAR(r.energy.total, full_local_energy(cfg), 1e-12);
}

TEST(SolveTdmaTest, DefaultScenarioNotBelowNoma) {
  for (int seed = 1; seed <= 3; ++seed) {
    SystemConfig cfg;
    const auto gamma = DefaultGains(cfg, seed);
    const TdmaReport t = solve_tdma_given_phases(cfg, gamma);
    const dual::SolveReport n = dual::solve_given_phases(cfg, gamma);
    EXPECT_GE(t.energy.total, n.energy.total * (1 - 1e-6));
    EXPECT_LE(t.best_dual, t.energy.total * (1 + 1e-12));
    EXPECT_TRUE(validate_allocation(t.allocation, cfg, gamma, 1e-6).empty());
    // Rate constraint tight for offloading users at t = T.
    for (int k = 0; k < 4; ++k) {
      if (t.allocation.offload_bits[k] > 0.0 && t.allocation.tx_time_s == cfg.latency_s) {
        const double delivered = t.allocation.tx_time_s *
                                 tdma_rate(gamma[k], t.allocation.power_w[k], cfg);
        EXPECT_NEAR(delivered / t.allocation.offload_bits[k], 1.0, 1e-6);
      }
    }
  }
}

ChannelSet Scalar(std::complex<double> hd, std::complex<double> c) {
  ChannelSet ch;
  ch.direct = {Eigen::VectorXcd::Constant(1, hd)};
  ch.reflect = {Eigen::VectorXcd::Constant(1, {1.0, 0.0})};
  ch.bs_ris = Eigen::MatrixXcd::Constant(1, 1, std::conj(c));
  return ch;
}

TEST(SearchTest, SingleElementAlignment) {
  SystemConfig cfg = SystemConfig::Default(1);
  cfg.num_antennas = 1;
  cfg.num_elements = 1;
  const ChannelSet ch = Scalar({1.8e-8, -2.4e-8}, {3e-8, 4e-8});
  const SearchResult r = alternating_1d_search(cfg, ch, PhaseVector::Zero(1));
  double best_theta = 0.0, best = 0.0;
  for (int i = 0; i < 3600; ++i) {
    const double th = 2 * std::numbers::pi * i / 3600;
    const double g =
        effective_gain(ch, PhaseVector::FromAngles(Eigen::VectorXd::Constant(1, th)), 0);
    if (g > best) best = g, best_theta = th;
  }
  const double diff = std::abs(std::remainder(r.theta.theta[0] - best_theta, 2 * std::numbers::pi));
  EXPECT_LE(diff, 2 * std::numbers::pi / 64);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
}

TEST(SearchTest, NoElements) {
  SystemConfig cfg = SystemConfig::Default(2);
  cfg.num_elements = 0;
  const ChannelSet ch = sample_channels(cfg, PlacementScenario{});
  const SearchResult r = alternating_1d_search(cfg, ch, PhaseVector::Zero(0));
  EXPECT_EQ(r.theta.size(), 0);
  ASSERT_EQ(r.sweep_trace.size(), 1u);
  EXPECT_EQ(r.sweeps, 0);
}

TEST(SearchTest, SweepsStopAndDecrease) {
  SystemConfig cfg = SystemConfig::Default(4);
  cfg.num_elements = 8;
  PlacementScenario sc;
  sc.seed = 5;
  const ChannelSet ch = sample_channels(cfg, sc);
  SearchOptions opt;
  opt.grid_size = 16;
  const SearchResult r = alternating_1d_search(cfg, ch, PhaseVector::Random(8, 5), opt);
  EXPECT_LT(r.sweeps, opt.max_sweeps);
  for (std::size_t i = 1; i < r.sweep_trace.size(); ++i) {
    EXPECT_LE(r.sweep_trace[i], r.sweep_trace[i - 1]);
  }
  EXPECT_NEAR(r.sweep_trace.back(),
              tdma_energy(cfg, snr_coefficients(ch, r.theta, cfg.noise_w)),
              1e-9 * r.sweep_trace.back());
  opt.grid_size = 1;
  EXPECT_THROW(alternating_1d_search(cfg, ch, PhaseVector::Random(8, 5), opt),
               std::invalid_argument);
}

TEST(FullLocalTest, ClosedForm) {
  SystemConfig cfg = SystemConfig::Default(3);
  cfg.latency_s = 1.0;
  EXPECT_NEAR(full_local_energy(cfg), 0.3, 1e-12);
  cfg.latency_s = 0.5;
  EXPECT_NEAR(full_local_energy(cfg), 1.2, 1e-12);
  cfg.task_bits = {0.0, 0.0, 0.0};
  EXPECT_EQ(full_local_energy(cfg), 0.0);
  cfg.task_bits = {1e7, 1e6, 1e6};
  EXPECT_THROW(full_local_energy(cfg), std::domain_error);
}

TEST(FullOffloadTest, SingleUserInversion) {
  SystemConfig cfg = SystemConfig::Default(1);
  cfg.num_elements = 3;
  PlacementScenario sc;
  sc.seed = 2;
  const ChannelSet ch = sample_channels(cfg, sc);
  const PhaseVector ph = PhaseVector::Random(3, 2);
  const double gain = effective_gain(ch, ph, 0);
  const double p = cfg.noise_w * std::expm1(kLn2 * 1e6 / (cfg.bandwidth_hz * 0.6)) / gain;
  const dual::SolveReport r = full_offload_solve(cfg, ch, ph);
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.energy.total / (0.6 * p), 1.0, 1e-6);
  EXPECT_EQ(r.energy.LocalSum(), 0.0);
  const std::vector<double> gamma = {gain / cfg.noise_w};
  EXPECT_NEAR(full_offload_energy(full_offload_config(cfg), gamma) / (0.6 * p), 1.0, 1e-12);
}

TEST(FullOffloadTest, MonotoneInGains) {
  SystemConfig cfg = SystemConfig::Default(3);
  const SystemConfig big = full_offload_config(cfg);
  EXPECT_EQ(big.edge_cpu_hz, 50e9);
  std::vector<double> gamma = {50.0, 20.0, 80.0};
  double prev = INFINITY;
  for (double scale : {1.0, 2.0, 4.0}) {
    std::vector<double> g = gamma;
    for (double& x : g) x *= scale;
    const double e = full_offload_energy(big, g);
    EXPECT_LE(e, prev);
    prev = e;
  }
  gamma[1] = 0.0;
  EXPECT_TRUE(std::isinf(full_offload_energy(big, gamma)));
}

}  // namespace
}  // namespace rismec::tdma
