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


#include "rismec/channel.h"

#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "rismec/rng.h"

namespace rismec {
namespace {

TEST(PathlossTest, QuotedModels) {
  EXPECT_DOUBLE_EQ(pathloss_db(1.0, LinkModel::kRisLeg), 128.0);
  EXPECT_NEAR(pathloss_db(0.1, LinkModel::kRisLeg), 90.4, 1e-12);
  EXPECT_DOUBLE_EQ(pathloss_db(1.0, LinkModel::kDirect), 128.0);
  EXPECT_NEAR(pathloss_db(0.1, LinkModel::kDirect), 83.0, 1e-12);
  EXPECT_THROW(pathloss_db(0.0, LinkModel::kDirect), std::domain_error);
}

TEST(SampleChannelsTest, Deterministic) {
  SystemConfig cfg = SystemConfig::Default(3);
  PlacementScenario sc;
  sc.seed = 17;
  const ChannelSet a = sample_channels(cfg, sc);
  const ChannelSet b = sample_channels(cfg, sc);
  EXPECT_EQ(a.bs_ris, b.bs_ris);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(a.direct[k], b.direct[k]);
    EXPECT_EQ(a.reflect[k], b.reflect[k]);
  }
  sc.seed = 18;
  EXPECT_NE(sample_channels(cfg, sc).bs_ris, a.bs_ris);
  EXPECT_EQ(a.num_antennas(), 4);
  EXPECT_EQ(a.num_elements(), 10);
}

TEST(SampleChannelsTest, UnitVarianceFading) {
  rng::Stream s(5, rng::Tag::kTestData);
  double power = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) power += std::norm(s.ComplexNormal());
  EXPECT_NEAR(power / n, 1.0, 0.02);
}

TEST(SampleChannelsTest, PathlossSlopeOfBsRisLink) {
  // Without shadowing the mean entry power follows the path-loss law.
  auto mean_power = [](double ris_x) {
    SystemConfig cfg = SystemConfig::Default(1);
    cfg.num_elements = 200;
    cfg.num_antennas = 50;
    PlacementScenario sc;
    sc.shadow_std_db = 0.0;
    sc.ris = {ris_x, 0.0};
    sc.seed = 9;
    return sample_channels(cfg, sc).bs_ris.cwiseAbs2().mean();
  };
  const double drop_db = 10.0 * std::log10(mean_power(500.0) / mean_power(1000.0));
  EXPECT_NEAR(drop_db, 37.6 * std::log10(2.0), 0.1);
}

TEST(SampleChannelsTest, UsersInsideSquare) {
  PlacementScenario sc;
  sc.seed = 3;
  const auto pts = user_positions(50, sc);
  for (const Point& p : pts) {
    EXPECT_LE(std::abs(p.x - 1400.0), 50.0);
    EXPECT_LE(std::abs(p.y), 50.0);
  }
  sc.user_positions = {{1.0, 2.0}};
  EXPECT_THROW(sc.Validate(2), std::invalid_argument);
  EXPECT_EQ(user_positions(1, sc)[0].y, 2.0);
}

TEST(EffectiveGainTest, NoRis) {
  SystemConfig cfg = SystemConfig::Default(2);
  cfg.num_elements = 0;
  const ChannelSet ch = sample_channels(cfg, PlacementScenario{});
  for (int k = 0; k < 2; ++k) {
    EXPECT_DOUBLE_EQ(effective_gain(ch, PhaseVector::Zero(0), k), ch.direct[k].squaredNorm());
  }
}

TEST(EffectiveGainTest, SinglePathIgnoresPhase) {
  ChannelSet ch;
  ch.direct = {Eigen::VectorXcd::Zero(1)};
  ch.reflect = {Eigen::VectorXcd::Constant(1, {0.3, -0.4})};
  ch.bs_ris = Eigen::MatrixXcd::Constant(1, 1, {2.0, 1.0});
  const double expected = 0.25 * 5.0;
  for (double th : {0.0, 1.0, 4.0}) {
    EXPECT_NEAR(effective_gain(ch, PhaseVector::FromAngles(Eigen::VectorXd::Constant(1, th)), 0),
                expected, 1e-15);
  }
}

TEST(EffectiveGainTest, MatchesExplicitProduct) {
  SystemConfig cfg = SystemConfig::Default(2);
  cfg.num_elements = 7;
  cfg.num_antennas = 3;
  const ChannelSet ch = sample_channels(cfg, PlacementScenario{});
  const PhaseVector ph = PhaseVector::Random(7, 4);
  for (int k = 0; k < 2; ++k) {
    Eigen::MatrixXcd theta = Eigen::MatrixXcd::Zero(7, 7);
    for (int n = 0; n < 7; ++n) theta(n, n) = std::polar(1.0, ph.theta[n]);
    const Eigen::RowVectorXcd row = ch.reflect[k].adjoint() * theta * ch.bs_ris;
    const double expected = (ch.direct[k] + row.adjoint()).squaredNorm();
    EXPECT_NEAR(effective_gain(ch, ph, k) / expected, 1.0, 1e-12);
  }
  EXPECT_THROW(effective_gain(ch, PhaseVector::Zero(3), 0), std::invalid_argument);
  EXPECT_THROW(effective_gain(ch, ph, 5), std::invalid_argument);
}

TEST(SnrTest, Division) {
  ChannelSet ch;
  ch.direct = {Eigen::VectorXcd::Constant(1, std::sqrt(2e-12))};
  ch.reflect = {Eigen::VectorXcd(0)};
  ch.bs_ris = Eigen::MatrixXcd(0, 1);
  EXPECT_NEAR(snr_coefficient(ch, PhaseVector::Zero(0), 0, 4e-14), 50.0, 1e-9);
  EXPECT_NEAR(snr_coefficient(ch, PhaseVector::Zero(0), 0, 2e-12), 1.0, 1e-12);
  EXPECT_THROW(snr_coefficient(ch, PhaseVector::Zero(0), 0, 0.0), std::invalid_argument);
}

TEST(PhaseVectorTest, WrapsAndSeeds) {
  const PhaseVector p = PhaseVector::FromAngles(Eigen::Vector2d(-0.5, 7.0));
  EXPECT_NEAR(p.theta[0], 2 * std::numbers::pi - 0.5, 1e-12);
  EXPECT_NEAR(p.theta[1], 7.0 - 2 * std::numbers::pi, 1e-12);
  EXPECT_EQ(PhaseVector::Random(5, 1).theta, PhaseVector::Random(5, 1).theta);
  EXPECT_NEAR(std::abs(p.unit()[0]), 1.0, 1e-15);
}

}  // namespace
}  // namespace rismec
