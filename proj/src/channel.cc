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
#include <numbers>
#include <stdexcept>

#include "rismec/rng.h"

namespace rismec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double LinkAmplitude(double pathloss, double shadow_db) {
  return std::sqrt(std::pow(10.0, -(pathloss + shadow_db) / 10.0));
}

double ShadowDraw(const PlacementScenario& s, bool enabled, rng::Tag tag,
                  std::uint64_t index) {
  if (!enabled || s.shadow_std_db == 0.0) return 0.0;
  rng::Stream stream(s.seed, tag, index);
  return s.shadow_std_db * stream.Normal();
}

}  // namespace

double Distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double pathloss_db(double distance_km, LinkModel model) {
  if (!(distance_km > 0.0)) throw std::domain_error("distance must be positive");
  const double slope = model == LinkModel::kDirect ? 45.0 : 37.6;
  return 128.0 + slope * std::log10(distance_km);
}

void PlacementScenario::Validate(int num_users) const {
  if (!(user_area_side_m > 0.0)) {
    throw std::invalid_argument("user area side must be positive");
  }
  if (!user_positions.empty() &&
      static_cast<int>(user_positions.size()) != num_users) {
    throw std::invalid_argument("user_positions must list every user");
  }
  if (shadow_std_db < 0.0) throw std::invalid_argument("shadow std must be >= 0");
}

std::vector<Point> user_positions(int num_users,
                                  const PlacementScenario& scenario) {
  scenario.Validate(num_users);
  if (!scenario.user_positions.empty()) return scenario.user_positions;
  std::vector<Point> out(num_users);
  const double half = scenario.user_area_side_m / 2.0;
  for (int k = 0; k < num_users; ++k) {
    rng::Stream stream(scenario.seed, rng::Tag::kUserPlacement, k);
    out[k].x = scenario.user_area_center.x + stream.Uniform(-half, half);
    out[k].y = scenario.user_area_center.y + stream.Uniform(-half, half);
  }
  return out;
}

int ChannelSet::num_antennas() const {
  return direct.empty() ? static_cast<int>(bs_ris.cols())
                        : static_cast<int>(direct.front().size());
}

Eigen::VectorXcd PhaseVector::unit() const {
  Eigen::VectorXcd u(theta.size());
  for (Eigen::Index n = 0; n < theta.size(); ++n) u[n] = std::polar(1.0, theta[n]);
  return u;
}

PhaseVector PhaseVector::Zero(int num_elements) {
  return {Eigen::VectorXd::Zero(num_elements)};
}

PhaseVector PhaseVector::Random(int num_elements, std::uint64_t seed) {
  rng::Stream stream(seed, rng::Tag::kPhaseInit, 0);
  PhaseVector out{Eigen::VectorXd(num_elements)};
  for (int n = 0; n < num_elements; ++n) out.theta[n] = stream.Uniform(0.0, kTwoPi);
  return out;
}

PhaseVector PhaseVector::FromAngles(const Eigen::VectorXd& angles) {
  PhaseVector out{angles};
  for (Eigen::Index n = 0; n < angles.size(); ++n) {
    double a = std::fmod(angles[n], kTwoPi);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    out.theta[n] = a;
  }
  return out;
}

ChannelSet sample_channels(const SystemConfig& cfg,
                           const PlacementScenario& scenario) {
  cfg.Validate();
  const int k_users = cfg.num_users;
  const int m = cfg.num_antennas;
  const int n = cfg.num_elements;
  const std::vector<Point> users = user_positions(k_users, scenario);
  ChannelSet ch;
  ch.direct.resize(k_users);
  ch.reflect.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    const double pl_direct =
        pathloss_db(Distance(users[k], scenario.bs) / 1e3, LinkModel::kDirect);
    const double amp_direct = LinkAmplitude(
        pl_direct, ShadowDraw(scenario, scenario.shadow_direct,
                              rng::Tag::kDirectShadow, k));
    rng::Stream fading(scenario.seed, rng::Tag::kDirectFading, k);
    ch.direct[k].resize(m);
    for (int a = 0; a < m; ++a) ch.direct[k][a] = amp_direct * fading.ComplexNormal();

    ch.reflect[k].resize(n);
    if (n > 0) {
      const double pl_reflect = pathloss_db(
          Distance(users[k], scenario.ris) / 1e3, LinkModel::kRisLeg);
      const double amp_reflect = LinkAmplitude(
          pl_reflect, ShadowDraw(scenario, scenario.shadow_reflect,
                                 rng::Tag::kReflectShadow, k));
      rng::Stream rf(scenario.seed, rng::Tag::kReflectFading, k);
      for (int e = 0; e < n; ++e) ch.reflect[k][e] = amp_reflect * rf.ComplexNormal();
    }
  }
  ch.bs_ris.resize(n, m);
  if (n > 0) {
    const double pl = pathloss_db(Distance(scenario.bs, scenario.ris) / 1e3,
                                  LinkModel::kRisLeg);
    const double amp = LinkAmplitude(
        pl, ShadowDraw(scenario, scenario.shadow_bs_ris, rng::Tag::kBsRisShadow, 0));
    // Row-wise substreams keep G's first rows fixed as N grows.
    for (int e = 0; e < n; ++e) {
      rng::Stream row(scenario.seed, rng::Tag::kBsRisFading, e);
      for (int a = 0; a < m; ++a) ch.bs_ris(e, a) = amp * row.ComplexNormal();
    }
  }
  return ch;
}

double effective_gain(const ChannelSet& ch, const PhaseVector& phases, int k) {
  if (k < 0 || k >= ch.num_users()) throw std::invalid_argument("bad user index");
  const Eigen::VectorXcd& hd = ch.direct[k];
  const Eigen::VectorXcd& h = ch.reflect[k];
  const int n = ch.num_elements();
  if (h.size() != n || phases.size() != n || ch.bs_ris.cols() != hd.size()) {
    throw std::invalid_argument("channel and phase dimensions disagree");
  }
  if (n == 0) return hd.squaredNorm();
  // (h^H Theta G)^H = G^H (conj(Theta) h).
  Eigen::VectorXcd weighted(n);
  for (int e = 0; e < n; ++e) weighted[e] = std::polar(1.0, -phases.theta[e]) * h[e];
  return (hd + ch.bs_ris.adjoint() * weighted).squaredNorm();
}

double snr_coefficient(const ChannelSet& ch, const PhaseVector& phases, int k,
                       double noise_w) {
  if (!(noise_w > 0.0)) throw std::invalid_argument("noise power must be positive");
  return effective_gain(ch, phases, k) / noise_w;
}

std::vector<double> snr_coefficients(const ChannelSet& ch,
                                     const PhaseVector& phases, double noise_w) {
  std::vector<double> out(ch.num_users());
  for (int k = 0; k < ch.num_users(); ++k) {
    out[k] = snr_coefficient(ch, phases, k, noise_w);
  }
  return out;
}

}  // namespace rismec
