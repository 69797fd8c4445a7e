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

// Large-scale geometry plus Rayleigh small-scale fading for the BS, the RIS
// and K single-antenna users, and the combined direct plus reflected gain
//
//   g_k(theta) = || hD_k + (h_k^H Theta G)^H ||^2,
//   Theta = diag(exp(i theta_1), ..., exp(i theta_N)).

#ifndef RISMEC_CHANNEL_H_
#define RISMEC_CHANNEL_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rismec/model.h"

namespace rismec {

struct Point {
  double x = 0.0;  // m
  double y = 0.0;  // m
};

double Distance(const Point& a, const Point& b);

enum class LinkModel { kRisLeg, kDirect };

// 128 + 37.6 log10(d) for RIS legs and 128 + 45 log10(d) for the direct
// link, d in km. Throws std::domain_error for d <= 0.
double pathloss_db(double distance_km, LinkModel model);

struct PlacementScenario {
  Point bs{0.0, 0.0};
  Point ris{700.0, 200.0};
  Point user_area_center{1400.0, 0.0};
  double user_area_side_m = 100.0;
  // Explicit coordinates; when empty users are drawn uniformly in the square.
  std::vector<Point> user_positions;
  double shadow_std_db = 8.0;
  bool shadow_direct = true;
  bool shadow_reflect = true;
  bool shadow_bs_ris = true;
  std::uint64_t seed = 1;

  // Throws std::invalid_argument on a non-positive side or a position list
  // whose length differs from `num_users`.
  void Validate(int num_users) const;
};

// Users' coordinates: the explicit list or seeded uniform draws.
std::vector<Point> user_positions(int num_users,
                                  const PlacementScenario& scenario);

struct ChannelSet {
  std::vector<Eigen::VectorXcd> direct;   // hD_k, length M
  std::vector<Eigen::VectorXcd> reflect;  // h_k, length N (RIS to user k)
  Eigen::MatrixXcd bs_ris;                // G, N x M

  int num_users() const { return static_cast<int>(direct.size()); }
  int num_antennas() const;
  int num_elements() const { return static_cast<int>(bs_ris.rows()); }
};

struct PhaseVector {
  Eigen::VectorXd theta;  // radians in [0, 2 pi)

  int size() const { return static_cast<int>(theta.size()); }
  // exp(i theta_n), unit modulus by construction.
  Eigen::VectorXcd unit() const;

  static PhaseVector Zero(int num_elements);
  // Uniform on [0, 2 pi), drawn from the phase-initialization substream.
  static PhaseVector Random(int num_elements, std::uint64_t seed);
  // Wraps every angle into [0, 2 pi).
  static PhaseVector FromAngles(const Eigen::VectorXd& angles);
};

// Entry = sqrt(10^(-(PL + X)/10)) * CN(0, 1), with X ~ N(0, shadow_std_db^2)
// drawn once per link. Pure function of (cfg, scenario).
ChannelSet sample_channels(const SystemConfig& cfg,
                           const PlacementScenario& scenario);

// Throws std::invalid_argument on mismatched dimensions or a bad index.
double effective_gain(const ChannelSet& ch, const PhaseVector& phases, int k);

// gamma_k = g_k / sigma^2. Throws std::invalid_argument for sigma^2 <= 0.
double snr_coefficient(const ChannelSet& ch, const PhaseVector& phases, int k,
                       double noise_w);
std::vector<double> snr_coefficients(const ChannelSet& ch,
                                     const PhaseVector& phases, double noise_w);

}  // namespace rismec

#endif  // RISMEC_CHANNEL_H_
