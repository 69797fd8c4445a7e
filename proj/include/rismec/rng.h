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

// Deterministic, splittable random streams.
//
// A stream is identified by (seed, tag, index). Its 64-bit state is derived
// with SplitMix64 and drives a std::mt19937_64 engine. Normals come from an
// explicit Box-Muller transform rather than std::normal_distribution, whose
// algorithm is implementation defined, so draws are identical across
// standard libraries.

#ifndef RISMEC_RNG_H_
#define RISMEC_RNG_H_

#include <complex>
#include <cstdint>
#include <random>

namespace rismec::rng {

// One SplitMix64 output step applied to `x`.
std::uint64_t SplitMix64(std::uint64_t x);

// Seed of the substream (seed, tag, index).
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t tag,
                         std::uint64_t index);

// Substream tags. Keeping them fixed means adding RIS elements never shifts
// the draws of the direct links.
enum class Tag : std::uint64_t {
  kDirectFading = 1,
  kReflectFading = 2,
  kBsRisFading = 3,
  kDirectShadow = 4,
  kReflectShadow = 5,
  kBsRisShadow = 6,
  kUserPlacement = 7,
  kPhaseInit = 8,
  kTestData = 9,
};

class Stream {
 public:
  Stream(std::uint64_t seed, Tag tag, std::uint64_t index = 0);

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  double Normal();
  // Circularly symmetric complex Gaussian with unit variance.
  std::complex<double> ComplexNormal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rismec::rng

#endif  // RISMEC_RNG_H_
