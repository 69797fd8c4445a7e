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

#include "rismec/rng.h"

#include <cmath>
#include <numbers>

namespace rismec::rng {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t tag,
                         std::uint64_t index) {
  return SplitMix64(SplitMix64(SplitMix64(seed) ^ tag) ^ index);
}

Stream::Stream(std::uint64_t seed, Tag tag, std::uint64_t index)
    : engine_(DeriveSeed(seed, static_cast<std::uint64_t>(tag), index)) {}

double Stream::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Stream::Normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::complex<double> Stream::ComplexNormal() {
  const double re = Normal();
  const double im = Normal();
  return {re * std::sqrt(0.5), im * std::sqrt(0.5)};
}

}  // namespace rismec::rng
