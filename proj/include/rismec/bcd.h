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


// Block coordinate descent over (resources, phases) for the NOMA scheme,
// plus the matching drivers of the TDMA benchmark and the full-offload
// baseline. Every block result is accepted only when the true energy does
// not increase.

#ifndef RISMEC_BCD_H_
#define RISMEC_BCD_H_

#include <cstdint>
#include <string>
#include <vector>

#include "rismec/channel.h"
#include "rismec/dual_solver.h"
#include "rismec/model.h"
#include "rismec/phase_opt.h"
#include "rismec/tdma.h"

namespace rismec::bcd {

enum class Block { kDual, kPhase, kSearch };

const char* BlockName(Block block);

struct TraceEntry {
  int outer = 0;
  Block block = Block::kDual;
  double objective = 0.0;  // J after the block (accepted or not)
  bool accepted = true;
  double wall_ms = 0.0;
};

struct BcdTrace {
  std::vector<TraceEntry> entries;
  std::vector<double> outer_objective;  // J at the end of each outer iteration
  bool converged = false;
};

struct BcdOptions {
  double tol = 1e-4;  // relative change of J between outer iterations
  int max_outer = 30;
  dual::DualOptions dual;
  phase::PhaseOptions phase;
  tdma::SearchOptions search;
};

struct BcdResult {
  bool feasible = true;
  Allocation allocation;
  PhaseVector theta;
  EnergyBreakdown energy;
  BcdTrace trace;
  int iterations = 0;
  std::string note;  // failure reason, prefixed by the failing block
};

// NOMA scheme from theta = PhaseVector::Random(N, seed).
BcdResult solve(const SystemConfig& cfg, const ChannelSet& ch, std::uint64_t seed,
                const BcdOptions& options = {});

// TDMA benchmark: alternating 1-D search on the exact TDMA energy, then the
// TDMA dual solve at the found phases. One trace entry per sweep.
BcdResult solve_tdma(const SystemConfig& cfg, const ChannelSet& ch,
                     std::uint64_t seed, const BcdOptions& options = {});

// Full offloading: phases by 1-D search on the closed-form energy, then the
// dual solve with d = R.
BcdResult solve_full_offload(const SystemConfig& cfg, const ChannelSet& ch,
                             std::uint64_t seed, const BcdOptions& options = {});

}  // namespace rismec::bcd

#endif  // RISMEC_BCD_H_
