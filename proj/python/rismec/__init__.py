# Copyright 2026 The rismec Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Python bindings for the rismec solvers."""

from rismec._core import (
    ChannelSet,
    PlacementScenario,
    SystemConfig,
    __version__,
    effective_gain,
    full_local_energy,
    run_experiment,
    sample_channels,
    snr_coefficients,
    solve_full_offload,
    solve_given_phases,
    solve_noma,
    solve_tdma,
    weighted_rate_max,
)

__all__ = [
    "ChannelSet",
    "PlacementScenario",
    "SystemConfig",
    "__version__",
    "effective_gain",
    "full_local_energy",
    "run_experiment",
    "sample_channels",
    "snr_coefficients",
    "solve_full_offload",
    "solve_given_phases",
    "solve_noma",
    "solve_tdma",
    "weighted_rate_max",
]
