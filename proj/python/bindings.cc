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


#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "rismec/bcd.h"
#include "rismec/channel.h"
#include "rismec/dual_solver.h"
#include "rismec/experiments.h"
#include "rismec/model.h"
#include "rismec/noma.h"
#include "rismec/tdma.h"

namespace py = pybind11;
using namespace rismec;

namespace {

py::dict ResultDict(const bcd::BcdResult& r) {
  py::dict d;
  d["feasible"] = r.feasible;
  d["total_j"] = r.energy.total;
  d["local_j"] = r.energy.local;
  d["offload_j"] = r.energy.offload;
  d["theta"] = r.theta.theta;
  d["offload_bits"] = r.allocation.offload_bits;
  d["power_w"] = r.allocation.power_w;
  d["rate_bps"] = r.allocation.rate_bps;
  d["tx_time_s"] = r.allocation.tx_time_s;
  d["order"] = r.allocation.order;
  d["objective_trace"] = r.trace.outer_objective;
  d["converged"] = r.trace.converged;
  d["iterations"] = r.iterations;
  d["note"] = r.note;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Energy-minimal offloading for RIS-aided NOMA edge computing";
  m.attr("__version__") = RISMEC_VERSION;

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init([](int k) { return SystemConfig::Default(k); }),
           py::arg("num_users") = 4)
      .def_readwrite("num_users", &SystemConfig::num_users)
      .def_readwrite("num_antennas", &SystemConfig::num_antennas)
      .def_readwrite("num_elements", &SystemConfig::num_elements)
      .def_readwrite("bandwidth_hz", &SystemConfig::bandwidth_hz)
      .def_readwrite("noise_w", &SystemConfig::noise_w)
      .def_readwrite("latency_s", &SystemConfig::latency_s)
      .def_readwrite("capacitance", &SystemConfig::capacitance)
      .def_readwrite("task_bits", &SystemConfig::task_bits)
      .def_readwrite("cycles_per_bit", &SystemConfig::cycles_per_bit)
      .def_readwrite("local_cpu_hz", &SystemConfig::local_cpu_hz)
      .def_readwrite("edge_cpu_hz", &SystemConfig::edge_cpu_hz)
      .def_readwrite("max_power_w", &SystemConfig::max_power_w)
      .def("set_task_bits", &SystemConfig::SetTaskBits)
      .def("validate", &SystemConfig::Validate);

  py::class_<PlacementScenario>(m, "PlacementScenario")
      .def(py::init<>())
      .def_property(
          "ris", [](const PlacementScenario& s) { return py::make_tuple(s.ris.x, s.ris.y); },
          [](PlacementScenario& s, std::pair<double, double> p) { s.ris = {p.first, p.second}; })
      .def_property(
          "user_positions",
          [](const PlacementScenario& s) {
            std::vector<std::pair<double, double>> out;
            for (const Point& p : s.user_positions) out.emplace_back(p.x, p.y);
            return out;
          },
          [](PlacementScenario& s, const std::vector<std::pair<double, double>>& pts) {
            s.user_positions.clear();
            for (const auto& [x, y] : pts) s.user_positions.push_back({x, y});
          })
      .def_readwrite("shadow_std_db", &PlacementScenario::shadow_std_db)
      .def_readwrite("seed", &PlacementScenario::seed);

  py::class_<ChannelSet>(m, "ChannelSet")
      .def_readonly("direct", &ChannelSet::direct)
      .def_readonly("reflect", &ChannelSet::reflect)
      .def_readonly("bs_ris", &ChannelSet::bs_ris)
      .def_property_readonly("num_users", &ChannelSet::num_users)
      .def_property_readonly("num_elements", &ChannelSet::num_elements);

  m.def("sample_channels", &sample_channels, py::arg("cfg"), py::arg("scenario"));
  m.def(
      "effective_gain",
      [](const ChannelSet& ch, const Eigen::VectorXd& theta, int k) {
        return effective_gain(ch, PhaseVector::FromAngles(theta), k);
      },
      py::arg("channels"), py::arg("theta"), py::arg("user"));
  m.def(
      "snr_coefficients",
      [](const ChannelSet& ch, const Eigen::VectorXd& theta, double noise_w) {
        return snr_coefficients(ch, PhaseVector::FromAngles(theta), noise_w);
      },
      py::arg("channels"), py::arg("theta"), py::arg("noise_w"));

  m.def(
      "weighted_rate_max",
      [](const std::vector<double>& snr, const std::vector<double>& mu, double bandwidth_hz) {
        noma::RateRegion region{snr, bandwidth_hz};
        const noma::WeightedRateResult r = noma::weighted_rate_max(region, mu);
        return py::make_tuple(r.order.perm, r.rates, r.objective);
      },
      py::arg("snr"), py::arg("mu"), py::arg("bandwidth_hz") = 1.0,
      "Returns (decoding order, rates, sum mu r); order[0] is decoded last.");

  m.def(
      "solve_given_phases",
      [](const SystemConfig& cfg, const std::vector<double>& gamma) {
        const dual::SolveReport r = dual::solve_given_phases(cfg, gamma);
        py::dict d;
        d["feasible"] = r.feasible;
        d["converged"] = r.converged;
        d["total_j"] = r.energy.total;
        d["gap"] = r.gap;
        d["iterations"] = r.iterations;
        d["offload_bits"] = r.allocation.offload_bits;
        d["power_w"] = r.allocation.power_w;
        d["tx_time_s"] = r.allocation.tx_time_s;
        d["lambda"] = r.duals.lambda;
        d["mu"] = r.duals.mu;
        return d;
      },
      py::arg("cfg"), py::arg("gamma"));

  m.def("full_local_energy", &tdma::full_local_energy, py::arg("cfg"));
  m.def(
      "solve_noma",
      [](const SystemConfig& cfg, const ChannelSet& ch, std::uint64_t seed) {
        py::gil_scoped_release release;
        bcd::BcdResult r = bcd::solve(cfg, ch, seed);
        py::gil_scoped_acquire acquire;
        return ResultDict(r);
      },
      py::arg("cfg"), py::arg("channels"), py::arg("seed") = 1);
  m.def(
      "solve_tdma",
      [](const SystemConfig& cfg, const ChannelSet& ch, std::uint64_t seed) {
        py::gil_scoped_release release;
        bcd::BcdResult r = bcd::solve_tdma(cfg, ch, seed);
        py::gil_scoped_acquire acquire;
        return ResultDict(r);
      },
      py::arg("cfg"), py::arg("channels"), py::arg("seed") = 1);
  m.def(
      "solve_full_offload",
      [](const SystemConfig& cfg, const ChannelSet& ch, std::uint64_t seed) {
        py::gil_scoped_release release;
        bcd::BcdResult r = bcd::solve_full_offload(cfg, ch, seed);
        py::gil_scoped_acquire acquire;
        return ResultDict(r);
      },
      py::arg("cfg"), py::arg("channels"), py::arg("seed") = 1);

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const exp::ExperimentConfig config = exp::ParseConfig(config_json);
        std::vector<exp::Row> rows;
        {
          py::gil_scoped_release release;
          rows = exp::run(config);
        }
        std::ostringstream out;
        exp::WriteRowsCsv(rows, out);
        return out.str();
      },
      py::arg("config_json"), "Runs a JSON experiment config and returns the CSV text.");
}
