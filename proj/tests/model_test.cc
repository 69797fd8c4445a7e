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


#include "rismec/model.h"

#include <cmath>
#include <string>

#include <gtest/gtest.h>

namespace rismec {
namespace {

bool Has(const std::vector<Violation>& v, const std::string& name) {
  for (const Violation& x : v) {
    if (x.constraint == name) return true;
  }
  return false;
}

double Residual(const std::vector<Violation>& v, const std::string& name) {
  for (const Violation& x : v) {
    if (x.constraint == name) return x.residual;
  }
  return NAN;
}

TEST(UnitsTest, DbmRoundTrip) {
  EXPECT_DOUBLE_EQ(units::DbmToWatt(30.0), 1.0);
  EXPECT_NEAR(units::WattToDbm(units::DbmToWatt(-17.3)), -17.3, 1e-12);
  // -174 dBm/Hz over 1 MHz is -114 dBm.
  EXPECT_NEAR(units::NoisePowerWatt(1e6), std::pow(10.0, -11.4) * 1e-3, 1e-27);
}

TEST(LocalEnergyTest, ClosedForms) {
  EXPECT_NEAR(local_energy(1e6, 0.0, 1e3, 0.6, 1e-28), 1.0 / 3.6, 1e-12);
  EXPECT_EQ(local_energy(1e6, 1e6, 1e3, 0.6, 1e-28), 0.0);
  EXPECT_NEAR(local_energy(1e6, 5e5, 1e3, 1.0, 1e-28), 0.0125, 1e-15);
}

TEST(LocalEnergyTest, RejectsBadArguments) {
  EXPECT_THROW(local_energy(1e6, 2e6, 1e3, 1.0, 1e-28), std::domain_error);
  EXPECT_THROW(local_energy(1e6, -1.0, 1e3, 1.0, 1e-28), std::domain_error);
  EXPECT_THROW(local_energy(1e6, 0.0, 1e3, 0.0, 1e-28), std::domain_error);
}

TEST(OffloadEnergyTest, Product) {
  EXPECT_DOUBLE_EQ(offload_energy(0.6, 1.0), 0.6);
  EXPECT_EQ(offload_energy(0.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(offload_energy(1.0, 0.25), 0.25);
}

TEST(MinOffloadTest, Examples) {
  SystemConfig cfg = SystemConfig::Default(1);
  EXPECT_EQ(min_offload_bits(cfg)[0], 0.0);
  cfg.local_cpu_hz = {1e9};
  cfg.latency_s = 0.5;
  EXPECT_NEAR(min_offload_bits(cfg)[0], 5e5, 1e-6);
  cfg.local_cpu_hz = {1e30};
  EXPECT_EQ(min_offload_bits(cfg)[0], 0.0);
}

TEST(TotalEnergyTest, Examples) {
  SystemConfig cfg = SystemConfig::Default(3);
  cfg.latency_s = 1.0;
  Allocation a = Allocation::FullLocal(3);
  EXPECT_NEAR(total_energy(a, cfg).total, 0.3, 1e-12);
  a.offload_bits = cfg.task_bits;
  a.power_w = {0.3, 0.7, 0.1};
  EXPECT_EQ(total_energy(a, cfg).total, 0.0);

  SystemConfig one = SystemConfig::Default(1);
  Allocation b = Allocation::FullLocal(1);
  b.tx_time_s = 0.6;
  b.power_w = {1.0};
  const EnergyBreakdown e = total_energy(b, one);
  EXPECT_NEAR(e.total, 1.0 / 3.6 + 0.6, 1e-12);
  EXPECT_NEAR(e.LocalSum(), 1.0 / 3.6, 1e-12);
  EXPECT_NEAR(e.OffloadSum(), 0.6, 1e-15);
}

TEST(ValidateTest, FullLocalIsClean) {
  const SystemConfig cfg = SystemConfig::Default(4);
  const std::vector<double> snr(4, 1e3);
  EXPECT_TRUE(validate_allocation(Allocation::FullLocal(4), cfg, snr, 1e-9).empty());
}

TEST(ValidateTest, ReportsOffloadAboveTask) {
  const SystemConfig cfg = SystemConfig::Default(2);
  Allocation a = Allocation::FullLocal(2);
  a.offload_bits[1] = cfg.task_bits[1] + 1.0;
  const auto v = validate_allocation(a, cfg, {}, 0.0);
  ASSERT_TRUE(Has(v, "offload_upper"));
  EXPECT_NEAR(Residual(v, "offload_upper"), 1.0, 1e-9);
}

TEST(ValidateTest, ReportsEdgeCapacity) {
  SystemConfig cfg = SystemConfig::Default(2);
  cfg.task_bits = {2e7, 2e7};
  Allocation a = Allocation::FullLocal(2);
  const double bits = (cfg.edge_cpu_hz + 1e6) / 1e3 / 2.0;
  a.offload_bits = {bits, bits};
  const auto v = validate_allocation(a, cfg, {}, 0.0);
  ASSERT_TRUE(Has(v, "edge_capacity"));
  EXPECT_NEAR(Residual(v, "edge_capacity"), 1e6, 1e-3);
}

TEST(ValidateTest, ReportsDeliveryAndRegion) {
  const SystemConfig cfg = SystemConfig::Default(2);
  Allocation a = Allocation::FullLocal(2);
  a.offload_bits = {1e5, 1e5};
  a.tx_time_s = 0.6;
  a.power_w = {1.0, 1.0};
  a.rate_bps = {1e5, 1e5};  // 6e4 bits delivered
  const std::vector<double> snr = {1.0, 1.0};  // f(full) = log2(3) MHz
  const auto v = validate_allocation(a, cfg, snr, 1e-9);
  EXPECT_TRUE(Has(v, "delivery"));
  EXPECT_FALSE(Has(v, "rate_region"));
  a.rate_bps = {1.2e6, 1.2e6};
  EXPECT_TRUE(Has(validate_allocation(a, cfg, snr, 1e-9), "rate_region"));
}

TEST(ValidateTest, ReportsPowerAndLatency) {
  const SystemConfig cfg = SystemConfig::Default(1);
  Allocation a = Allocation::FullLocal(1);
  a.power_w = {2.0};
  a.tx_time_s = 1.0;
  const auto v = validate_allocation(a, cfg, {}, 1e-9);
  EXPECT_TRUE(Has(v, "power_cap"));
  EXPECT_TRUE(Has(v, "latency"));
}

TEST(SystemConfigTest, ValidateRejects) {
  SystemConfig cfg = SystemConfig::Default(2);
  EXPECT_NO_THROW(cfg.Validate());
  cfg.task_bits.pop_back();
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
  EXPECT_THROW(SystemConfig::Default(0), std::invalid_argument);
}

}  // namespace
}  // namespace rismec
