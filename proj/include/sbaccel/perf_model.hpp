// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "sbaccel/accel_config.hpp"
#include "sbaccel/driver.hpp"
#include "sbaccel/ref_kernel.hpp"
#include "sbaccel/simulator.hpp"

namespace sbaccel::perf {

// Scalar CPU baseline. Defaults describe a 650 MHz dual-core host at one
// MAC per cycle per core; this is a modeling assumption, not a measured
// NEON throughput.
struct BaselineModel {
  double clock_mhz = 650.0;
  std::uint32_t cores = 2;
  double macs_per_cycle = 1.0;
};

// Closed-form unit cycles for the driver's program over `plan`. Equals the
// simulator's counters for the same plan and config.
sim::UnitCycles predict_cycles(const driver::TilingPlan& plan, const sim::AcceleratorConfig& cfg);

struct SpeedupEstimate {
  std::uint64_t accel_cycles = 0;
  double accel_time_us = 0.0;
  double baseline_time_us = 0.0;
  double ratio = 0.0;  // baseline / accelerator
};

SpeedupEstimate estimate_speedup(const kernel::QuantMatMulDims& dims,
                                 const sim::AcceleratorConfig& cfg,
                                 const BaselineModel& baseline = {});

struct BenchRow {
  std::string label;
  std::uint64_t sim_cycles = 0;
  double modeled_us = 0.0;
  SpeedupEstimate estimate;
};

// Printed above every bench table; the speedup column is a model output.
std::string modeled_speedup_caveat(const BaselineModel& baseline = {});

std::string format_bench_report(const kernel::QuantMatMulDims& dims, std::span<const BenchRow> rows,
                                const BaselineModel& baseline = {});

}  // namespace sbaccel::perf
