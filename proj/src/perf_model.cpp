// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include "sbaccel/perf_model.hpp"

#include <iomanip>
#include <sstream>

#include "sbaccel/error.hpp"
#include "sbaccel/isa.hpp"

namespace sbaccel::perf {

namespace {

constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

sim::UnitCycles predict_cycles(const driver::TilingPlan& plan, const sim::AcceleratorConfig& cfg) {
  const std::uint64_t width = cfg.stream_width_bits;
  const std::uint64_t dot = sim::sbvp_dot_cycles(cfg);
  sim::UnitCycles c;
  const driver::TileBlock* prev = nullptr;
  for (const auto& b : plan.blocks) {
    const std::uint64_t mk = b.m_cnt * b.k_cnt;
    const std::uint64_t nk = b.n_cnt * b.k_cnt;
    const std::uint64_t mn = b.m_cnt * b.n_cnt;

    c.decoder += 1 + ceil_div(3 * 32, width);  // CONFIG
    c.decoder += 1 + ceil_div(32, width);      // LOAD_W
    c.mapper += ceil_div(nk * isa::kWeightPayloadBytes * 8, width);
    if (prev == nullptr || !driver::reuses_inputs(*prev, b)) {
      c.decoder += 1 + ceil_div(32, width);  // LOAD_X
      c.mapper += ceil_div(mk * isa::kInputPayloadBytes * 8, width);
    }
    c.decoder += 1;  // COMPUTE
    c.sbvp += mn * b.k_cnt * dot;
    c.scheduler += mn * b.k_cnt;
    if (plan.last_k_chunk(b)) {
      c.decoder += 1;  // STORE
      c.scheduler += ceil_div(32 * mn, width);
    }
    prev = &b;
  }
  c.decoder += 1;  // HALT
  return c;
}

SpeedupEstimate estimate_speedup(const kernel::QuantMatMulDims& dims,
                                 const sim::AcceleratorConfig& cfg, const BaselineModel& baseline) {
  if (dims.m == 0 || dims.n == 0 || dims.k == 0) {
    throw Error(ErrorKind::domain, "speedup is undefined for a MatMul with no work");
  }
  if (!(baseline.clock_mhz > 0.0) || baseline.cores == 0 || !(baseline.macs_per_cycle > 0.0)) {
    throw Error(ErrorKind::domain, "baseline model parameters must be positive");
  }
  const auto plan = driver::plan_tiling(dims, cfg);
  SpeedupEstimate e;
  e.accel_cycles = predict_cycles(plan, cfg).total();
  e.accel_time_us = static_cast<double>(e.accel_cycles) / cfg.clock_mhz;
  const double macs = static_cast<double>(dims.m) * static_cast<double>(dims.n) *
                      static_cast<double>(dims.k);
  e.baseline_time_us = macs / (baseline.macs_per_cycle * baseline.clock_mhz * baseline.cores);
  e.ratio = e.baseline_time_us / e.accel_time_us;
  return e;
}

std::string modeled_speedup_caveat(const BaselineModel& baseline) {
  std::ostringstream out;
  out << "# caveat: modeled_speedup is a cycle-model estimate against a scalar baseline ("
      << baseline.clock_mhz << " MHz, " << baseline.cores << " cores, " << baseline.macs_per_cycle
      << " MAC/cycle/core); it is not a hardware measurement";
  return out.str();
}

std::string format_bench_report(const kernel::QuantMatMulDims& dims, std::span<const BenchRow> rows,
                                const BaselineModel& baseline) {
  std::ostringstream out;
  out << "# dims M=" << dims.m << " N=" << dims.n << " K=" << dims.k << '\n';
  out << modeled_speedup_caveat(baseline) << '\n';
  out << std::left << std::setw(28) << "point" << std::setw(14) << "cycles" << std::setw(16)
      << "modeled_us" << "modeled_speedup\n";
  for (const BenchRow& r : rows) {
    out << std::left << std::setw(28) << r.label << std::setw(14) << r.sim_cycles << std::setw(16)
        << std::fixed << std::setprecision(3) << r.modeled_us << std::setprecision(4)
        << r.estimate.ratio << " (modeled)\n";
    out.unsetf(std::ios::fixed);
  }
  return out.str();
}

}  // namespace sbaccel::perf
