// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include "sbaccel/driver.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "sbaccel/error.hpp"
#include "sbaccel/simulator.hpp"

namespace sbaccel::driver {

TilingPlan plan_tiling(const kernel::QuantMatMulDims& dims, const sim::AcceleratorConfig& cfg) {
  dims.validate();
  if (cfg.weight_slots == 0 || cfg.input_slots == 0 || cfg.output_slots == 0) {
    throw Error(ErrorKind::capacity, "accelerator cannot hold a single super-block pair");
  }
  cfg.validate();

  const std::size_t kb = dims.k_blocks();
  const std::size_t k_cnt = std::min<std::size_t>({kb, cfg.weight_slots, cfg.input_slots});
  const std::size_t n_cnt =
      std::min<std::size_t>({dims.n, cfg.weight_slots / k_cnt, cfg.output_slots});
  const std::size_t m_cnt =
      std::min<std::size_t>({dims.m, cfg.input_slots / k_cnt, cfg.output_slots / n_cnt});

  TilingPlan plan;
  plan.dims = dims;
  for (std::size_t m = 0; m < dims.m; m += m_cnt) {
    for (std::size_t n = 0; n < dims.n; n += n_cnt) {
      for (std::size_t k = 0; k < kb; k += k_cnt) {
        plan.blocks.push_back(TileBlock{m, n, k, std::min(m_cnt, dims.m - m),
                                        std::min(n_cnt, dims.n - n), std::min(k_cnt, kb - k)});
      }
    }
  }
  return plan;
}

bool reuses_inputs(const TileBlock& prev, const TileBlock& cur) {
  return prev.m_off == cur.m_off && prev.m_cnt == cur.m_cnt && prev.k_off == cur.k_off &&
         prev.k_cnt == cur.k_cnt;
}

std::vector<isa::Instruction> build_program(const TilingPlan& plan,
                                            std::span<const codec::SuperBlockQ3K> weights,
                                            std::span<const codec::SuperBlockQ8K> inputs) {
  const std::size_t kb = plan.dims.k_blocks();
  if (weights.size() != plan.dims.n * kb || inputs.size() != plan.dims.m * kb) {
    throw Error(ErrorKind::shape, "block arrays do not match the plan's dims");
  }
  std::vector<isa::Instruction> program;
  std::vector<codec::SuperBlockQ3K> w_tile;
  std::vector<codec::SuperBlockQ8K> x_tile;
  const TileBlock* prev = nullptr;
  for (const TileBlock& b : plan.blocks) {
    program.push_back(isa::make_config(static_cast<std::uint32_t>(b.m_cnt),
                                       static_cast<std::uint32_t>(b.n_cnt),
                                       static_cast<std::uint32_t>(b.k_cnt)));
    // Slot layout is k-innermost: slot = row_local * k_cnt + k_local.
    w_tile.clear();
    for (std::size_t n = b.n_off; n < b.n_off + b.n_cnt; ++n) {
      for (std::size_t k = b.k_off; k < b.k_off + b.k_cnt; ++k) w_tile.push_back(weights[n * kb + k]);
    }
    program.push_back(isa::make_load_w(0, w_tile));
    if (prev == nullptr || !reuses_inputs(*prev, b)) {
      x_tile.clear();
      for (std::size_t m = b.m_off; m < b.m_off + b.m_cnt; ++m) {
        for (std::size_t k = b.k_off; k < b.k_off + b.k_cnt; ++k) x_tile.push_back(inputs[m * kb + k]);
      }
      program.push_back(isa::make_load_x(0, x_tile));
    }
    program.push_back(isa::make_compute(b.k_off != 0));
    if (plan.last_k_chunk(b)) program.push_back(isa::make_store());
    prev = &b;
  }
  program.push_back(isa::make_halt());
  return program;
}

std::vector<std::uint32_t> build_stream(const TilingPlan& plan,
                                        std::span<const codec::SuperBlockQ3K> weights,
                                        std::span<const codec::SuperBlockQ8K> inputs) {
  return isa::encode(build_program(plan, weights, inputs));
}

kernel::OutputMatrix unpack_outputs(std::span<const std::uint32_t> words, const TilingPlan& plan) {
  kernel::OutputMatrix out(plan.dims.m, plan.dims.n);
  std::size_t pos = 0;
  for (const TileBlock& b : plan.blocks) {
    if (!plan.last_k_chunk(b)) continue;
    const std::size_t count = b.m_cnt * b.n_cnt;
    if (words.size() - pos < count) {
      throw Error(ErrorKind::protocol, "output stream truncated: expected at least " +
                                           std::to_string(pos + count) + " words, got " +
                                           std::to_string(words.size()),
                  words.size());
    }
    for (std::size_t m = 0; m < b.m_cnt; ++m) {
      for (std::size_t n = 0; n < b.n_cnt; ++n) {
        out.at(b.m_off + m, b.n_off + n) = std::bit_cast<float>(words[pos++]);
      }
    }
  }
  if (pos != words.size()) {
    throw Error(ErrorKind::protocol, "output stream has " + std::to_string(words.size() - pos) +
                                         " unexpected trailing words",
                pos);
  }
  return out;
}

namespace {

RunResult run_reference(std::span<const codec::SuperBlockQ3K> weights,
                        std::span<const codec::SuperBlockQ8K> inputs,
                        const kernel::QuantMatMulDims& dims, prof::PhaseTimer& timer) {
  RunResult result;
  {
    auto scope = timer.scope(prof::DriverPhase::wait_compute);
    result.output = kernel::matmul_q3k_q8k(weights, inputs, dims);
  }
  timer.add_counts(prof::DriverPhase::wait_compute, dims.m * dims.n * dims.k_blocks(), 0);
  return result;
}

RunResult run_simulator(std::span<const codec::SuperBlockQ3K> weights,
                        std::span<const codec::SuperBlockQ8K> inputs,
                        const kernel::QuantMatMulDims& dims, const sim::AcceleratorConfig& cfg,
                        prof::PhaseTimer& timer, prof::ProfileSession* session) {
  RunResult result;
  TilingPlan plan;
  std::vector<std::uint32_t> stream;
  {
    auto scope = timer.scope(prof::DriverPhase::send_input);
    plan = plan_tiling(dims, cfg);
    const auto program = build_program(plan, weights, inputs);
    std::uint64_t blocks = 0;
    for (const auto& inst : program) {
      if (inst.opcode == isa::Opcode::load_w || inst.opcode == isa::Opcode::load_x) {
        blocks += inst.immediate;
      }
    }
    stream = isa::encode(program);
    timer.add_counts(prof::DriverPhase::send_input, blocks, stream.size() * 4);
  }
  sim::SimResult sim_result;
  {
    auto scope = timer.scope(prof::DriverPhase::wait_compute);
    sim_result = sim::simulate_session(stream, cfg, session);
  }
  timer.add_counts(prof::DriverPhase::wait_compute, sim_result.report.superblock_dots, 0);
  {
    auto scope = timer.scope(prof::DriverPhase::unpack_output);
    result.output = unpack_outputs(sim_result.output, plan);
  }
  timer.add_counts(prof::DriverPhase::unpack_output, 0, sim_result.output.size() * 4);
  result.sim_report = sim_result.report;
  return result;
}

}  // namespace

RunResult run_matmul(std::span<const codec::SuperBlockQ3K> weights,
                     std::span<const codec::SuperBlockQ8K> inputs,
                     const kernel::QuantMatMulDims& dims, const Backend& backend,
                     prof::ProfileSession* session) {
  dims.validate();
  const std::size_t kb = dims.k_blocks();
  if (weights.size() != dims.n * kb || inputs.size() != dims.m * kb) {
    throw Error(ErrorKind::shape, "weights must be N x K/256 blocks and inputs M x K/256 blocks");
  }
  prof::PhaseTimer timer;
  RunResult result;
  if (const auto* sim_backend = std::get_if<SimulatorBackend>(&backend)) {
    result = run_simulator(weights, inputs, dims, sim_backend->config, timer, session);
  } else {
    result = run_reference(weights, inputs, dims, timer);
  }
  result.profile = timer.profile();
  if (session != nullptr) session->merge_driver_profile(result.profile);
  return result;
}

}  // namespace sbaccel::driver
