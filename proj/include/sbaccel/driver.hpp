// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Host-side driver: tiles a quantized MatMul over the accelerator's buffer
// capacities, serializes the tiles into an instruction stream, dispatches
// to a backend and scatters the returned outputs.

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "sbaccel/accel_config.hpp"
#include "sbaccel/codec.hpp"
#include "sbaccel/isa.hpp"
#include "sbaccel/profiler.hpp"
#include "sbaccel/ref_kernel.hpp"
#include "sbaccel/sim_report.hpp"

namespace sbaccel::driver {

// One tile of the (M, N, K_sb) iteration space. Offsets and counts are in
// rows (m, n) and super-blocks (k).
struct TileBlock {
  std::size_t m_off = 0, n_off = 0, k_off = 0;
  std::size_t m_cnt = 0, n_cnt = 0, k_cnt = 0;

  friend bool operator==(const TileBlock&, const TileBlock&) = default;
};

struct TilingPlan {
  kernel::QuantMatMulDims dims;
  std::vector<TileBlock> blocks;  // m-tile outer, n-tile, k-chunk ascending inner

  bool last_k_chunk(const TileBlock& b) const { return b.k_off + b.k_cnt == dims.k_blocks(); }
};

// Greedy tiling: the largest k_cnt first, then n_cnt, then m_cnt, subject to
// n*k <= weight_slots, m*k <= input_slots and m*n <= output_slots.
TilingPlan plan_tiling(const kernel::QuantMatMulDims& dims, const sim::AcceleratorConfig& cfg);

// True when `cur` can reuse the input tile that `prev` left in the input
// buffer, so no LOAD_X is emitted.
bool reuses_inputs(const TileBlock& prev, const TileBlock& cur);

// Per tile: CONFIG, LOAD_W, LOAD_X (unless reused), COMPUTE (accumulate for
// k_off > 0), STORE after the last k chunk. Ends with HALT.
std::vector<isa::Instruction> build_program(const TilingPlan& plan,
                                            std::span<const codec::SuperBlockQ3K> weights,
                                            std::span<const codec::SuperBlockQ8K> inputs);
std::vector<std::uint32_t> build_stream(const TilingPlan& plan,
                                        std::span<const codec::SuperBlockQ3K> weights,
                                        std::span<const codec::SuperBlockQ8K> inputs);

// Scatters STORE outputs back into the M x N matrix.
kernel::OutputMatrix unpack_outputs(std::span<const std::uint32_t> words, const TilingPlan& plan);

struct ReferenceBackend {};
struct SimulatorBackend {
  sim::AcceleratorConfig config;
};
using Backend = std::variant<ReferenceBackend, SimulatorBackend>;

struct RunResult {
  kernel::OutputMatrix output;
  prof::DriverProfile profile;
  std::optional<sim::SimReport> sim_report;
};

// Both backends return bit-identical outputs. When `session` is given it
// receives the simulator capture points, the SimReport and the driver
// phase profile.
RunResult run_matmul(std::span<const codec::SuperBlockQ3K> weights,
                     std::span<const codec::SuperBlockQ8K> inputs,
                     const kernel::QuantMatMulDims& dims, const Backend& backend,
                     prof::ProfileSession* session = nullptr);

}  // namespace sbaccel::driver
