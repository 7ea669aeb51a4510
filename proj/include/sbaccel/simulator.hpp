// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Cycle-approximate simulator of the super-block MatMul accelerator: an
// instruction decoder, a data mapper feeding weight/input buffers, the
// super-block vector processor (SBVP) and a scheduler that tiles and
// accumulates SBVP results.
//
// Cycle rules (W = stream_width_bits):
//   decoder    1 per header word; ceil(32 * operand_words / W) for CONFIG
//              operands and for the LOAD base_slot word
//   mapper     ceil(payload_bits / W) per LOAD (112/260 bytes per block)
//   sbvp       per super-block dot: ceil(16 / lanes) * ceil(16 / tile_macs)
//   scheduler  1 per accumulator update during COMPUTE;
//              ceil(32 * m_cnt * n_cnt / W) per STORE
// Phases never overlap, so total_cycles is the sum of the unit counters.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <span>
#include <utility>
#include <vector>

#include "sbaccel/accel_config.hpp"
#include "sbaccel/codec.hpp"
#include "sbaccel/error.hpp"
#include "sbaccel/isa.hpp"
#include "sbaccel/profiler.hpp"
#include "sbaccel/sim_report.hpp"

namespace sbaccel::sim {

// Capture point ids published by the simulator.
inline constexpr const char* kPointTotalCycles = "cycles.total";
inline constexpr const char* kPointWeightOccupancy = "buffer.weight.occupancy";
inline constexpr const char* kPointInputOccupancy = "buffer.input.occupancy";
inline constexpr const char* kPointOutputOccupancy = "buffer.output.occupancy";
inline constexpr const char* kPointSbvpUtilization = "sbvp.utilization";

struct UnitCycles {
  std::uint64_t decoder = 0;
  std::uint64_t mapper = 0;
  std::uint64_t sbvp = 0;
  std::uint64_t scheduler = 0;

  std::uint64_t total() const { return decoder + mapper + sbvp + scheduler; }
};

struct AcceleratorState {
  std::size_t m_cnt = 0;
  std::size_t n_cnt = 0;
  std::size_t k_cnt = 0;
  bool configured = false;
  bool computed = false;  // a COMPUTE has run since the last CONFIG
  bool halted = false;

  std::vector<std::optional<codec::SuperBlockQ3K>> weight_buffer;
  std::vector<std::optional<codec::SuperBlockQ8K>> input_buffer;
  std::vector<float> accumulators;  // m_cnt x n_cnt, row-major

  std::size_t weight_occupancy = 0;
  std::size_t input_occupancy = 0;

  UnitCycles cycles;
};

// Super-block dot cost in cycles for a given configuration.
std::uint64_t sbvp_dot_cycles(const AcceleratorConfig& cfg);

// One accelerator instance. Single-threaded; instances share nothing.
class Accelerator {
 public:
  explicit Accelerator(AcceleratorConfig cfg, prof::ProfileSession* profile = nullptr);

  // Runs a whole instruction stream, which must end with HALT. Unit errors
  // are reported as SimulationError naming the instruction index and unit.
  std::vector<std::uint32_t> run(std::span<const std::uint32_t> words);

  void execute(const isa::Instruction& inst);

  // Unit operations, public for unit-level testing.
  void configure(std::size_t m_cnt, std::size_t n_cnt, std::size_t k_cnt);
  void map_weights(std::span<const std::uint8_t> payload, std::size_t base_slot, std::size_t count);
  void map_inputs(std::span<const std::uint8_t> payload, std::size_t base_slot, std::size_t count);
  std::pair<float, std::uint64_t> sbvp_dot(std::size_t w_slot, std::size_t x_slot);
  void schedule_compute(bool accumulate);
  std::vector<std::uint32_t> store_outputs();

  const AcceleratorState& state() const { return state_; }
  const AcceleratorConfig& config() const { return cfg_; }
  SimReport report() const;

 private:
  [[noreturn]] void fail(ErrorKind kind, const char* unit, const std::string& detail) const;
  void charge_decoder(std::size_t operand_words);
  void sample(const char* id, double value);
  void sample_at(const char* id, std::uint64_t cycle, double value);

  AcceleratorConfig cfg_;
  prof::ProfileSession* profile_;
  AcceleratorState state_;
  std::size_t current_index_ = 0;

  std::vector<std::uint32_t> output_;
  std::uint64_t instructions_ = 0;
  std::uint64_t dots_ = 0;
  std::uint64_t words_in_ = 0;
  std::uint64_t words_out_ = 0;
  std::uint64_t weight_high_water_ = 0;
  std::uint64_t input_high_water_ = 0;
  std::uint64_t output_high_water_ = 0;
};

struct SimResult {
  std::vector<std::uint32_t> output;
  SimReport report;
};

SimResult simulate_session(std::span<const std::uint32_t> words, const AcceleratorConfig& cfg,
                           prof::ProfileSession* profile = nullptr);

}  // namespace sbaccel::sim
