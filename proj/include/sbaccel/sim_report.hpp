// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace sbaccel::sim {

// Cycle and occupancy summary of one simulated session. Phases are
// serialized, so total_cycles is the sum of the four unit counters.
struct SimReport {
  std::uint64_t total_cycles = 0;
  std::uint64_t decoder_cycles = 0;
  std::uint64_t mapper_cycles = 0;
  std::uint64_t sbvp_cycles = 0;
  std::uint64_t scheduler_cycles = 0;

  std::uint64_t sbvp_busy_cycles = 0;
  std::uint64_t sbvp_idle_cycles = 0;
  // Cycles in which the mapper is held off by the compute/store phases.
  std::uint64_t mapper_stall_cycles = 0;

  std::uint64_t weight_slots_high_water = 0;
  std::uint64_t input_slots_high_water = 0;
  std::uint64_t output_slots_high_water = 0;

  std::uint64_t instructions = 0;
  std::uint64_t superblock_dots = 0;
  std::uint64_t words_in = 0;
  std::uint64_t words_out = 0;

  double clock_mhz = 0.0;

  double modeled_time_us() const { return clock_mhz > 0.0 ? total_cycles / clock_mhz : 0.0; }

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

}  // namespace sbaccel::sim
