// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace sbaccel::sim {

// Cycle-model parameters of the simulated accelerator.
struct AcceleratorConfig {
  std::uint32_t weight_slots = 64;       // Q3_K super-blocks in the weight buffer
  std::uint32_t input_slots = 64;        // Q8_K super-blocks in the input buffer
  std::uint32_t output_slots = 4096;     // float accumulators
  std::uint32_t sbvp_lanes = 4;          // tiles processed in parallel by the SBVP
  std::uint32_t tile_macs_per_cycle = 16;
  std::uint32_t stream_width_bits = 64;  // multiple of 32
  double clock_mhz = 100.0;

  // Test hook: flips the LSB of the first word emitted by STORE.
  bool fault_flip_output_lsb = false;

  void validate() const;

  // Sets one field from its accel.cfg key. Throws format error on an unknown
  // key or unparsable value.
  void set(std::string_view key, std::string_view value);

  friend bool operator==(const AcceleratorConfig&, const AcceleratorConfig&) = default;
};

// accel.cfg: one `key = value` per line, '#' starts a comment. Keys are the
// field names above; missing keys keep their defaults.
AcceleratorConfig parse_accel_config(std::string_view text);
AcceleratorConfig load_accel_config(const std::string& path);
std::string to_text(const AcceleratorConfig& cfg);

}  // namespace sbaccel::sim
