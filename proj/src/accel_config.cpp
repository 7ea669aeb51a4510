// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include "sbaccel/accel_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sbaccel/error.hpp"

namespace sbaccel::sim {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint32_t parse_u32(std::string_view key, std::string_view value) {
  std::uint32_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorKind::format, "bad integer for '" + std::string(key) + "': " + std::string(value));
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  const std::string tmp(value);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(tmp, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tmp.size() || tmp.empty()) {
    throw Error(ErrorKind::format, "bad number for '" + std::string(key) + "': " + tmp);
  }
  return out;
}

}  // namespace

void AcceleratorConfig::validate() const {
  if (weight_slots == 0 || input_slots == 0 || output_slots == 0 || sbvp_lanes == 0 ||
      tile_macs_per_cycle == 0 || stream_width_bits == 0) {
    throw Error(ErrorKind::domain, "accelerator config fields must be positive");
  }
  if (stream_width_bits % 32 != 0) {
    throw Error(ErrorKind::domain, "stream_width_bits must be a multiple of 32");
  }
  if (!(clock_mhz > 0.0) || !std::isfinite(clock_mhz)) {
    throw Error(ErrorKind::domain, "clock_mhz must be positive");
  }
}

void AcceleratorConfig::set(std::string_view key, std::string_view value) {
  if (key == "weight_slots") weight_slots = parse_u32(key, value);
  else if (key == "input_slots") input_slots = parse_u32(key, value);
  else if (key == "output_slots") output_slots = parse_u32(key, value);
  else if (key == "sbvp_lanes") sbvp_lanes = parse_u32(key, value);
  else if (key == "tile_macs_per_cycle") tile_macs_per_cycle = parse_u32(key, value);
  else if (key == "stream_width_bits") stream_width_bits = parse_u32(key, value);
  else if (key == "clock_mhz") clock_mhz = parse_double(key, value);
  else throw Error(ErrorKind::format, "unknown accelerator config key '" + std::string(key) + "'");
}

AcceleratorConfig parse_accel_config(std::string_view text) {
  AcceleratorConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::format, "line " + std::to_string(line_no) + ": expected key = value");
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

AcceleratorConfig load_accel_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open accelerator config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_accel_config(ss.str());
}

std::string to_text(const AcceleratorConfig& cfg) {
  std::ostringstream out;
  out << "weight_slots = " << cfg.weight_slots << '\n'
      << "input_slots = " << cfg.input_slots << '\n'
      << "output_slots = " << cfg.output_slots << '\n'
      << "sbvp_lanes = " << cfg.sbvp_lanes << '\n'
      << "tile_macs_per_cycle = " << cfg.tile_macs_per_cycle << '\n'
      << "stream_width_bits = " << cfg.stream_width_bits << '\n'
      << "clock_mhz = " << cfg.clock_mhz << '\n';
  return out.str();
}

}  // namespace sbaccel::sim
