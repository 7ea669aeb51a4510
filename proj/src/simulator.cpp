// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include "sbaccel/simulator.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <string>

#include "sbaccel/error.hpp"
#include "sbaccel/fp16.hpp"

namespace sbaccel::sim {

using codec::kTileSize;
using codec::kTilesPerBlock;

namespace {

constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

constexpr const char* kDecoder = "decoder";
constexpr const char* kMapper = "mapper";
constexpr const char* kSbvp = "sbvp";
constexpr const char* kScheduler = "scheduler";

}  // namespace

std::uint64_t sbvp_dot_cycles(const AcceleratorConfig& cfg) {
  const std::uint64_t rounds = ceil_div(kTilesPerBlock, cfg.sbvp_lanes);
  const std::uint64_t per_tile = ceil_div(kTileSize, cfg.tile_macs_per_cycle);
  return std::max<std::uint64_t>(1, rounds * per_tile);
}

Accelerator::Accelerator(AcceleratorConfig cfg, prof::ProfileSession* profile)
    : cfg_(cfg), profile_(profile) {
  cfg_.validate();
  state_.weight_buffer.resize(cfg_.weight_slots);
  state_.input_buffer.resize(cfg_.input_slots);
  if (profile_ != nullptr) {
    profile_->register_point(kPointTotalCycles, prof::PointKind::cycle_counter);
    profile_->register_point(kPointWeightOccupancy, prof::PointKind::occupancy_gauge);
    profile_->register_point(kPointInputOccupancy, prof::PointKind::occupancy_gauge);
    profile_->register_point(kPointOutputOccupancy, prof::PointKind::occupancy_gauge);
    profile_->register_point(kPointSbvpUtilization, prof::PointKind::utilization_ratio);
  }
}

void Accelerator::fail(ErrorKind kind, const char* unit, const std::string& detail) const {
  throw SimulationError(kind, current_index_, unit, detail);
}

void Accelerator::sample(const char* id, double value) {
  sample_at(id, state_.cycles.total(), value);
}

void Accelerator::sample_at(const char* id, std::uint64_t cycle, double value) {
  if (profile_ != nullptr) profile_->record(id, cycle, value);
}

void Accelerator::charge_decoder(std::size_t operand_words) {
  state_.cycles.decoder += ceil_div(32 * operand_words, cfg_.stream_width_bits);
}

std::vector<std::uint32_t> Accelerator::run(std::span<const std::uint32_t> words) {
  std::size_t pos = 0;
  for (current_index_ = 0;; ++current_index_) {
    if (pos >= words.size()) fail(ErrorKind::protocol, kDecoder, "stream ended without HALT");
    isa::DecodedInstruction d;
    try {
      d = isa::decode_one(words, pos);
    } catch (const SimulationError&) {
      throw;
    } catch (const Error& e) {
      throw SimulationError(e.kind(), current_index_, kDecoder, e.what(), e.offset());
    }
    pos += d.instruction.word_count();
    words_in_ += d.instruction.word_count();
    execute(d.instruction);
    if (state_.halted) {
      if (pos != words.size()) {
        fail(ErrorKind::protocol, kDecoder,
             std::to_string(words.size() - pos) + " words follow HALT");
      }
      break;
    }
  }
  return output_;
}

void Accelerator::execute(const isa::Instruction& inst) {
  if (state_.halted) fail(ErrorKind::protocol, kDecoder, "instruction after HALT");
  ++instructions_;
  state_.cycles.decoder += 1;
  const auto& ops = inst.operands;
  auto expect_operands = [&](std::size_t n) {
    if (ops.size() != n) {
      fail(ErrorKind::underrun, kDecoder,
           std::string(isa::to_string(inst.opcode)) + " expects " + std::to_string(n) +
               " operand words, got " + std::to_string(ops.size()));
    }
  };

  switch (inst.opcode) {
    case isa::Opcode::nop:
      break;
    case isa::Opcode::config:
      expect_operands(3);
      charge_decoder(3);
      configure(ops[0], ops[1], ops[2]);
      break;
    case isa::Opcode::load_w:
    case isa::Opcode::load_x: {
      const bool weights = inst.opcode == isa::Opcode::load_w;
      const std::size_t unit_words = weights ? isa::kWeightPayloadWords : isa::kInputPayloadWords;
      expect_operands(1 + inst.immediate * unit_words);
      charge_decoder(1);
      const auto payload = isa::words_to_bytes(std::span(ops).subspan(1));
      if (weights) map_weights(payload, ops[0], inst.immediate);
      else map_inputs(payload, ops[0], inst.immediate);
      break;
    }
    case isa::Opcode::compute:
      schedule_compute((inst.immediate & 1u) != 0);
      break;
    case isa::Opcode::store: {
      const auto words = store_outputs();
      output_.insert(output_.end(), words.begin(), words.end());
      break;
    }
    case isa::Opcode::halt:
      state_.halted = true;
      break;
  }
  sample(kPointTotalCycles, static_cast<double>(state_.cycles.total()));
}

void Accelerator::configure(std::size_t m_cnt, std::size_t n_cnt, std::size_t k_cnt) {
  if (m_cnt == 0 || n_cnt == 0 || k_cnt == 0) {
    fail(ErrorKind::protocol, kScheduler, "CONFIG dimensions must be positive");
  }
  if (m_cnt * n_cnt > cfg_.output_slots) {
    fail(ErrorKind::buffer, kScheduler,
         "m_cnt * n_cnt = " + std::to_string(m_cnt * n_cnt) + " exceeds output_slots");
  }
  if (n_cnt * k_cnt > cfg_.weight_slots || m_cnt * k_cnt > cfg_.input_slots) {
    fail(ErrorKind::buffer, kScheduler, "CONFIG tile does not fit the weight/input buffers");
  }
  if (m_cnt != state_.m_cnt || n_cnt != state_.n_cnt) {
    state_.accumulators.assign(m_cnt * n_cnt, 0.0f);
  }
  state_.m_cnt = m_cnt;
  state_.n_cnt = n_cnt;
  state_.k_cnt = k_cnt;
  state_.configured = true;
  state_.computed = false;
  output_high_water_ = std::max<std::uint64_t>(output_high_water_, m_cnt * n_cnt);
  sample(kPointOutputOccupancy, static_cast<double>(m_cnt * n_cnt));
}

namespace {

template <typename Block, typename Unpack>
void map_blocks(std::span<const std::uint8_t> payload, std::size_t base_slot, std::size_t count,
                std::size_t unit_bytes, std::size_t packed_bytes,
                std::vector<std::optional<Block>>& buffer, std::size_t& occupancy, Unpack unpack,
                auto&& on_block, auto&& fail) {
  if (base_slot > buffer.size() || count > buffer.size() - base_slot) {
    fail(ErrorKind::buffer, "slots [" + std::to_string(base_slot) + ", " +
                                std::to_string(base_slot + count) + ") exceed capacity " +
                                std::to_string(buffer.size()));
  }
  if (payload.size() != count * unit_bytes) {
    fail(ErrorKind::protocol, "payload of " + std::to_string(payload.size()) + " bytes for " +
                                  std::to_string(count) + " blocks");
  }
  for (std::size_t i = 0; i < count; ++i) {
    const auto unit = payload.subspan(i * unit_bytes, unit_bytes);
    if (std::any_of(unit.begin() + static_cast<std::ptrdiff_t>(packed_bytes), unit.end(),
                    [](std::uint8_t b) { return b != 0; })) {
      fail(ErrorKind::format, "non-zero padding in block " + std::to_string(i));
    }
    Block block;
    try {
      block = unpack(unit.first(packed_bytes));
    } catch (const Error& e) {
      fail(e.kind(), "block " + std::to_string(i) + ": " + e.what());
    }
    auto& slot = buffer[base_slot + i];
    if (!slot) ++occupancy;
    slot = block;
    on_block(i);
  }
}

}  // namespace

void Accelerator::map_weights(std::span<const std::uint8_t> payload, std::size_t base_slot,
                              std::size_t count) {
  const std::uint64_t start = state_.cycles.total();
  const std::uint64_t unit_bits = isa::kWeightPayloadBytes * 8;
  sample(kPointWeightOccupancy, static_cast<double>(state_.weight_occupancy));
  map_blocks<codec::SuperBlockQ3K>(
      payload, base_slot, count, isa::kWeightPayloadBytes, codec::kQ3KPackedBytes,
      state_.weight_buffer, state_.weight_occupancy,
      [](std::span<const std::uint8_t> b) { return codec::unpack_q3k(b); },
      [&](std::size_t i) {
        weight_high_water_ = std::max<std::uint64_t>(weight_high_water_, state_.weight_occupancy);
        sample_at(kPointWeightOccupancy, start + ceil_div((i + 1) * unit_bits, cfg_.stream_width_bits),
                  static_cast<double>(state_.weight_occupancy));
      },
      [&](ErrorKind k, const std::string& msg) { fail(k, kMapper, msg); });
  state_.cycles.mapper += ceil_div(count * unit_bits, cfg_.stream_width_bits);
}

void Accelerator::map_inputs(std::span<const std::uint8_t> payload, std::size_t base_slot,
                             std::size_t count) {
  const std::uint64_t start = state_.cycles.total();
  const std::uint64_t unit_bits = isa::kInputPayloadBytes * 8;
  sample(kPointInputOccupancy, static_cast<double>(state_.input_occupancy));
  map_blocks<codec::SuperBlockQ8K>(
      payload, base_slot, count, isa::kInputPayloadBytes, codec::kQ8KPackedBytes,
      state_.input_buffer, state_.input_occupancy,
      [](std::span<const std::uint8_t> b) { return codec::unpack_q8k(b); },
      [&](std::size_t i) {
        input_high_water_ = std::max<std::uint64_t>(input_high_water_, state_.input_occupancy);
        sample_at(kPointInputOccupancy, start + ceil_div((i + 1) * unit_bits, cfg_.stream_width_bits),
                  static_cast<double>(state_.input_occupancy));
      },
      [&](ErrorKind k, const std::string& msg) { fail(k, kMapper, msg); });
  state_.cycles.mapper += ceil_div(count * unit_bits, cfg_.stream_width_bits);
}

std::pair<float, std::uint64_t> Accelerator::sbvp_dot(std::size_t w_slot, std::size_t x_slot) {
  if (w_slot >= state_.weight_buffer.size() || !state_.weight_buffer[w_slot]) {
    fail(ErrorKind::scheduler, kSbvp, "weight slot " + std::to_string(w_slot) + " is empty");
  }
  if (x_slot >= state_.input_buffer.size() || !state_.input_buffer[x_slot]) {
    fail(ErrorKind::scheduler, kSbvp, "input slot " + std::to_string(x_slot) + " is empty");
  }
  const codec::SuperBlockQ3K& w = *state_.weight_buffer[w_slot];
  const codec::SuperBlockQ8K& x = *state_.input_buffer[x_slot];

  // Each lane reduces one tile per round; tile partials are then scaled
  // and combined in tile order.
  std::array<std::int32_t, kTilesPerBlock> partial{};
  const std::size_t lanes = cfg_.sbvp_lanes;
  for (std::size_t round = 0; round * lanes < kTilesPerBlock; ++round) {
    for (std::size_t lane = 0; lane < lanes; ++lane) {
      const std::size_t t = round * lanes + lane;
      if (t >= kTilesPerBlock) break;
      std::int32_t sum = 0;
      for (std::size_t i = 0; i < kTileSize; ++i) {
        const std::size_t e = t * kTileSize + i;
        sum += (static_cast<std::int32_t>(w.quants[e]) - codec::kQ3LevelOffset) *
               static_cast<std::int32_t>(x.quants[e]);
      }
      partial[t] = sum;
    }
  }
  std::int32_t core = 0;
  for (std::size_t t = 0; t < kTilesPerBlock; ++t) {
    core += static_cast<std::int32_t>(w.tile_scales[t]) * partial[t];
  }

  const float dw = codec::decode_fp16(w.super_scale);
  const float dx = codec::decode_fp16(x.super_scale);
  const float scale = dw * dx;
  const float value = scale * static_cast<float>(core);

  const std::uint64_t cycles = sbvp_dot_cycles(cfg_);
  state_.cycles.sbvp += cycles;
  ++dots_;
  return {value, cycles};
}

void Accelerator::schedule_compute(bool accumulate) {
  if (!state_.configured) fail(ErrorKind::protocol, kScheduler, "COMPUTE before CONFIG");
  const std::size_t m_cnt = state_.m_cnt;
  const std::size_t n_cnt = state_.n_cnt;
  const std::size_t k_cnt = state_.k_cnt;
  for (std::size_t m = 0; m < m_cnt; ++m) {
    for (std::size_t n = 0; n < n_cnt; ++n) {
      float& acc = state_.accumulators[m * n_cnt + n];
      if (!accumulate) acc = 0.0f;
      for (std::size_t k = 0; k < k_cnt; ++k) {
        acc += sbvp_dot(n * k_cnt + k, m * k_cnt + k).first;
        state_.cycles.scheduler += 1;
      }
    }
  }
  state_.computed = true;
  const std::uint64_t total = state_.cycles.total();
  sample(kPointSbvpUtilization,
         total == 0 ? 0.0 : static_cast<double>(state_.cycles.sbvp) / static_cast<double>(total));
}

std::vector<std::uint32_t> Accelerator::store_outputs() {
  if (!state_.computed) fail(ErrorKind::protocol, kScheduler, "STORE before COMPUTE");
  std::vector<std::uint32_t> words;
  words.reserve(state_.accumulators.size());
  for (float v : state_.accumulators) words.push_back(std::bit_cast<std::uint32_t>(v));
  if (cfg_.fault_flip_output_lsb && !words.empty()) words.front() ^= 1u;
  state_.cycles.scheduler += ceil_div(32 * words.size(), cfg_.stream_width_bits);
  words_out_ += words.size();
  return words;
}

SimReport Accelerator::report() const {
  SimReport r;
  r.decoder_cycles = state_.cycles.decoder;
  r.mapper_cycles = state_.cycles.mapper;
  r.sbvp_cycles = state_.cycles.sbvp;
  r.scheduler_cycles = state_.cycles.scheduler;
  r.total_cycles = state_.cycles.total();
  r.sbvp_busy_cycles = r.sbvp_cycles;
  r.sbvp_idle_cycles = r.total_cycles - r.sbvp_busy_cycles;
  r.mapper_stall_cycles = r.sbvp_cycles + r.scheduler_cycles;
  r.weight_slots_high_water = weight_high_water_;
  r.input_slots_high_water = input_high_water_;
  r.output_slots_high_water = output_high_water_;
  r.instructions = instructions_;
  r.superblock_dots = dots_;
  r.words_in = words_in_;
  r.words_out = words_out_;
  r.clock_mhz = cfg_.clock_mhz;
  return r;
}

SimResult simulate_session(std::span<const std::uint32_t> words, const AcceleratorConfig& cfg,
                           prof::ProfileSession* profile) {
  Accelerator accel(cfg, profile);
  SimResult result;
  result.output = accel.run(words);
  result.report = accel.report();
  if (profile != nullptr) profile->set_sim_report(result.report);
  return result;
}

}  // namespace sbaccel::sim
