// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include "sbaccel/isa.hpp"

#include <cstdio>
#include <string>

#include "sbaccel/error.hpp"

namespace sbaccel::isa {

std::string_view to_string(Opcode op) {
  switch (op) {
    case Opcode::nop: return "NOP";
    case Opcode::config: return "CONFIG";
    case Opcode::load_w: return "LOAD_W";
    case Opcode::load_x: return "LOAD_X";
    case Opcode::compute: return "COMPUTE";
    case Opcode::store: return "STORE";
    case Opcode::halt: return "HALT";
  }
  return "?";
}

std::size_t operand_words(Opcode op, std::uint32_t immediate) {
  switch (op) {
    case Opcode::config: return 3;
    case Opcode::load_w: return 1 + static_cast<std::size_t>(immediate) * kWeightPayloadWords;
    case Opcode::load_x: return 1 + static_cast<std::size_t>(immediate) * kInputPayloadWords;
    default: return 0;
  }
}

namespace {

bool known_opcode(std::uint8_t code) {
  switch (code) {
    case 0x00: case 0x01: case 0x02: case 0x03: case 0x04: case 0x05: case 0xFF: return true;
    default: return false;
  }
}

std::uint32_t reserved_mask(Opcode op) {
  switch (op) {
    case Opcode::load_w:
    case Opcode::load_x: return 0;
    case Opcode::compute: return kMaxImmediate & ~1u;
    default: return kMaxImmediate;
  }
}

std::uint32_t header(Opcode op, std::uint32_t immediate) {
  return (static_cast<std::uint32_t>(op) << 24) | (immediate & kMaxImmediate);
}

}  // namespace

DecodedInstruction decode_one(std::span<const std::uint32_t> words, std::size_t pos) {
  if (pos >= words.size()) throw Error(ErrorKind::underrun, "no header word", pos);
  const std::uint32_t word = words[pos];
  const auto code = static_cast<std::uint8_t>(word >> 24);
  if (!known_opcode(code)) {
    char hex[8];
    std::snprintf(hex, sizeof hex, "0x%02X", static_cast<unsigned>(code));
    throw Error(ErrorKind::decode, std::string("unknown opcode ") + hex, pos);
  }
  const auto op = static_cast<Opcode>(code);
  const std::uint32_t imm = word & kMaxImmediate;
  if ((imm & reserved_mask(op)) != 0) {
    throw Error(ErrorKind::decode,
                std::string("reserved immediate bits set on ") + std::string(to_string(op)), pos);
  }
  const std::size_t n_operands = operand_words(op, imm);
  const std::size_t available = words.size() - pos - 1;
  if (available < n_operands) {
    throw Error(ErrorKind::underrun,
                std::string(to_string(op)) + " needs " + std::to_string(n_operands) +
                    " operand words, stream has " + std::to_string(available),
                pos);
  }
  DecodedInstruction d;
  d.word_offset = pos;
  d.instruction.opcode = op;
  d.instruction.immediate = imm;
  const auto first = words.begin() + static_cast<std::ptrdiff_t>(pos + 1);
  d.instruction.operands.assign(first, first + static_cast<std::ptrdiff_t>(n_operands));
  return d;
}

std::vector<DecodedInstruction> decode(std::span<const std::uint32_t> words) {
  std::vector<DecodedInstruction> program;
  std::size_t pos = 0;
  while (pos < words.size()) {
    program.push_back(decode_one(words, pos));
    pos += program.back().instruction.word_count();
  }
  return program;
}

void encode(const Instruction& inst, std::vector<std::uint32_t>& out) {
  out.push_back(header(inst.opcode, inst.immediate));
  out.insert(out.end(), inst.operands.begin(), inst.operands.end());
}

std::vector<std::uint32_t> encode(std::span<const Instruction> program) {
  std::vector<std::uint32_t> out;
  for (const auto& inst : program) encode(inst, out);
  return out;
}

void append_bytes_as_words(std::span<const std::uint8_t> bytes, std::size_t padded_bytes,
                           std::vector<std::uint32_t>& out) {
  for (std::size_t off = 0; off < padded_bytes; off += 4) {
    std::uint32_t w = 0;
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t i = off + b;
      if (i < bytes.size()) w |= static_cast<std::uint32_t>(bytes[i]) << (8 * b);
    }
    out.push_back(w);
  }
}

std::vector<std::uint8_t> words_to_bytes(std::span<const std::uint32_t> words) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(words.size() * 4);
  for (std::uint32_t w : words) {
    for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<std::uint8_t>(w >> (8 * b)));
  }
  return bytes;
}

Instruction make_nop() { return {Opcode::nop, 0, {}}; }

Instruction make_config(std::uint32_t m_cnt, std::uint32_t n_cnt, std::uint32_t k_cnt) {
  return {Opcode::config, 0, {m_cnt, n_cnt, k_cnt}};
}

namespace {

template <typename Block, typename Packer>
Instruction make_load(Opcode op, std::uint32_t base_slot, std::span<const Block> blocks,
                      std::size_t padded, Packer pack) {
  if (blocks.size() > kMaxImmediate) {
    throw Error(ErrorKind::range, "too many blocks for one LOAD instruction");
  }
  Instruction inst{op, static_cast<std::uint32_t>(blocks.size()), {base_slot}};
  inst.operands.reserve(1 + blocks.size() * padded / 4);
  for (const Block& b : blocks) {
    const auto bytes = pack(b);
    append_bytes_as_words(bytes, padded, inst.operands);
  }
  return inst;
}

}  // namespace

Instruction make_load_w(std::uint32_t base_slot, std::span<const codec::SuperBlockQ3K> blocks) {
  return make_load(Opcode::load_w, base_slot, blocks, kWeightPayloadBytes, codec::pack_q3k);
}

Instruction make_load_x(std::uint32_t base_slot, std::span<const codec::SuperBlockQ8K> blocks) {
  return make_load(Opcode::load_x, base_slot, blocks, kInputPayloadBytes, codec::pack_q8k);
}

Instruction make_compute(bool accumulate) { return {Opcode::compute, accumulate ? 1u : 0u, {}}; }
Instruction make_store() { return {Opcode::store, 0, {}}; }
Instruction make_halt() { return {Opcode::halt, 0, {}}; }

}  // namespace sbaccel::isa
