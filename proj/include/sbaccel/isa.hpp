// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Instruction stream between the driver and the accelerator. All words are
// 32-bit little-endian. A header word carries the opcode in bits 31..24 and
// an immediate in bits 23..0; some opcodes are followed by operand words.
//
//   NOP      0x00  1 word
//   CONFIG   0x01  header + {m_cnt, n_cnt, k_cnt}
//   LOAD_W   0x02  header(imm = count) + base_slot + count * 28 payload words
//   LOAD_X   0x03  header(imm = count) + base_slot + count * 65 payload words
//   COMPUTE  0x04  header(imm bit 0 = accumulate)
//   STORE    0x05  1 word
//   HALT     0xFF  1 word
//
// LOAD payloads are packed super-blocks padded with zero bytes to a word
// boundary (110 -> 112 bytes, 258 -> 260 bytes). Immediate bits not listed
// above are reserved and must be zero.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sbaccel/codec.hpp"

namespace sbaccel::isa {

enum class Opcode : std::uint8_t {
  nop = 0x00,
  config = 0x01,
  load_w = 0x02,
  load_x = 0x03,
  compute = 0x04,
  store = 0x05,
  halt = 0xFF,
};

std::string_view to_string(Opcode op);

inline constexpr std::size_t kWeightPayloadBytes = 112;
inline constexpr std::size_t kInputPayloadBytes = 260;
inline constexpr std::size_t kWeightPayloadWords = kWeightPayloadBytes / 4;
inline constexpr std::size_t kInputPayloadWords = kInputPayloadBytes / 4;
inline constexpr std::uint32_t kMaxImmediate = 0x00FFFFFFu;

static_assert(kWeightPayloadBytes >= codec::kQ3KPackedBytes && kWeightPayloadBytes % 4 == 0);
static_assert(kInputPayloadBytes >= codec::kQ8KPackedBytes && kInputPayloadBytes % 4 == 0);

struct Instruction {
  Opcode opcode = Opcode::nop;
  std::uint32_t immediate = 0;
  // Words after the header: CONFIG dims, or LOAD base_slot followed by payload.
  std::vector<std::uint32_t> operands;

  std::size_t word_count() const { return 1 + operands.size(); }

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct DecodedInstruction {
  Instruction instruction;
  std::size_t word_offset = 0;  // offset of the header word in the stream
};

// Parses a whole stream. Unknown opcodes and reserved bits raise decode
// errors; a payload cut short raises an underrun error. Both carry the word
// offset of the offending header.
std::vector<DecodedInstruction> decode(std::span<const std::uint32_t> words);

// Decodes the single instruction whose header sits at `pos`.
DecodedInstruction decode_one(std::span<const std::uint32_t> words, std::size_t pos);

// Number of operand words that follow a header, given its immediate.
std::size_t operand_words(Opcode op, std::uint32_t immediate);

void encode(const Instruction& inst, std::vector<std::uint32_t>& out);
std::vector<std::uint32_t> encode(std::span<const Instruction> program);

Instruction make_nop();
Instruction make_config(std::uint32_t m_cnt, std::uint32_t n_cnt, std::uint32_t k_cnt);
Instruction make_load_w(std::uint32_t base_slot, std::span<const codec::SuperBlockQ3K> blocks);
Instruction make_load_x(std::uint32_t base_slot, std::span<const codec::SuperBlockQ8K> blocks);
Instruction make_compute(bool accumulate);
Instruction make_store();
Instruction make_halt();

// Byte <-> word helpers for padded payloads (little-endian).
void append_bytes_as_words(std::span<const std::uint8_t> bytes, std::size_t padded_bytes,
                           std::vector<std::uint32_t>& out);
std::vector<std::uint8_t> words_to_bytes(std::span<const std::uint32_t> words);

}  // namespace sbaccel::isa
