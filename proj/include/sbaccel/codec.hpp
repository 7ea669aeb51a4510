// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Q3_K / Q8_K super-block codecs.
//
// A Q3_K super-block holds 256 weights as 16 tiles of 16 three-bit levels.
// Each tile has an unsigned 6-bit scale; the block has one binary16 super
// scale. Reconstruction is
//
//   w[16t + i] = d * tile_scales[t] * (quants[16t + i] - 4)
//
// A Q8_K super-block holds 256 signed 8-bit inputs in [-127, 127] and one
// binary16 super scale: x[i] = d * quants[i].
//
// Packed layouts (little-endian, LSB-first bit packing). These are not wire
// compatible with GGML's block_q3_K / block_q8_K.
//
//   Q3_K, 110 bytes:
//     [0, 96)    256 stored quants, 3 bits each, flat index order
//     [96, 108)  16 tile scales, 6 bits each
//     [108, 110) super scale (binary16)
//   Q8_K, 258 bytes:
//     [0, 256)   quants, two's complement
//     [256, 258) super scale (binary16)

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sbaccel::codec {

inline constexpr std::size_t kSuperBlockSize = 256;
inline constexpr std::size_t kTileSize = 16;
inline constexpr std::size_t kTilesPerBlock = kSuperBlockSize / kTileSize;

inline constexpr std::size_t kQ3KPackedBytes = 110;
inline constexpr std::size_t kQ8KPackedBytes = 258;

inline constexpr int kQ3LevelMin = -4;
inline constexpr int kQ3LevelMax = 3;
inline constexpr int kQ3LevelOffset = 4;
inline constexpr int kQ3MaxTileScale = 63;
inline constexpr int kQ8QuantMax = 127;

// Bits of storage per element, derived from the packed sizes.
inline constexpr double kQ3KBitsPerWeight = kQ3KPackedBytes * 8.0 / kSuperBlockSize;
inline constexpr double kQ8KBitsPerInput = kQ8KPackedBytes * 8.0 / kSuperBlockSize;

struct SuperBlockQ3K {
  std::array<std::uint8_t, kSuperBlockSize> quants{};  // stored = level + 4, in [0, 7]
  std::array<std::uint8_t, kTilesPerBlock> tile_scales{};  // in [0, 63]
  std::uint16_t super_scale = 0;  // binary16, finite, non-negative

  int level(std::size_t i) const { return static_cast<int>(quants[i]) - kQ3LevelOffset; }

  friend bool operator==(const SuperBlockQ3K&, const SuperBlockQ3K&) = default;
};

struct SuperBlockQ8K {
  std::array<std::int8_t, kSuperBlockSize> quants{};  // in [-127, 127]
  std::uint16_t super_scale = 0;

  friend bool operator==(const SuperBlockQ8K&, const SuperBlockQ8K&) = default;
};

// Reconstructed values of one tile.
struct DequantTile {
  std::array<float, kTileSize> values{};
};

bool is_valid(const SuperBlockQ3K& sb) noexcept;
bool is_valid(const SuperBlockQ8K& sb) noexcept;

SuperBlockQ3K quantize_q3k(std::span<const float, kSuperBlockSize> values);
std::array<float, kSuperBlockSize> dequantize_q3k(const SuperBlockQ3K& sb);
DequantTile dequantize_q3k_tile(const SuperBlockQ3K& sb, std::size_t tile);

SuperBlockQ8K quantize_q8k(std::span<const float, kSuperBlockSize> values);
std::array<float, kSuperBlockSize> dequantize_q8k(const SuperBlockQ8K& sb);

using PackedQ3K = std::array<std::uint8_t, kQ3KPackedBytes>;
using PackedQ8K = std::array<std::uint8_t, kQ8KPackedBytes>;

PackedQ3K pack_q3k(const SuperBlockQ3K& sb);
SuperBlockQ3K unpack_q3k(std::span<const std::uint8_t> bytes);

PackedQ8K pack_q8k(const SuperBlockQ8K& sb);
SuperBlockQ8K unpack_q8k(std::span<const std::uint8_t> bytes);

// Row-major blocking of a rows x cols matrix; cols must be a multiple of
// 256. Block (r, k) covers elements [r, 256k, 256k + 255].
std::vector<SuperBlockQ3K> quantize_tensor_q3k(std::span<const float> matrix, std::size_t rows,
                                               std::size_t cols);
std::vector<SuperBlockQ8K> quantize_tensor_q8k(std::span<const float> matrix, std::size_t rows,
                                               std::size_t cols);

}  // namespace sbaccel::codec
