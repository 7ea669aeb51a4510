// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include "sbaccel/codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sbaccel/error.hpp"
#include "sbaccel/fp16.hpp"

namespace sbaccel::codec {

namespace {

// Round half to even, independent of the floating-point environment.
double round_half_even(double v) {
  const double lo = std::floor(v);
  const double diff = v - lo;
  if (diff > 0.5) return lo + 1.0;
  if (diff < 0.5) return lo;
  return std::fmod(lo, 2.0) == 0.0 ? lo : lo + 1.0;
}

// Quotients are formed in double: a float quotient can land exactly on a
// .5 boundary that the true quotient misses.
int clamp_round_div(float num, float den, int lo, int hi) {
  const double r = round_half_even(static_cast<double>(num) / static_cast<double>(den));
  if (r <= lo) return lo;
  if (r >= hi) return hi;
  return static_cast<int>(r);
}

void require_finite(std::span<const float> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorKind::range, "non-finite input value at element " + std::to_string(i), i);
    }
  }
}

float abs_max(std::span<const float> values) {
  float amax = 0.0f;
  for (float v : values) amax = std::max(amax, std::fabs(v));
  return amax;
}

bool scale_is_valid(std::uint16_t bits) { return fp16_is_finite(bits) && (bits & 0x8000u) == 0; }

// LSB-first bit writer/reader over a byte span.
void put_bits(std::span<std::uint8_t> out, std::size_t bit_pos, unsigned value, unsigned width) {
  for (unsigned b = 0; b < width; ++b, ++bit_pos) {
    if ((value >> b) & 1u) out[bit_pos / 8] |= static_cast<std::uint8_t>(1u << (bit_pos % 8));
  }
}

unsigned get_bits(std::span<const std::uint8_t> in, std::size_t bit_pos, unsigned width) {
  unsigned value = 0;
  for (unsigned b = 0; b < width; ++b, ++bit_pos) {
    value |= static_cast<unsigned>((in[bit_pos / 8] >> (bit_pos % 8)) & 1u) << b;
  }
  return value;
}

constexpr std::size_t kQ3ScaleOffset = kSuperBlockSize * 3 / 8;
constexpr std::size_t kQ3SuperOffset = kQ3ScaleOffset + kTilesPerBlock * 6 / 8;
static_assert(kQ3SuperOffset + 2 == kQ3KPackedBytes);
static_assert(kSuperBlockSize + 2 == kQ8KPackedBytes);

}  // namespace

bool is_valid(const SuperBlockQ3K& sb) noexcept {
  return scale_is_valid(sb.super_scale) &&
         std::all_of(sb.quants.begin(), sb.quants.end(), [](std::uint8_t q) { return q <= 7; }) &&
         std::all_of(sb.tile_scales.begin(), sb.tile_scales.end(),
                     [](std::uint8_t s) { return s <= kQ3MaxTileScale; });
}

bool is_valid(const SuperBlockQ8K& sb) noexcept {
  return scale_is_valid(sb.super_scale) &&
         std::none_of(sb.quants.begin(), sb.quants.end(), [](std::int8_t q) { return q == -128; });
}

SuperBlockQ3K quantize_q3k(std::span<const float, kSuperBlockSize> values) {
  require_finite(values);

  std::array<float, kTilesPerBlock> tile_scale{};
  float max_scale = 0.0f;
  for (std::size_t t = 0; t < kTilesPerBlock; ++t) {
    tile_scale[t] = abs_max(values.subspan(t * kTileSize, kTileSize)) / 4.0f;
    max_scale = std::max(max_scale, tile_scale[t]);
  }

  SuperBlockQ3K sb;
  sb.quants.fill(static_cast<std::uint8_t>(kQ3LevelOffset));
  sb.super_scale = encode_fp16(max_scale / static_cast<float>(kQ3MaxTileScale));
  const float d = decode_fp16(sb.super_scale);
  if (d == 0.0f) {
    sb.super_scale = 0;
    return sb;
  }

  for (std::size_t t = 0; t < kTilesPerBlock; ++t) {
    const int qs = clamp_round_div(tile_scale[t], d, 0, kQ3MaxTileScale);
    sb.tile_scales[t] = static_cast<std::uint8_t>(qs);
    if (qs == 0) continue;
    const float eff = d * static_cast<float>(qs);
    for (std::size_t i = 0; i < kTileSize; ++i) {
      const std::size_t idx = t * kTileSize + i;
      const int level = clamp_round_div(values[idx], eff, kQ3LevelMin, kQ3LevelMax);
      sb.quants[idx] = static_cast<std::uint8_t>(level + kQ3LevelOffset);
    }
  }
  return sb;
}

DequantTile dequantize_q3k_tile(const SuperBlockQ3K& sb, std::size_t tile) {
  const float scale = decode_fp16(sb.super_scale) * static_cast<float>(sb.tile_scales[tile]);
  DequantTile out;
  for (std::size_t i = 0; i < kTileSize; ++i) {
    out.values[i] = scale * static_cast<float>(sb.level(tile * kTileSize + i));
  }
  return out;
}

std::array<float, kSuperBlockSize> dequantize_q3k(const SuperBlockQ3K& sb) {
  std::array<float, kSuperBlockSize> out{};
  for (std::size_t t = 0; t < kTilesPerBlock; ++t) {
    const DequantTile tile = dequantize_q3k_tile(sb, t);
    std::copy(tile.values.begin(), tile.values.end(), out.begin() + t * kTileSize);
  }
  return out;
}

SuperBlockQ8K quantize_q8k(std::span<const float, kSuperBlockSize> values) {
  require_finite(values);
  SuperBlockQ8K sb;
  const float amax = abs_max(values);
  if (amax == 0.0f) return sb;

  sb.super_scale = encode_fp16(amax / static_cast<float>(kQ8QuantMax));
  const float d = decode_fp16(sb.super_scale);
  if (d == 0.0f) {
    sb.super_scale = 0;
    return sb;
  }
  for (std::size_t i = 0; i < kSuperBlockSize; ++i) {
    sb.quants[i] = static_cast<std::int8_t>(clamp_round_div(values[i], d, -kQ8QuantMax, kQ8QuantMax));
  }
  return sb;
}

std::array<float, kSuperBlockSize> dequantize_q8k(const SuperBlockQ8K& sb) {
  const float d = decode_fp16(sb.super_scale);
  std::array<float, kSuperBlockSize> out{};
  for (std::size_t i = 0; i < kSuperBlockSize; ++i) out[i] = d * static_cast<float>(sb.quants[i]);
  return out;
}

PackedQ3K pack_q3k(const SuperBlockQ3K& sb) {
  PackedQ3K out{};
  std::span<std::uint8_t> bytes(out);
  for (std::size_t i = 0; i < kSuperBlockSize; ++i) put_bits(bytes, 3 * i, sb.quants[i] & 0x7u, 3);
  for (std::size_t t = 0; t < kTilesPerBlock; ++t) {
    put_bits(bytes, 8 * kQ3ScaleOffset + 6 * t, sb.tile_scales[t] & 0x3Fu, 6);
  }
  out[kQ3SuperOffset] = static_cast<std::uint8_t>(sb.super_scale & 0xFFu);
  out[kQ3SuperOffset + 1] = static_cast<std::uint8_t>(sb.super_scale >> 8);
  return out;
}

SuperBlockQ3K unpack_q3k(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kQ3KPackedBytes) {
    throw Error(ErrorKind::format, "Q3_K block must be " + std::to_string(kQ3KPackedBytes) +
                                       " bytes, got " + std::to_string(bytes.size()));
  }
  SuperBlockQ3K sb;
  for (std::size_t i = 0; i < kSuperBlockSize; ++i) {
    sb.quants[i] = static_cast<std::uint8_t>(get_bits(bytes, 3 * i, 3));
  }
  for (std::size_t t = 0; t < kTilesPerBlock; ++t) {
    sb.tile_scales[t] = static_cast<std::uint8_t>(get_bits(bytes, 8 * kQ3ScaleOffset + 6 * t, 6));
  }
  sb.super_scale = static_cast<std::uint16_t>(bytes[kQ3SuperOffset] | (bytes[kQ3SuperOffset + 1] << 8));
  if (!scale_is_valid(sb.super_scale)) {
    throw Error(ErrorKind::format, "Q3_K super scale is negative or not finite", kQ3SuperOffset);
  }
  return sb;
}

PackedQ8K pack_q8k(const SuperBlockQ8K& sb) {
  PackedQ8K out{};
  for (std::size_t i = 0; i < kSuperBlockSize; ++i) out[i] = static_cast<std::uint8_t>(sb.quants[i]);
  out[kSuperBlockSize] = static_cast<std::uint8_t>(sb.super_scale & 0xFFu);
  out[kSuperBlockSize + 1] = static_cast<std::uint8_t>(sb.super_scale >> 8);
  return out;
}

SuperBlockQ8K unpack_q8k(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kQ8KPackedBytes) {
    throw Error(ErrorKind::format, "Q8_K block must be " + std::to_string(kQ8KPackedBytes) +
                                       " bytes, got " + std::to_string(bytes.size()));
  }
  SuperBlockQ8K sb;
  for (std::size_t i = 0; i < kSuperBlockSize; ++i) {
    if (bytes[i] == 0x80u) throw Error(ErrorKind::format, "Q8_K quant -128 is not allowed", i);
    sb.quants[i] = static_cast<std::int8_t>(bytes[i]);
  }
  sb.super_scale =
      static_cast<std::uint16_t>(bytes[kSuperBlockSize] | (bytes[kSuperBlockSize + 1] << 8));
  if (!scale_is_valid(sb.super_scale)) {
    throw Error(ErrorKind::format, "Q8_K super scale is negative or not finite", kSuperBlockSize);
  }
  return sb;
}

namespace {

template <typename Block, typename Quantizer>
std::vector<Block> quantize_rows(std::span<const float> matrix, std::size_t rows, std::size_t cols,
                                 Quantizer quantize) {
  if (cols == 0 || cols % kSuperBlockSize != 0) {
    throw Error(ErrorKind::shape,
                "column count " + std::to_string(cols) + " is not a positive multiple of 256");
  }
  if (matrix.size() != rows * cols) {
    throw Error(ErrorKind::shape, "matrix has " + std::to_string(matrix.size()) +
                                      " elements, expected " + std::to_string(rows * cols));
  }
  const std::size_t per_row = cols / kSuperBlockSize;
  std::vector<Block> blocks;
  blocks.reserve(rows * per_row);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < per_row; ++k) {
      blocks.push_back(quantize(
          matrix.subspan(r * cols + k * kSuperBlockSize).template first<kSuperBlockSize>()));
    }
  }
  return blocks;
}

}  // namespace

std::vector<SuperBlockQ3K> quantize_tensor_q3k(std::span<const float> matrix, std::size_t rows,
                                               std::size_t cols) {
  return quantize_rows<SuperBlockQ3K>(matrix, rows, cols, quantize_q3k);
}

std::vector<SuperBlockQ8K> quantize_tensor_q8k(std::span<const float> matrix, std::size_t rows,
                                               std::size_t cols) {
  return quantize_rows<SuperBlockQ8K>(matrix, rows, cols, quantize_q8k);
}

}  // namespace sbaccel::codec
