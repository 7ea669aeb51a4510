// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include "sbaccel/fp16.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "sbaccel/error.hpp"

namespace sbaccel::codec {

std::uint16_t encode_fp16(float x) {
  if (!std::isfinite(x) || std::fabs(x) > kFp16MaxFinite) {
    throw Error(ErrorKind::range, "value " + std::to_string(x) + " not representable as binary16");
  }
  const std::uint32_t f = std::bit_cast<std::uint32_t>(x);
  const std::uint16_t sign = static_cast<std::uint16_t>((f >> 16) & 0x8000u);
  const std::uint32_t abs = f & 0x7FFFFFFFu;
  const int exp = static_cast<int>(abs >> 23) - 127;

  std::uint32_t mant;
  int shift;
  std::uint32_t base;
  if (exp >= -14) {
    // Normal range: keep 10 of the 23 mantissa bits.
    mant = abs & 0x007FFFFFu;
    shift = 13;
    base = (static_cast<std::uint32_t>(exp + 15) << 10);
  } else {
    // Subnormal (or zero) in binary16: value = m * 2^-24.
    if (exp < -25) return sign;  // below half the smallest subnormal
    mant = (abs & 0x007FFFFFu) | 0x00800000u;
    shift = 13 + (-14 - exp);
    base = 0;
  }
  std::uint32_t half = mant >> shift;
  const std::uint32_t rem = mant & ((1u << shift) - 1u);
  const std::uint32_t halfway = 1u << (shift - 1);
  if (rem > halfway || (rem == halfway && (half & 1u))) ++half;
  // A mantissa carry rolls into the exponent field, which is the correct
  // result (including subnormal -> smallest normal).
  return static_cast<std::uint16_t>(sign | (base + half));
}

float decode_fp16(std::uint16_t bits) {
  if (!fp16_is_finite(bits)) {
    throw Error(ErrorKind::format, "binary16 pattern " + std::to_string(bits) + " is not finite");
  }
  const std::uint32_t sign = static_cast<std::uint32_t>(bits & 0x8000u) << 16;
  const std::uint32_t exp = (bits >> 10) & 0x1Fu;
  const std::uint32_t mant = bits & 0x03FFu;
  if (exp == 0) {
    const float mag = std::ldexp(static_cast<float>(mant), -24);
    return sign ? -mag : mag;
  }
  return std::bit_cast<float>(sign | ((exp + 112u) << 23) | (mant << 13));
}

}  // namespace sbaccel::codec
