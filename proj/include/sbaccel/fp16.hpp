// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace sbaccel::codec {

inline constexpr float kFp16MaxFinite = 65504.0f;

// IEEE 754 binary16, round-to-nearest-even. Throws range error for
// non-finite input or |x| > 65504.
std::uint16_t encode_fp16(float x);

// Exact widening of a finite binary16 pattern. Throws format error on
// Inf/NaN patterns.
float decode_fp16(std::uint16_t bits);

constexpr bool fp16_is_finite(std::uint16_t bits) noexcept {
  return (bits & 0x7C00u) != 0x7C00u;
}

// Round-trips a scale through binary16, the value the quantizers use.
inline float round_to_fp16(float x) { return decode_fp16(encode_fp16(x)); }

}  // namespace sbaccel::codec
