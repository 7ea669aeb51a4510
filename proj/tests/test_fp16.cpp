// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "sbaccel/error.hpp"
#include "sbaccel/fp16.hpp"

namespace sbaccel::codec {
namespace {

TEST(Fp16, CanonicalEncodings) {
  EXPECT_EQ(encode_fp16(1.0f), 0x3C00);
  EXPECT_EQ(encode_fp16(0.0f), 0x0000);
  EXPECT_EQ(encode_fp16(65504.0f), 0x7BFF);
  EXPECT_EQ(encode_fp16(-2.0f), 0xC000);
  EXPECT_EQ(encode_fp16(-0.0f), 0x8000);
}

TEST(Fp16, CanonicalDecodings) {
  EXPECT_EQ(decode_fp16(0x3C00), 1.0f);
  EXPECT_EQ(decode_fp16(0x3800), 0.5f);
  EXPECT_EQ(decode_fp16(0x0001), std::ldexp(1.0f, -24));
  EXPECT_EQ(decode_fp16(0x7BFF), 65504.0f);
}

TEST(Fp16, RangeErrors) {
  for (float bad : {std::numeric_limits<float>::infinity(), -std::numeric_limits<float>::infinity(),
                    std::numeric_limits<float>::quiet_NaN(), 65505.0f, -70000.0f}) {
    try {
      encode_fp16(bad);
      FAIL() << "expected range error for " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::range);
    }
  }
}

TEST(Fp16, NonFinitePatternsRejected) {
  for (std::uint16_t bits : {0x7C00, 0xFC00, 0x7E00, 0x7C01}) {
    try {
      decode_fp16(bits);
      FAIL() << "expected format error for " << bits;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::format);
    }
  }
}

// Every finite pattern survives decode -> encode unchanged.
TEST(Fp16, ExhaustiveRoundTrip) {
  for (std::uint32_t b = 0; b <= 0xFFFF; ++b) {
    const auto bits = static_cast<std::uint16_t>(b);
    if (!fp16_is_finite(bits)) continue;
    ASSERT_EQ(encode_fp16(decode_fp16(bits)), bits) << std::hex << b;
  }
}

// Oracle: nearest non-negative binary16 by search over the sorted table of
// all finite values, ties to the even pattern.
std::uint16_t nearest_by_search(const std::vector<double>& table, double x) {
  const auto it = std::lower_bound(table.begin(), table.end(), x);
  if (it == table.begin()) return 0;
  const auto hi = static_cast<std::uint16_t>(it - table.begin());
  if (it == table.end()) return static_cast<std::uint16_t>(table.size() - 1);
  const auto lo = static_cast<std::uint16_t>(hi - 1);
  const double dlo = x - table[lo];
  const double dhi = table[hi] - x;
  if (dlo < dhi) return lo;
  if (dhi < dlo) return hi;
  return (lo & 1u) == 0 ? lo : hi;
}

TEST(Fp16, RoundToNearestEvenMatchesSearchOracle) {
  std::vector<double> table;
  for (std::uint16_t b = 0; b < 0x7C00; ++b) table.push_back(decode_fp16(b));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> exp_dist(-26.0, 15.99);
  std::uniform_real_distribution<double> mant(1.0, 2.0);
  for (int i = 0; i < 200000; ++i) {
    const float x = static_cast<float>(std::ldexp(mant(rng), static_cast<int>(exp_dist(rng))));
    if (x > kFp16MaxFinite) continue;
    ASSERT_EQ(encode_fp16(x), nearest_by_search(table, x)) << x;
    ASSERT_EQ(encode_fp16(-x), 0x8000 | nearest_by_search(table, x)) << -x;
  }
  // Exact midpoints between adjacent patterns exercise the tie rule.
  for (std::uint16_t b = 0; b + 1 < 0x7C00; b += 37) {
    const double mid = (table[b] + table[b + 1]) / 2.0;
    const auto f = static_cast<float>(mid);
    if (static_cast<double>(f) != mid) continue;
    ASSERT_EQ(encode_fp16(f), nearest_by_search(table, mid)) << mid;
  }
}

}  // namespace
}  // namespace sbaccel::codec
