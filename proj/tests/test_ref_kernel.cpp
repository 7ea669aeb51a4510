// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sbaccel/codec.hpp"
#include "sbaccel/error.hpp"
#include "sbaccel/fp16.hpp"
#include "sbaccel/ref_kernel.hpp"
#include "test_support.hpp"

namespace sbaccel::kernel {
namespace {

using codec::SuperBlockQ3K;
using codec::SuperBlockQ8K;
using testing::Rng;

// Dequantize both blocks at unit super-scale so every element is an exact
// integer, sum the products in double, then apply the two scales.
float dequant_oracle(SuperBlockQ3K w, SuperBlockQ8K x) {
  const float dw = codec::decode_fp16(w.super_scale);
  const float dx = codec::decode_fp16(x.super_scale);
  w.super_scale = 0x3C00;
  x.super_scale = 0x3C00;
  const auto a = codec::dequantize_q3k(w);
  const auto b = codec::dequantize_q8k(x);
  double core = 0.0;
  for (std::size_t i = 0; i < 256; ++i) core += double(a[i]) * double(b[i]);
  return dw * dx * static_cast<float>(core);
}

TEST(DotSuperblock, ZeroWeightScaleGivesZero) {
  Rng rng(21);
  auto w = testing::random_q3k(rng);
  w.super_scale = 0;
  for (int i = 0; i < 10; ++i) EXPECT_EQ(dot_superblock(w, testing::random_q8k(rng)), 0.0f);
}

TEST(DotSuperblock, HandWorked96) {
  EXPECT_EQ(dot_superblock_int(testing::hand_weight_block(), testing::hand_input_block()), 96);
  EXPECT_EQ(dot_superblock(testing::hand_weight_block(), testing::hand_input_block()), 96.0f);
}

TEST(DotSuperblock, MatchesDequantizeOracleBitExact) {
  Rng rng(22);
  for (int i = 0; i < 1000; ++i) {
    const auto w = testing::random_q3k(rng);
    const auto x = testing::random_q8k(rng);
    const float got = dot_superblock(w, x);
    ASSERT_EQ(testing::float_bits(got), testing::float_bits(dequant_oracle(w, x))) << i;
  }
}

TEST(DotSuperblock, ExtremeOperandsStayInsideBound) {
  SuperBlockQ3K w;
  w.quants.fill(0);  // level -4
  w.tile_scales.fill(63);
  w.super_scale = 0x3C00;
  SuperBlockQ8K x;
  x.quants.fill(-127);
  x.super_scale = 0x3C00;
  const std::int32_t acc = dot_superblock_int(w, x);
  EXPECT_EQ(acc, 16 * 63 * 16 * 4 * 127);
  EXPECT_LE(acc, kDotAccumulatorBound);
}

TEST(DotSuperblock, BilinearInWeightScale) {
  Rng rng(23);
  for (int i = 0; i < 500; ++i) {
    auto w = testing::random_q3k(rng);
    w.super_scale = testing::random_scale(rng, 5, 14);
    const auto x = testing::random_q8k(rng);
    const float base = dot_superblock(w, x);
    auto w2 = w;
    w2.super_scale = static_cast<std::uint16_t>(w.super_scale + (1u << 10));  // alpha = 2
    ASSERT_EQ(dot_superblock(w2, x), 2.0f * base);
    auto wh = w;
    wh.super_scale = static_cast<std::uint16_t>(w.super_scale - (1u << 10));  // alpha = 0.5
    ASSERT_EQ(dot_superblock(wh, x), 0.5f * base);
  }
}

TEST(DotSuperblock, InvariantUnderWithinTilePermutation) {
  Rng rng(24);
  for (int iter = 0; iter < 200; ++iter) {
    auto w = testing::random_q3k(rng);
    auto x = testing::random_q8k(rng);
    const float base = dot_superblock(w, x);
    std::array<std::size_t, 16> perm{};
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto wp = w;
    auto xp = x;
    for (std::size_t t = 0; t < 16; ++t) {
      for (std::size_t i = 0; i < 16; ++i) {
        wp.quants[16 * t + i] = w.quants[16 * t + perm[i]];
        xp.quants[16 * t + i] = x.quants[16 * t + perm[i]];
      }
    }
    ASSERT_EQ(testing::float_bits(dot_superblock(wp, xp)), testing::float_bits(base));
  }
}

TEST(MatMulQ3KQ8K, ZeroWeights) {
  Rng rng(25);
  const QuantMatMulDims dims{3, 5, 512};
  std::vector<SuperBlockQ3K> w(5 * 2);
  for (auto& b : w) b.quants.fill(4);
  const auto x = testing::random_q8k_blocks(rng, 3 * 2);
  const auto out = matmul_q3k_q8k(w, x, dims);
  ASSERT_EQ(out.rows, 3u);
  ASSERT_EQ(out.cols, 5u);
  for (float v : out.values) EXPECT_EQ(v, 0.0f);
}

TEST(MatMulQ3KQ8K, TwoHandBlocksGive192) {
  const std::vector<SuperBlockQ3K> w(2, testing::hand_weight_block());
  const std::vector<SuperBlockQ8K> x(2, testing::hand_input_block());
  const auto out = matmul_q3k_q8k(w, x, {1, 1, 512});
  EXPECT_EQ(out.at(0, 0), 192.0f);
}

TEST(MatMulQ3KQ8K, MatchesNaiveTripleLoop) {
  Rng rng(26);
  const std::size_t M = 4, N = 8, Kb = 4;
  const auto w = testing::random_q3k_blocks(rng, N * Kb);
  const auto x = testing::random_q8k_blocks(rng, M * Kb);
  const auto out = matmul_q3k_q8k(w, x, {M, N, Kb * 256});
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t n = 0; n < N; ++n) {
      float acc = 0.0f;
      for (std::size_t k = 0; k < Kb; ++k) acc += dequant_oracle(w[n * Kb + k], x[m * Kb + k]);
      ASSERT_EQ(testing::float_bits(out.at(m, n)), testing::float_bits(acc)) << m << "," << n;
    }
  }
}

TEST(MatMulQ3KQ8K, ShapeErrors) {
  Rng rng(27);
  const auto w = testing::random_q3k_blocks(rng, 2);
  const auto x = testing::random_q8k_blocks(rng, 1);
  try {
    matmul_q3k_q8k(w, x, {1, 1, 512});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::shape);
  }
  EXPECT_THROW(matmul_q3k_q8k(w, x, {1, 2, 300}), Error);
  EXPECT_THROW(matmul_q3k_q8k(w, x, {0, 2, 256}), Error);
}

TEST(MatMulFp32, SmallCases) {
  const std::vector<float> ones(256, 1.0f);
  EXPECT_EQ(matmul_fp32(ones, ones, 1, 1, 256).at(0, 0), 256.0f);

  const std::vector<float> a = {1, 0, 0, 1};
  const std::vector<float> b = {3, 4, 5, 6};
  const auto out = matmul_fp32(a, b, 2, 2, 2);
  EXPECT_EQ(out.at(0, 0), 3.0f);
  EXPECT_EQ(out.at(0, 1), 5.0f);
  EXPECT_EQ(out.at(1, 0), 4.0f);
  EXPECT_EQ(out.at(1, 1), 6.0f);

  EXPECT_THROW(matmul_fp32(a, b, 2, 2, 3), Error);
}

TEST(MatMulFp32, ReverseOrderSummation) {
  Rng rng(28);
  std::normal_distribution<float> dist;
  const std::size_t M = 4, N = 4, K = 512;
  std::vector<float> a(M * K), b(N * K);
  for (auto& v : a) v = dist(rng);
  for (auto& v : b) v = dist(rng);
  const auto out = matmul_fp32(a, b, M, N, K);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t n = 0; n < N; ++n) {
      long double acc = 0;
      for (std::size_t k = K; k-- > 0;) acc += static_cast<long double>(a[m * K + k]) * b[n * K + k];
      const double ref = static_cast<double>(acc);
      ASSERT_LE(std::fabs(out.at(m, n) - ref), 1e-4 * std::max(1.0, std::fabs(ref)));
    }
  }
}

// Quantized matmul against the float reference. There is no fixed threshold
// to meet, so the relative Frobenius error is only reported and checked to be
// finite and below 1.
TEST(MatMulQ3KQ8K, FrobeniusErrorVsFp32IsReported) {
  Rng rng(29);
  std::normal_distribution<float> wd(0.0f, 0.05f), xd(0.0f, 1.0f);
  const std::size_t M = 4, N = 16, K = 1024;
  std::vector<float> wf(N * K), xf(M * K);
  for (auto& v : wf) v = wd(rng);
  for (auto& v : xf) v = xd(rng);
  const auto wq = codec::quantize_tensor_q3k(wf, N, K);
  const auto xq = codec::quantize_tensor_q8k(xf, M, K);
  const auto q = matmul_q3k_q8k(wq, xq, {M, N, K});
  const auto f = matmul_fp32(xf, wf, M, N, K);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < q.values.size(); ++i) {
    num += std::pow(double(q.values[i]) - f.values[i], 2);
    den += std::pow(double(f.values[i]), 2);
  }
  const double rel = std::sqrt(num / den);
  RecordProperty("relative_frobenius_error", std::to_string(rel));
  std::printf("relative Frobenius error (Q3_K x Q8_K vs fp32): %.6f\n", rel);
  EXPECT_TRUE(std::isfinite(rel));
  EXPECT_LT(rel, 1.0);
}

}  // namespace
}  // namespace sbaccel::kernel
