// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sbaccel/codec.hpp"

namespace sbaccel::kernel {

// Upper bound on |integer core| of one super-block dot product. The tight
// bound for valid blocks is 256 * 4 * 127 * 63 = 8 193 024; this constant
// also admits |q8| = 128.
inline constexpr std::int32_t kDotAccumulatorBound = 8'257'536;

// Shape of a quantized MatMul: out[M x N] = X[M x K] * W[N x K]^T.
struct QuantMatMulDims {
  std::size_t m = 1;
  std::size_t n = 1;
  std::size_t k = codec::kSuperBlockSize;

  std::size_t k_blocks() const { return k / codec::kSuperBlockSize; }
  void validate() const;

  friend bool operator==(const QuantMatMulDims&, const QuantMatMulDims&) = default;
};

// Row-major M x N result.
struct OutputMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;

  OutputMatrix() = default;
  OutputMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0f) {}

  float& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  float at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  friend bool operator==(const OutputMatrix&, const OutputMatrix&) = default;
};

// Exact integer core: sum_t scale_t * sum_i (qw - 4) * qx.
std::int32_t dot_superblock_int(const codec::SuperBlockQ3K& w, const codec::SuperBlockQ8K& x);

// d_w * d_x * float(core), multiplied in that order.
float dot_superblock(const codec::SuperBlockQ3K& w, const codec::SuperBlockQ8K& x);

// W is N x K_sb blocks (output-neuron major), X is M x K_sb blocks. Each
// output accumulates its per-block dots in float, ascending k, from 0.0f.
// This order is the bit-exactness contract with the simulator.
OutputMatrix matmul_q3k_q8k(std::span<const codec::SuperBlockQ3K> weights,
                            std::span<const codec::SuperBlockQ8K> inputs,
                            const QuantMatMulDims& dims);

// Full-precision oracle: A is M x K, B is N x K, accumulated in double.
OutputMatrix matmul_fp32(std::span<const float> a, std::span<const float> b, std::size_t m,
                         std::size_t n, std::size_t k);

}  // namespace sbaccel::kernel
