// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include "sbaccel/ref_kernel.hpp"

#include <cassert>
#include <cstdlib>
#include <string>

#include "sbaccel/error.hpp"
#include "sbaccel/fp16.hpp"

namespace sbaccel::kernel {

using codec::kSuperBlockSize;
using codec::kTileSize;
using codec::kTilesPerBlock;

void QuantMatMulDims::validate() const {
  if (m == 0 || n == 0 || k == 0) {
    throw Error(ErrorKind::shape, "MatMul dimensions must be positive");
  }
  if (k % kSuperBlockSize != 0) {
    throw Error(ErrorKind::shape, "K = " + std::to_string(k) + " is not a multiple of 256");
  }
}

std::int32_t dot_superblock_int(const codec::SuperBlockQ3K& w, const codec::SuperBlockQ8K& x) {
  std::int32_t acc = 0;
  for (std::size_t t = 0; t < kTilesPerBlock; ++t) {
    std::int32_t tile_sum = 0;
    for (std::size_t i = t * kTileSize; i < (t + 1) * kTileSize; ++i) {
      tile_sum += w.level(i) * static_cast<std::int32_t>(x.quants[i]);
    }
    acc += static_cast<std::int32_t>(w.tile_scales[t]) * tile_sum;
  }
  assert(std::abs(acc) <= kDotAccumulatorBound);
  return acc;
}

float dot_superblock(const codec::SuperBlockQ3K& w, const codec::SuperBlockQ8K& x) {
  const float dw = codec::decode_fp16(w.super_scale);
  const float dx = codec::decode_fp16(x.super_scale);
  const float core = static_cast<float>(dot_superblock_int(w, x));
  return dw * dx * core;
}

OutputMatrix matmul_q3k_q8k(std::span<const codec::SuperBlockQ3K> weights,
                            std::span<const codec::SuperBlockQ8K> inputs,
                            const QuantMatMulDims& dims) {
  dims.validate();
  const std::size_t kb = dims.k_blocks();
  if (weights.size() != dims.n * kb || inputs.size() != dims.m * kb) {
    throw Error(ErrorKind::shape, "block arrays do not match dims (weights " +
                                      std::to_string(weights.size()) + ", inputs " +
                                      std::to_string(inputs.size()) + ")");
  }
  OutputMatrix out(dims.m, dims.n);
  for (std::size_t m = 0; m < dims.m; ++m) {
    for (std::size_t n = 0; n < dims.n; ++n) {
      float acc = 0.0f;
      for (std::size_t k = 0; k < kb; ++k) acc += dot_superblock(weights[n * kb + k], inputs[m * kb + k]);
      out.at(m, n) = acc;
    }
  }
  return out;
}

OutputMatrix matmul_fp32(std::span<const float> a, std::span<const float> b, std::size_t m,
                         std::size_t n, std::size_t k) {
  if (a.size() != m * k || b.size() != n * k) {
    throw Error(ErrorKind::shape, "fp32 operands do not match M x K and N x K");
  }
  OutputMatrix out(m, n);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        acc += static_cast<double>(a[r * k + i]) * static_cast<double>(b[c * k + i]);
      }
      out.at(r, c) = static_cast<float>(acc);
    }
  }
  return out;
}

}  // namespace sbaccel::kernel
