// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

// BFPT tensor container, little-endian:
//
//   offset 0   magic "BFPT"
//          4   u16 version (1)
//          6   u16 dtype (0 float32, 1 packed Q3_K, 2 packed Q8_K)
//          8   u16 ndim (>= 1)
//         10   u64 dims[ndim] (each >= 1)
//          .   payload, row-major
//
// For quantized dtypes the dims are logical element dims; the last dim must
// be a multiple of 256 and the payload is the sequence of packed blocks
// (110 or 258 bytes each) in row-major block order.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sbaccel/codec.hpp"

namespace sbaccel::workload {

enum class DType : std::uint16_t { float32 = 0, q3k = 1, q8k = 2 };

inline constexpr std::uint16_t kTensorFileVersion = 1;
inline constexpr std::size_t kMaxDims = 8;

struct Tensor {
  DType dtype = DType::float32;
  std::vector<std::uint64_t> dims;
  std::vector<std::uint8_t> payload;

  std::uint64_t element_count() const;
  // Rows when viewed as a 2-D matrix (product of all but the last dim).
  std::uint64_t rows() const;
  std::uint64_t cols() const { return dims.empty() ? 0 : dims.back(); }

  static Tensor from_floats(std::vector<std::uint64_t> dims, std::span<const float> values);
  static Tensor from_q3k(std::vector<std::uint64_t> dims,
                         std::span<const codec::SuperBlockQ3K> blocks);
  static Tensor from_q8k(std::vector<std::uint64_t> dims,
                         std::span<const codec::SuperBlockQ8K> blocks);

  std::vector<float> to_floats() const;
  std::vector<codec::SuperBlockQ3K> to_q3k() const;
  std::vector<codec::SuperBlockQ8K> to_q8k() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

std::string_view to_string(DType dtype);

// Exact payload size implied by dtype and dims. Throws shape error when the
// dims are invalid for the dtype.
std::uint64_t payload_bytes(DType dtype, std::span<const std::uint64_t> dims);

std::vector<std::uint8_t> serialize_tensor(const Tensor& t);
Tensor parse_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const std::string& path, const Tensor& t);
Tensor read_tensor(const std::string& path);

}  // namespace sbaccel::workload
