// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include "sbaccel/tensor_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "sbaccel/error.hpp"

namespace sbaccel::workload {

namespace {

constexpr char kMagic[4] = {'B', 'F', 'P', 'T'};
constexpr std::size_t kFixedHeader = 10;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t offset, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes[offset + i]) << (8 * i);
  return v;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    throw Error(ErrorKind::shape, "tensor dims overflow");
  }
  return a * b;
}

std::uint64_t product(std::span<const std::uint64_t> dims) {
  std::uint64_t n = 1;
  for (auto d : dims) n = checked_mul(n, d);
  return n;
}

}  // namespace

std::string_view to_string(DType dtype) {
  switch (dtype) {
    case DType::float32: return "float32";
    case DType::q3k: return "q3k";
    case DType::q8k: return "q8k";
  }
  return "?";
}

std::uint64_t payload_bytes(DType dtype, std::span<const std::uint64_t> dims) {
  if (dims.empty() || dims.size() > kMaxDims) {
    throw Error(ErrorKind::shape, "tensor must have between 1 and 8 dims");
  }
  for (auto d : dims) {
    if (d == 0) throw Error(ErrorKind::shape, "tensor dims must be positive");
  }
  const std::uint64_t elems = product(dims);
  switch (dtype) {
    case DType::float32: return checked_mul(elems, 4);
    case DType::q3k:
    case DType::q8k: {
      if (dims.back() % codec::kSuperBlockSize != 0) {
        throw Error(ErrorKind::shape, "last dim " + std::to_string(dims.back()) +
                                          " is not a multiple of 256");
      }
      const std::uint64_t per_block =
          dtype == DType::q3k ? codec::kQ3KPackedBytes : codec::kQ8KPackedBytes;
      return checked_mul(elems / codec::kSuperBlockSize, per_block);
    }
  }
  throw Error(ErrorKind::format, "unknown dtype");
}

std::uint64_t Tensor::element_count() const { return dims.empty() ? 0 : product(dims); }

std::uint64_t Tensor::rows() const {
  return dims.empty() ? 0 : product(std::span(dims).first(dims.size() - 1));
}

Tensor Tensor::from_floats(std::vector<std::uint64_t> dims, std::span<const float> values) {
  Tensor t{DType::float32, std::move(dims), {}};
  if (payload_bytes(t.dtype, t.dims) != values.size() * 4) {
    throw Error(ErrorKind::shape, "value count does not match dims");
  }
  t.payload.reserve(values.size() * 4);
  for (float v : values) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) t.payload.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  return t;
}

Tensor Tensor::from_q3k(std::vector<std::uint64_t> dims,
                        std::span<const codec::SuperBlockQ3K> blocks) {
  Tensor t{DType::q3k, std::move(dims), {}};
  if (payload_bytes(t.dtype, t.dims) != blocks.size() * codec::kQ3KPackedBytes) {
    throw Error(ErrorKind::shape, "block count does not match dims");
  }
  for (const auto& b : blocks) {
    const auto packed = codec::pack_q3k(b);
    t.payload.insert(t.payload.end(), packed.begin(), packed.end());
  }
  return t;
}

Tensor Tensor::from_q8k(std::vector<std::uint64_t> dims,
                        std::span<const codec::SuperBlockQ8K> blocks) {
  Tensor t{DType::q8k, std::move(dims), {}};
  if (payload_bytes(t.dtype, t.dims) != blocks.size() * codec::kQ8KPackedBytes) {
    throw Error(ErrorKind::shape, "block count does not match dims");
  }
  for (const auto& b : blocks) {
    const auto packed = codec::pack_q8k(b);
    t.payload.insert(t.payload.end(), packed.begin(), packed.end());
  }
  return t;
}

std::vector<float> Tensor::to_floats() const {
  if (dtype != DType::float32) throw Error(ErrorKind::format, "tensor is not float32");
  std::vector<float> out(payload.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(payload, 4 * i, 4)));
  }
  return out;
}

std::vector<codec::SuperBlockQ3K> Tensor::to_q3k() const {
  if (dtype != DType::q3k) throw Error(ErrorKind::format, "tensor is not packed Q3_K");
  std::vector<codec::SuperBlockQ3K> out;
  for (std::size_t off = 0; off < payload.size(); off += codec::kQ3KPackedBytes) {
    out.push_back(codec::unpack_q3k(std::span(payload).subspan(off, codec::kQ3KPackedBytes)));
  }
  return out;
}

std::vector<codec::SuperBlockQ8K> Tensor::to_q8k() const {
  if (dtype != DType::q8k) throw Error(ErrorKind::format, "tensor is not packed Q8_K");
  std::vector<codec::SuperBlockQ8K> out;
  for (std::size_t off = 0; off < payload.size(); off += codec::kQ8KPackedBytes) {
    out.push_back(codec::unpack_q8k(std::span(payload).subspan(off, codec::kQ8KPackedBytes)));
  }
  return out;
}

std::vector<std::uint8_t> serialize_tensor(const Tensor& t) {
  if (payload_bytes(t.dtype, t.dims) != t.payload.size()) {
    throw Error(ErrorKind::shape, "payload length does not match dtype and dims");
  }
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u16(out, kTensorFileVersion);
  put_u16(out, static_cast<std::uint16_t>(t.dtype));
  put_u16(out, static_cast<std::uint16_t>(t.dims.size()));
  for (auto d : t.dims) put_u64(out, d);
  out.insert(out.end(), t.payload.begin(), t.payload.end());
  return out;
}

Tensor parse_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFixedHeader) {
    throw Error(ErrorKind::format, "truncated header", bytes.size());
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw Error(ErrorKind::format, "bad magic", 0);
  if (get_le(bytes, 4, 2) != kTensorFileVersion) {
    throw Error(ErrorKind::format, "unsupported version " + std::to_string(get_le(bytes, 4, 2)), 4);
  }
  const auto dtype_code = get_le(bytes, 6, 2);
  if (dtype_code > 2) throw Error(ErrorKind::format, "unknown dtype " + std::to_string(dtype_code), 6);
  const auto ndim = static_cast<std::size_t>(get_le(bytes, 8, 2));
  if (ndim == 0 || ndim > kMaxDims) {
    throw Error(ErrorKind::format, "ndim " + std::to_string(ndim) + " outside [1, 8]", 8);
  }
  const std::size_t header = kFixedHeader + 8 * ndim;
  if (bytes.size() < header) throw Error(ErrorKind::format, "truncated dims", bytes.size());

  Tensor t;
  t.dtype = static_cast<DType>(dtype_code);
  for (std::size_t i = 0; i < ndim; ++i) {
    const auto d = get_le(bytes, kFixedHeader + 8 * i, 8);
    if (d == 0) throw Error(ErrorKind::format, "zero-length dim", kFixedHeader + 8 * i);
    t.dims.push_back(d);
  }
  std::uint64_t expected = 0;
  try {
    expected = payload_bytes(t.dtype, t.dims);
  } catch (const Error& e) {
    throw Error(ErrorKind::format, e.what(), kFixedHeader);
  }
  const std::uint64_t actual = bytes.size() - header;
  if (actual != expected) {
    throw Error(ErrorKind::format,
                "payload is " + std::to_string(actual) + " bytes, dims imply " + std::to_string(expected),
                actual < expected ? bytes.size() : header + expected);
  }
  t.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return t;
}

void write_tensor(const std::string& path, const Tensor& t) {
  const auto bytes = serialize_tensor(t);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "write to '" + path + "' failed");
}

Tensor read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return parse_tensor(bytes);
}

}  // namespace sbaccel::workload
