// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sbaccel/codec.hpp"
#include "sbaccel/error.hpp"
#include "sbaccel/opcount.hpp"
#include "sbaccel/tensor_file.hpp"
#include "test_support.hpp"

namespace sbaccel::workload {
namespace {

using testing::Rng;

Error error_of(std::span<const std::uint8_t> bytes) {
  try {
    parse_tensor(bytes);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "parse_tensor did not throw";
  return Error(ErrorKind::io, "");
}

TEST(TensorFile, HeaderLayout) {
  const std::vector<float> v = {1.0f, -2.0f};
  const auto bytes = serialize_tensor(Tensor::from_floats({1, 2}, v));
  ASSERT_EQ(bytes.size(), 4u + 2 + 2 + 2 + 16 + 8);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "BFPT");
  EXPECT_EQ(bytes[4], 1);  // version
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(bytes[6], 0);  // float32
  EXPECT_EQ(bytes[8], 2);  // ndim
  EXPECT_EQ(bytes[10], 1);
  EXPECT_EQ(bytes[18], 2);
  EXPECT_EQ(bytes[26 + 3], 0x3F);  // 1.0f little-endian
  EXPECT_EQ(bytes[30 + 3], 0xC0);  // -2.0f
}

TEST(TensorFile, PayloadSizes) {
  const std::vector<std::uint64_t> d = {1, 256};
  EXPECT_EQ(payload_bytes(DType::q3k, d), 110u);
  EXPECT_EQ(payload_bytes(DType::q8k, d), 258u);
  EXPECT_EQ(payload_bytes(DType::float32, d), 1024u);
  const std::vector<std::uint64_t> d2 = {3, 2, 512};
  EXPECT_EQ(payload_bytes(DType::q3k, d2), 12u * 110);
}

TEST(TensorFile, RoundTripSeeded) {
  Rng rng(71);
  std::normal_distribution<float> dist;
  std::vector<float> values(3 * 512);
  for (auto& v : values) v = dist(rng);
  const auto f = Tensor::from_floats({3, 512}, values);
  EXPECT_EQ(parse_tensor(serialize_tensor(f)), f);
  EXPECT_EQ(parse_tensor(serialize_tensor(f)).to_floats(), values);

  const auto w = testing::random_q3k_blocks(rng, 6);
  const auto tw = Tensor::from_q3k({3, 512}, w);
  EXPECT_EQ(parse_tensor(serialize_tensor(tw)).to_q3k(), w);
  const auto x = testing::random_q8k_blocks(rng, 6);
  const auto tx = Tensor::from_q8k({3, 512}, x);
  EXPECT_EQ(parse_tensor(serialize_tensor(tx)).to_q8k(), x);

  const auto path = (std::filesystem::temp_directory_path() / "sbaccel_test_tensor.bfpt").string();
  write_tensor(path, tw);
  EXPECT_EQ(read_tensor(path), tw);
  std::remove(path.c_str());
}

TEST(TensorFile, FormatErrorsCarryOffsets) {
  const std::vector<float> v(4, 0.0f);
  const auto good = serialize_tensor(Tensor::from_floats({2, 2}, v));

  auto bad_magic = good;
  bad_magic[0] = 'X';
  auto e = error_of(bad_magic);
  EXPECT_EQ(e.kind(), ErrorKind::format);
  EXPECT_EQ(e.offset(), 0u);

  auto bad_version = good;
  bad_version[4] = 9;
  EXPECT_EQ(error_of(bad_version).offset(), 4u);

  auto bad_dtype = good;
  bad_dtype[6] = 7;
  EXPECT_EQ(error_of(bad_dtype).offset(), 6u);

  auto zero_dim = good;
  zero_dim[10] = 0;
  e = error_of(zero_dim);
  EXPECT_EQ(e.kind(), ErrorKind::format);
  EXPECT_EQ(e.offset(), 10u);

  const std::vector<std::uint8_t> truncated(good.begin(), good.end() - 1);
  EXPECT_EQ(error_of(truncated).kind(), ErrorKind::format);
  auto longer = good;
  longer.push_back(0);
  EXPECT_EQ(error_of(longer).kind(), ErrorKind::format);
  const std::vector<std::uint8_t> header_only(good.begin(), good.begin() + 7);
  EXPECT_EQ(error_of(header_only).kind(), ErrorKind::format);

  // A Q3_K tensor whose last dim is not a multiple of 256.
  auto q = serialize_tensor(Tensor::from_floats({2, 2}, v));
  q[6] = 1;
  EXPECT_EQ(error_of(q).kind(), ErrorKind::format);
}

TEST(TensorFile, MissingFileIsIoError) {
  try {
    read_tensor("/nonexistent/dir/x.bfpt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
}

TEST(TensorFile, QuantizedAccessorsCheckDtype) {
  const std::vector<float> v(256, 0.0f);
  const auto t = Tensor::from_floats({1, 256}, v);
  EXPECT_THROW(t.to_q3k(), Error);
  EXPECT_THROW(t.to_q8k(), Error);
}

TEST(ModelShapeParsing, TinyLlamaAndErrors) {
  const auto s = parse_model_shape(
      "# shape\nhidden_size = 2048\nn_layers = 22\nn_heads = 32\nn_kv_heads = 4\n"
      "head_dim = 64\nffn_size = 5632\nvocab_size = 32000\ncontext_len = 2048\n");
  EXPECT_EQ(s, tinyllama_shape());
  EXPECT_THROW(parse_model_shape("hidden_size = 2048\n"), Error);
  EXPECT_THROW(parse_model_shape("colour = 3\n"), Error);
  ModelShape bad = tinyllama_shape();
  bad.head_dim = 63;
  EXPECT_THROW(bad.validate(), Error);
  bad = tinyllama_shape();
  bad.n_kv_heads = 5;
  EXPECT_THROW(bad.validate(), Error);
}

// All sizes 1: weight MACs q + k + v + o + 3 ffn + lm head = 8; other ops
// per context position are score, value and softmax, plus 2 + 1 norms and
// 2 residual adds.
TEST(Opcount, DegenerateShapeHandCounted) {
  const ModelShape one{1, 1, 1, 1, 1, 1, 1, 1};
  for (std::uint64_t c : {1u, 2u, 10u}) {
    const auto b = opcount(one, c);
    EXPECT_EQ(b.weight_matmul_macs, 8u);
    EXPECT_EQ(b.other_ops, 3 * c + 5);
    EXPECT_EQ(b.total_ops, 8 + 3 * c + 5);
    EXPECT_DOUBLE_EQ(b.matmul_fraction, 8.0 / static_cast<double>(13 + 3 * c));
  }
  EXPECT_THROW(opcount(one, 0), Error);
}

TEST(Opcount, TinyLlamaContext64) {
  const auto b = opcount(tinyllama_shape(), 64);
  EXPECT_EQ(b.qkv_projection_macs, 115'343'360u);
  EXPECT_EQ(b.attention_output_macs, 92'274'688u);
  EXPECT_EQ(b.ffn_macs, 761'266'176u);
  EXPECT_EQ(b.lm_head_macs, 65'536'000u);
  EXPECT_EQ(b.weight_matmul_macs, 1'034'420'224u);
  EXPECT_EQ(b.attention_score_macs, 2'883'584u);
  EXPECT_EQ(b.attention_value_macs, 2'883'584u);
  EXPECT_EQ(b.softmax_ops, 45'056u);
  EXPECT_EQ(b.norm_ops, 92'160u);
  EXPECT_EQ(b.residual_ops, 90'112u);
  EXPECT_EQ(b.total_ops, 1'040'414'720u);
  EXPECT_NEAR(b.matmul_fraction, 0.97, 0.03);
}

TEST(Opcount, FractionStrictlyDecreasesWithContext) {
  double prev = 1.0;
  for (std::uint64_t c = 1; c <= 4096; c *= 2) {
    const double f = opcount(tinyllama_shape(), c).matmul_fraction;
    EXPECT_LT(f, prev) << c;
    prev = f;
  }
}

}  // namespace
}  // namespace sbaccel::workload
