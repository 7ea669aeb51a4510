// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <map>
#include <tuple>
#include <vector>

#include "sbaccel/driver.hpp"
#include "sbaccel/error.hpp"
#include "sbaccel/isa.hpp"
#include "sbaccel/profiler.hpp"
#include "sbaccel/ref_kernel.hpp"
#include "test_support.hpp"

namespace sbaccel::driver {
namespace {

using testing::Rng;

TEST(PlanTiling, SingleBlock) {
  const auto plan = plan_tiling({1, 1, 256}, sim::AcceleratorConfig{});
  ASSERT_EQ(plan.blocks.size(), 1u);
  EXPECT_EQ(plan.blocks[0], (TileBlock{0, 0, 0, 1, 1, 1}));
}

// k = min(8, 64, 64) = 8, n = min(128, 64/8, 4096) = 8, m = min(8, 64/8, 4096/8) = 8.
TEST(PlanTiling, DefaultCapacitiesHandDerived) {
  const auto plan = plan_tiling({8, 128, 8 * 256}, sim::AcceleratorConfig{});
  ASSERT_EQ(plan.blocks.size(), 16u);
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_EQ(plan.blocks[i], (TileBlock{0, 8 * i, 0, 8, 8, 8})) << i;
  }
}

TEST(PlanTiling, CoversIterationSpaceExactlyOnceWithAscendingK) {
  Rng rng(51);
  std::uniform_int_distribution<std::uint32_t> slots(1, 20), dim(1, 24), kb(1, 12);
  for (int iter = 0; iter < 300; ++iter) {
    sim::AcceleratorConfig cfg;
    cfg.weight_slots = slots(rng);
    cfg.input_slots = slots(rng);
    cfg.output_slots = slots(rng);
    const kernel::QuantMatMulDims dims{dim(rng), dim(rng), 256 * kb(rng)};
    const auto plan = plan_tiling(dims, cfg);
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, int> seen;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> next_k;
    for (const auto& b : plan.blocks) {
      ASSERT_LE(b.n_cnt * b.k_cnt, cfg.weight_slots);
      ASSERT_LE(b.m_cnt * b.k_cnt, cfg.input_slots);
      ASSERT_LE(b.m_cnt * b.n_cnt, cfg.output_slots);
      for (std::size_t m = b.m_off; m < b.m_off + b.m_cnt; ++m) {
        for (std::size_t n = b.n_off; n < b.n_off + b.n_cnt; ++n) {
          auto& expected_k = next_k[{m, n}];
          ASSERT_EQ(b.k_off, expected_k) << "k chunks out of order";
          expected_k = b.k_off + b.k_cnt;
          for (std::size_t k = b.k_off; k < b.k_off + b.k_cnt; ++k) ++seen[{m, n, k}];
        }
      }
    }
    ASSERT_EQ(seen.size(), dims.m * dims.n * dims.k_blocks());
    for (const auto& [key, count] : seen) ASSERT_EQ(count, 1);
  }
}

TEST(PlanTiling, ZeroCapacityIsCapacityError) {
  sim::AcceleratorConfig cfg;
  cfg.output_slots = 0;
  try {
    plan_tiling({1, 1, 256}, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::capacity);
  }
}

TEST(BuildStream, SinglePairIs104Words) {
  Rng rng(52);
  const auto w = testing::random_q3k_blocks(rng, 1);
  const auto x = testing::random_q8k_blocks(rng, 1);
  const auto plan = plan_tiling({1, 1, 256}, sim::AcceleratorConfig{});
  const auto stream = build_stream(plan, w, x);
  EXPECT_EQ(stream.size(), 104u);
  const auto decoded = isa::decode(stream);
  ASSERT_EQ(decoded.size(), 6u);
  EXPECT_EQ(decoded[0].instruction, isa::make_config(1, 1, 1));
  EXPECT_EQ(decoded[1].instruction, isa::make_load_w(0, w));
  EXPECT_EQ(decoded[2].instruction, isa::make_load_x(0, x));
  EXPECT_EQ(decoded[3].instruction, isa::make_compute(false));
  EXPECT_EQ(decoded[4].instruction, isa::make_store());
  EXPECT_EQ(decoded[5].instruction, isa::make_halt());
}

// Replays the decoded stream into tile descriptors and checks they match the
// plan, including the skipped LOAD_X when the input tile is unchanged.
TEST(BuildStream, DecodesBackToPlan) {
  Rng rng(53);
  sim::AcceleratorConfig cfg;
  cfg.weight_slots = 6;
  cfg.input_slots = 4;
  cfg.output_slots = 6;
  const kernel::QuantMatMulDims dims{5, 7, 256 * 5};
  const auto w = testing::random_q3k_blocks(rng, dims.n * 5);
  const auto x = testing::random_q8k_blocks(rng, dims.m * 5);
  const auto plan = plan_tiling(dims, cfg);
  const auto decoded = isa::decode(build_stream(plan, w, x));

  std::size_t i = 0;
  const TileBlock* prev = nullptr;
  for (const auto& b : plan.blocks) {
    ASSERT_EQ(decoded[i++].instruction,
              isa::make_config(static_cast<std::uint32_t>(b.m_cnt), static_cast<std::uint32_t>(b.n_cnt),
                               static_cast<std::uint32_t>(b.k_cnt)));
    ASSERT_EQ(decoded[i].instruction.opcode, isa::Opcode::load_w);
    ASSERT_EQ(decoded[i++].instruction.immediate, b.n_cnt * b.k_cnt);
    if (prev == nullptr || !reuses_inputs(*prev, b)) {
      ASSERT_EQ(decoded[i].instruction.opcode, isa::Opcode::load_x);
      ASSERT_EQ(decoded[i++].instruction.immediate, b.m_cnt * b.k_cnt);
    }
    ASSERT_EQ(decoded[i++].instruction, isa::make_compute(b.k_off != 0));
    if (plan.last_k_chunk(b)) {
      ASSERT_EQ(decoded[i++].instruction, isa::make_store());
    }
    prev = &b;
  }
  ASSERT_EQ(decoded[i++].instruction, isa::make_halt());
  EXPECT_EQ(i, decoded.size());
}

TEST(BuildStream, ShapeMismatch) {
  const auto plan = plan_tiling({1, 2, 256}, sim::AcceleratorConfig{});
  const std::vector<codec::SuperBlockQ3K> w(1);
  const std::vector<codec::SuperBlockQ8K> x(1);
  EXPECT_THROW(build_stream(plan, w, x), Error);
}

TEST(UnpackOutputs, SingleWord) {
  const auto plan = plan_tiling({1, 1, 256}, sim::AcceleratorConfig{});
  const std::vector<std::uint32_t> words = {0x43400000u};
  const auto out = unpack_outputs(words, plan);
  EXPECT_EQ(out.rows, 1u);
  EXPECT_EQ(out.at(0, 0), 192.0f);
}

TEST(UnpackOutputs, ScattersNBlocks) {
  sim::AcceleratorConfig cfg;
  cfg.output_slots = 4;  // m_cnt = 2, n_cnt = 2 for a 2x4 output
  cfg.weight_slots = 2;
  const auto plan = plan_tiling({2, 4, 256}, cfg);
  ASSERT_EQ(plan.blocks.size(), 2u);
  std::vector<std::uint32_t> words;
  // First STORE covers columns 0-1, second covers 2-3, each row-major.
  for (float v : {0.0f, 1.0f, 4.0f, 5.0f, 2.0f, 3.0f, 6.0f, 7.0f}) words.push_back(testing::float_bits(v));
  const auto out = unpack_outputs(words, plan);
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t n = 0; n < 4; ++n) EXPECT_EQ(out.at(m, n), static_cast<float>(m * 4 + n));
}

TEST(UnpackOutputs, WordCountMismatch) {
  const auto plan = plan_tiling({2, 2, 256}, sim::AcceleratorConfig{});
  const std::vector<std::uint32_t> three(3, 0u), five(5, 0u);
  try {
    unpack_outputs(three, plan);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::protocol);
  }
  EXPECT_THROW(unpack_outputs(five, plan), Error);
}

TEST(RunMatmul, BackendsAgreeBitForBit) {
  Rng rng(54);
  const kernel::QuantMatMulDims dims{4, 8, 512};
  const auto w = testing::random_q3k_blocks(rng, 16);
  const auto x = testing::random_q8k_blocks(rng, 8);
  const auto ref = run_matmul(w, x, dims, ReferenceBackend{});
  const auto sim = run_matmul(w, x, dims, SimulatorBackend{});
  EXPECT_TRUE(testing::bit_equal(ref.output, sim.output));
  EXPECT_FALSE(ref.sim_report.has_value());
  ASSERT_TRUE(sim.sim_report.has_value());
  EXPECT_EQ(sim.sim_report->superblock_dots, 4u * 8u * 2u);
}

TEST(RunMatmul, BackendsAgreeWithKSplits) {
  Rng rng(55);
  sim::AcceleratorConfig cfg;
  cfg.weight_slots = 3;
  cfg.input_slots = 2;
  cfg.output_slots = 5;
  for (std::size_t iter = 0; iter < 20; ++iter) {
    const kernel::QuantMatMulDims dims{1 + iter % 5, 1 + (iter * 7) % 13, 256 * (1 + iter % 6)};
    const auto w = testing::random_q3k_blocks(rng, dims.n * dims.k_blocks());
    const auto x = testing::random_q8k_blocks(rng, dims.m * dims.k_blocks());
    const auto ref = run_matmul(w, x, dims, ReferenceBackend{});
    const auto sim = run_matmul(w, x, dims, SimulatorBackend{cfg});
    ASSERT_TRUE(testing::bit_equal(ref.output, sim.output)) << iter;
  }
}

TEST(RunMatmul, ZeroWeightsGiveZeros) {
  Rng rng(56);
  std::vector<codec::SuperBlockQ3K> w(3);
  const auto x = testing::random_q8k_blocks(rng, 2);
  for (const Backend& b : {Backend{ReferenceBackend{}}, Backend{SimulatorBackend{}}}) {
    const auto r = run_matmul(w, x, {2, 3, 256}, b);
    for (float v : r.output.values) EXPECT_EQ(v, 0.0f);
  }
}

TEST(RunMatmul, CapacityErrorSurfaces) {
  Rng rng(57);
  const auto w = testing::random_q3k_blocks(rng, 1);
  const auto x = testing::random_q8k_blocks(rng, 1);
  sim::AcceleratorConfig cfg;
  cfg.output_slots = 0;
  try {
    run_matmul(w, x, {1, 1, 256}, SimulatorBackend{cfg});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::capacity);
    EXPECT_NE(std::string(e.what()).find("super-block"), std::string::npos);
  }
}

TEST(RunMatmul, PhaseProfilesPerBackend) {
  Rng rng(58);
  const kernel::QuantMatMulDims dims{2, 16, 1024};
  const auto w = testing::random_q3k_blocks(rng, 16 * 4);
  const auto x = testing::random_q8k_blocks(rng, 2 * 4);

  const auto sim = run_matmul(w, x, dims, SimulatorBackend{});
  using prof::DriverPhase;
  EXPECT_EQ(sim.profile[DriverPhase::send_input].blocks, 16u * 4 + 2 * 4);
  EXPECT_GT(sim.profile[DriverPhase::send_input].bytes, 0u);
  EXPECT_GT(sim.profile[DriverPhase::send_input].duration_ns, 0u);
  EXPECT_GT(sim.profile[DriverPhase::wait_compute].duration_ns, 0u);
  EXPECT_EQ(sim.profile[DriverPhase::unpack_output].bytes, 2u * 16 * 4);

  const auto ref = run_matmul(w, x, dims, ReferenceBackend{});
  EXPECT_EQ(ref.profile[DriverPhase::send_input], prof::PhaseStats{});
  EXPECT_EQ(ref.profile[DriverPhase::unpack_output], prof::PhaseStats{});
  EXPECT_GT(ref.profile[DriverPhase::wait_compute].duration_ns, 0u);
  EXPECT_EQ(ref.profile.total_ns(), ref.profile[DriverPhase::wait_compute].duration_ns);
}

}  // namespace
}  // namespace sbaccel::driver
