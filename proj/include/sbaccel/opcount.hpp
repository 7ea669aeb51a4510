// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Per-token operation count of a decoder-only transformer, split into
// weight MatMul MACs and everything else.
//
// Counting convention (one token at KV-cache length `context`):
//   weight MatMuls, per layer: Q and O projections hidden^2 each; K and V
//     projections hidden * n_kv_heads * head_dim each; FFN gate, up and
//     down hidden * ffn_size each. Plus the LM head hidden * vocab_size.
//   attention, per layer: QK^T scores and attention x V, each
//     n_heads * context * head_dim MACs.
//   element ops, 1 op per element: softmax n_heads * context per layer;
//     two RMSNorms and two residual adds of width hidden per layer; one
//     final norm of width hidden.

#include <cstdint>
#include <string>
#include <string_view>

namespace sbaccel::workload {

struct ModelShape {
  std::uint64_t hidden_size = 0;
  std::uint64_t n_layers = 0;
  std::uint64_t n_heads = 0;
  std::uint64_t n_kv_heads = 0;
  std::uint64_t head_dim = 0;
  std::uint64_t ffn_size = 0;
  std::uint64_t vocab_size = 0;
  std::uint64_t context_len = 0;

  void validate() const;

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

// Public TinyLlama v1.1 configuration (1.1B parameters).
ModelShape tinyllama_shape();

// Same key = value syntax as accel.cfg; all eight keys are required.
ModelShape parse_model_shape(std::string_view text);
ModelShape load_model_shape(const std::string& path);

struct OpBreakdown {
  std::uint64_t qkv_projection_macs = 0;
  std::uint64_t attention_output_macs = 0;
  std::uint64_t ffn_macs = 0;
  std::uint64_t lm_head_macs = 0;
  std::uint64_t weight_matmul_macs = 0;

  std::uint64_t attention_score_macs = 0;
  std::uint64_t attention_value_macs = 0;
  std::uint64_t softmax_ops = 0;
  std::uint64_t norm_ops = 0;
  std::uint64_t residual_ops = 0;
  std::uint64_t other_ops = 0;

  std::uint64_t total_ops = 0;
  double matmul_fraction = 0.0;
};

OpBreakdown opcount(const ModelShape& shape, std::uint64_t context);

}  // namespace sbaccel::workload
