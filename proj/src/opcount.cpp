// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include "sbaccel/opcount.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "sbaccel/error.hpp"

namespace sbaccel::workload {

void ModelShape::validate() const {
  if (hidden_size == 0 || n_layers == 0 || n_heads == 0 || n_kv_heads == 0 || head_dim == 0 ||
      ffn_size == 0 || vocab_size == 0 || context_len == 0) {
    throw Error(ErrorKind::domain, "model shape fields must be positive");
  }
  if (hidden_size != n_heads * head_dim) {
    throw Error(ErrorKind::domain, "hidden_size must equal n_heads * head_dim");
  }
  if (n_heads % n_kv_heads != 0) {
    throw Error(ErrorKind::domain, "n_heads must be a multiple of n_kv_heads");
  }
}

ModelShape tinyllama_shape() {
  ModelShape s;
  s.hidden_size = 2048;
  s.n_layers = 22;
  s.n_heads = 32;
  s.n_kv_heads = 4;
  s.head_dim = 64;
  s.ffn_size = 5632;
  s.vocab_size = 32000;
  s.context_len = 2048;
  return s;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

ModelShape parse_model_shape(std::string_view text) {
  const std::map<std::string_view, std::uint64_t ModelShape::*> fields = {
      {"hidden_size", &ModelShape::hidden_size}, {"n_layers", &ModelShape::n_layers},
      {"n_heads", &ModelShape::n_heads},         {"n_kv_heads", &ModelShape::n_kv_heads},
      {"head_dim", &ModelShape::head_dim},       {"ffn_size", &ModelShape::ffn_size},
      {"vocab_size", &ModelShape::vocab_size},   {"context_len", &ModelShape::context_len},
  };
  ModelShape shape;
  std::map<std::string_view, bool> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::format, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = fields.find(key);
    if (it == fields.end()) throw Error(ErrorKind::format, "unknown shape key '" + std::string(key) + "'");
    std::uint64_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
      throw Error(ErrorKind::format, "bad integer for '" + std::string(key) + "'");
    }
    shape.*(it->second) = v;
    seen[it->first] = true;
  }
  for (const auto& [key, member] : fields) {
    if (!seen.count(key)) throw Error(ErrorKind::format, "missing shape key '" + std::string(key) + "'");
  }
  shape.validate();
  return shape;
}

ModelShape load_model_shape(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open model shape '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_shape(ss.str());
}

OpBreakdown opcount(const ModelShape& shape, std::uint64_t context) {
  shape.validate();
  if (context == 0) throw Error(ErrorKind::domain, "context must be positive");

  const std::uint64_t h = shape.hidden_size;
  const std::uint64_t kv_width = shape.n_kv_heads * shape.head_dim;
  const std::uint64_t layers = shape.n_layers;

  OpBreakdown b;
  b.qkv_projection_macs = layers * (h * h + 2 * h * kv_width);
  b.attention_output_macs = layers * h * h;
  b.ffn_macs = layers * 3 * h * shape.ffn_size;
  b.lm_head_macs = h * shape.vocab_size;
  b.weight_matmul_macs =
      b.qkv_projection_macs + b.attention_output_macs + b.ffn_macs + b.lm_head_macs;

  const std::uint64_t attn = shape.n_heads * context * shape.head_dim;
  b.attention_score_macs = layers * attn;
  b.attention_value_macs = layers * attn;
  b.softmax_ops = layers * shape.n_heads * context;
  b.norm_ops = layers * 2 * h + h;
  b.residual_ops = layers * 2 * h;
  b.other_ops = b.attention_score_macs + b.attention_value_macs + b.softmax_ops + b.norm_ops +
                b.residual_ops;

  b.total_ops = b.weight_matmul_macs + b.other_ops;
  b.matmul_fraction =
      static_cast<double>(b.weight_matmul_macs) / static_cast<double>(b.total_ops);
  return b;
}

}  // namespace sbaccel::workload
