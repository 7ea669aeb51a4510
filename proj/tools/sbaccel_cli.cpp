// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
//
// sbaccel: command-line front end for the super-block MatMul toolkit.
//
// Exit codes: 0 ok, 1 usage, 2 format or data error, 3 equivalence failure.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbaccel/accel_config.hpp"
#include "sbaccel/codec.hpp"
#include "sbaccel/driver.hpp"
#include "sbaccel/error.hpp"
#include "sbaccel/opcount.hpp"
#include "sbaccel/perf_model.hpp"
#include "sbaccel/profiler.hpp"
#include "sbaccel/ref_kernel.hpp"
#include "sbaccel/tensor_file.hpp"

namespace {

using namespace sbaccel;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFormat = 2;
constexpr int kExitMismatch = 3;

std::vector<std::uint64_t> parse_dims(const std::string& text, std::size_t expected) {
  std::vector<std::uint64_t> dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(item, &used);
      if (used != item.size() || v == 0) throw std::invalid_argument(item);
      dims.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::usage, "bad dimension '" + item + "' in '" + text + "'");
    }
  }
  if (expected != 0 && dims.size() != expected) {
    throw Error(ErrorKind::usage, "expected " + std::to_string(expected) + " dims, got '" + text + "'");
  }
  if (dims.empty()) throw Error(ErrorKind::usage, "no dims given");
  return dims;
}

// --dims M,N,K from the command line; an invalid shape is a usage error.
kernel::QuantMatMulDims matmul_dims_flag(const std::string& text) {
  const auto d = parse_dims(text, 3);
  const kernel::QuantMatMulDims dims{d[0], d[1], d[2]};
  try {
    dims.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::usage, e.what());
  }
  return dims;
}

std::vector<float> gaussian(std::size_t count, std::uint64_t seed, float stddev) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> dist(0.0f, stddev);
  std::vector<float> v(count);
  for (auto& x : v) x = dist(rng);
  return v;
}

sim::AcceleratorConfig config_from(const std::string& path) {
  return path.empty() ? sim::AcceleratorConfig{} : sim::load_accel_config(path);
}

bool bit_identical(const kernel::OutputMatrix& a, const kernel::OutputMatrix& b) {
  return a.rows == b.rows && a.cols == b.cols &&
         std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(float)) == 0;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  out << text;
}

// --- generate -------------------------------------------------------------

struct GenerateArgs {
  std::string dims;
  std::uint64_t seed = 1;
  float stddev = 1.0f;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  const auto dims = parse_dims(a.dims, 0);
  std::uint64_t count = 1;
  for (auto d : dims) count *= d;
  const auto values = gaussian(count, a.seed, a.stddev);
  workload::write_tensor(a.out, workload::Tensor::from_floats(dims, values));
  std::cout << "wrote " << a.out << " (" << count << " float32 values)\n";
  return kExitOk;
}

// --- quantize -------------------------------------------------------------

struct QuantizeArgs {
  std::string in;
  std::string format;
  std::string out;
};

int cmd_quantize(const QuantizeArgs& a) {
  const auto t = workload::read_tensor(a.in);
  if (t.dtype != workload::DType::float32) {
    throw Error(ErrorKind::format, "quantize expects a float32 tensor");
  }
  const auto values = t.to_floats();
  const auto rows = static_cast<std::size_t>(t.rows());
  const auto cols = static_cast<std::size_t>(t.cols());
  workload::Tensor q;
  double bits = 0.0;
  if (a.format == "q3k") {
    q = workload::Tensor::from_q3k(t.dims, codec::quantize_tensor_q3k(values, rows, cols));
    bits = codec::kQ3KBitsPerWeight;
  } else {
    q = workload::Tensor::from_q8k(t.dims, codec::quantize_tensor_q8k(values, rows, cols));
    bits = codec::kQ8KBitsPerInput;
  }
  workload::write_tensor(a.out, q);
  std::cout << "format=" << a.format << '\n'
            << "blocks=" << (rows * cols / codec::kSuperBlockSize) << '\n'
            << "payload_bytes=" << q.payload.size() << '\n'
            << "bits_per_element=" << bits << '\n';
  return kExitOk;
}

// --- matmul ---------------------------------------------------------------

struct MatmulArgs {
  std::string weights;
  std::string inputs;
  std::string backend = "ref";
  std::string config;
  std::string out;
  std::string profile;
  std::string profile_format = "text";
};

int cmd_matmul(const MatmulArgs& a) {
  const auto w = workload::read_tensor(a.weights);
  const auto x = workload::read_tensor(a.inputs);
  if (w.dtype != workload::DType::q3k) throw Error(ErrorKind::format, "weights must be packed Q3_K");
  if (x.dtype != workload::DType::q8k) throw Error(ErrorKind::format, "inputs must be packed Q8_K");
  if (w.cols() != x.cols()) {
    throw Error(ErrorKind::usage, "weights K = " + std::to_string(w.cols()) +
                                      " does not match inputs K = " + std::to_string(x.cols()));
  }
  const kernel::QuantMatMulDims dims{x.rows(), w.rows(), w.cols()};

  driver::Backend backend = driver::ReferenceBackend{};
  if (a.backend == "sim") backend = driver::SimulatorBackend{config_from(a.config)};

  prof::ProfileSession session(!a.profile.empty());
  const auto result = driver::run_matmul(w.to_q3k(), x.to_q8k(), dims, backend, &session);
  session.close();

  workload::write_tensor(a.out, workload::Tensor::from_floats({dims.m, dims.n}, result.output.values));
  if (!a.profile.empty()) {
    write_text(a.profile, session.emit_report(a.profile_format == "json" ? prof::ReportFormat::json
                                                                         : prof::ReportFormat::text));
  }
  std::cout << "backend=" << a.backend << " M=" << dims.m << " N=" << dims.n << " K=" << dims.k << '\n';
  if (result.sim_report) std::cout << "total_cycles=" << result.sim_report->total_cycles << '\n';
  return kExitOk;
}

// --- compare --------------------------------------------------------------

struct CompareArgs {
  std::string dims;
  std::string config;
  std::uint64_t seed = 1;
  bool inject_fault = false;
};

int cmd_compare(const CompareArgs& a) {
  const auto dims = matmul_dims_flag(a.dims);
  auto cfg = config_from(a.config);
  cfg.fault_flip_output_lsb = a.inject_fault;

  const auto x_fp = gaussian(dims.m * dims.k, a.seed, 1.0f);
  const auto w_fp = gaussian(dims.n * dims.k, a.seed + 1, 0.05f);
  const auto w = codec::quantize_tensor_q3k(w_fp, dims.n, dims.k);
  const auto x = codec::quantize_tensor_q8k(x_fp, dims.m, dims.k);

  const auto ref = driver::run_matmul(w, x, dims, driver::ReferenceBackend{});
  const auto sim = driver::run_matmul(w, x, dims, driver::SimulatorBackend{cfg});
  const auto oracle = kernel::matmul_fp32(x_fp, w_fp, dims.m, dims.n, dims.k);

  double max_err = 0.0;
  double max_ref = 0.0;
  for (std::size_t i = 0; i < oracle.values.size(); ++i) {
    max_err = std::max(max_err, std::fabs(double(ref.output.values[i]) - oracle.values[i]));
    max_ref = std::max(max_ref, std::fabs(double(oracle.values[i])));
  }
  const bool same = bit_identical(ref.output, sim.output);
  std::cout << "dims=" << dims.m << ',' << dims.n << ',' << dims.k << '\n'
            << "bit_exact=" << (same ? "yes" : "NO") << '\n'
            << "max_abs_error_vs_fp32=" << std::setprecision(9) << max_err << '\n'
            << "max_abs_fp32=" << max_ref << '\n'
            << "sim_total_cycles=" << sim.sim_report->total_cycles << '\n';
  if (!same) {
    std::cerr << "error: simulator output differs from the reference kernel\n";
    return kExitMismatch;
  }
  return kExitOk;
}

// --- bench ----------------------------------------------------------------

struct BenchArgs {
  std::string dims;
  std::string config;
  std::string sweep;
  std::uint64_t seed = 1;
};

std::string canonical_key(const std::string& key) {
  if (key == "lanes") return "sbvp_lanes";
  if (key == "width") return "stream_width_bits";
  return key;
}

int cmd_bench(const BenchArgs& a) {
  const auto dims = matmul_dims_flag(a.dims);
  const auto base = config_from(a.config);

  std::vector<std::pair<std::string, sim::AcceleratorConfig>> points;
  if (a.sweep.empty()) {
    points.emplace_back("default", base);
  } else {
    const auto eq = a.sweep.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::usage, "--sweep expects key=v1,v2,...");
    const std::string key = canonical_key(a.sweep.substr(0, eq));
    std::stringstream ss(a.sweep.substr(eq + 1));
    std::string value;
    while (std::getline(ss, value, ',')) {
      auto cfg = base;
      try {
        cfg.set(key, value);
        cfg.validate();
      } catch (const Error& e) {
        throw Error(ErrorKind::usage, e.what());
      }
      points.emplace_back(key + "=" + value, cfg);
    }
  }

  const auto w = codec::quantize_tensor_q3k(gaussian(dims.n * dims.k, a.seed + 1, 0.05f), dims.n, dims.k);
  const auto x = codec::quantize_tensor_q8k(gaussian(dims.m * dims.k, a.seed, 1.0f), dims.m, dims.k);

  // Each point is an independent simulator instance.
  std::vector<std::future<perf::BenchRow>> jobs;
  for (const auto& [label, cfg] : points) {
    jobs.push_back(std::async(std::launch::async, [&, label = label, cfg = cfg] {
      perf::BenchRow p;
      p.label = label;
      const auto run = driver::run_matmul(w, x, dims, driver::SimulatorBackend{cfg});
      p.sim_cycles = run.sim_report->total_cycles;
      p.modeled_us = run.sim_report->modeled_time_us();
      p.estimate = perf::estimate_speedup(dims, cfg);
      return p;
    }));
  }

  std::vector<perf::BenchRow> rows;
  for (auto& job : jobs) rows.push_back(job.get());
  std::cout << perf::format_bench_report(dims, rows);
  return kExitOk;
}

// --- opcount --------------------------------------------------------------

struct OpcountArgs {
  std::string shape;
  std::uint64_t context = 64;
};

int cmd_opcount(const OpcountArgs& a) {
  const auto shape = a.shape.empty() ? workload::tinyllama_shape() : workload::load_model_shape(a.shape);
  const auto b = workload::opcount(shape, a.context);
  std::cout << "context=" << a.context << '\n'
            << "weight_matmul_macs=" << b.weight_matmul_macs << '\n'
            << "  qkv_projection_macs=" << b.qkv_projection_macs << '\n'
            << "  attention_output_macs=" << b.attention_output_macs << '\n'
            << "  ffn_macs=" << b.ffn_macs << '\n'
            << "  lm_head_macs=" << b.lm_head_macs << '\n'
            << "other_ops=" << b.other_ops << '\n'
            << "  attention_score_macs=" << b.attention_score_macs << '\n'
            << "  attention_value_macs=" << b.attention_value_macs << '\n'
            << "  softmax_ops=" << b.softmax_ops << '\n'
            << "  norm_ops=" << b.norm_ops << '\n'
            << "  residual_ops=" << b.residual_ops << '\n'
            << "total_ops=" << b.total_ops << '\n'
            << "matmul_fraction=" << std::setprecision(6) << b.matmul_fraction << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Super-block quantized MatMul toolkit: codecs, reference kernel, accelerator "
               "simulator and profiler"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a seeded Gaussian float32 tensor");
  generate->add_option("--dims", gen.dims, "Comma-separated dims, e.g. 4,512")->required();
  generate->add_option("--seed", gen.seed, "RNG seed");
  generate->add_option("--stddev", gen.stddev, "Standard deviation");
  generate->add_option("--out", gen.out, "Output .bfpt")->required();

  QuantizeArgs quant;
  auto* quantize = app.add_subcommand("quantize", "Quantize a float32 tensor to Q3_K or Q8_K");
  quantize->add_option("--in", quant.in, "Input float32 .bfpt")->required();
  quantize->add_option("--format", quant.format, "q3k or q8k")
      ->required()
      ->check(CLI::IsMember({"q3k", "q8k"}));
  quantize->add_option("--out", quant.out, "Output .bfpt")->required();

  MatmulArgs mm;
  auto* matmul = app.add_subcommand("matmul", "Multiply Q8_K inputs by Q3_K weights");
  matmul->add_option("--weights", mm.weights, "Q3_K weights, N x K")->required();
  matmul->add_option("--inputs", mm.inputs, "Q8_K inputs, M x K")->required();
  matmul->add_option("--backend", mm.backend, "ref or sim")->check(CLI::IsMember({"ref", "sim"}));
  matmul->add_option("--config", mm.config, "accel.cfg for the simulator backend");
  matmul->add_option("--out", mm.out, "Output float32 .bfpt, M x N")->required();
  matmul->add_option("--profile", mm.profile, "Write a profile report here");
  matmul->add_option("--profile-format", mm.profile_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Check simulator == reference on seeded data");
  compare->add_option("--dims", cmp.dims, "M,N,K")->required();
  compare->add_option("--config", cmp.config, "accel.cfg");
  compare->add_option("--seed", cmp.seed, "RNG seed");
  compare->add_flag("--inject-fault", cmp.inject_fault, "Corrupt the simulator output (test hook)")
      ->group("");

  BenchArgs bn;
  auto* bench = app.add_subcommand("bench", "Modeled cycles and speedup over a config sweep");
  bench->add_option("--dims", bn.dims, "M,N,K")->required();
  bench->add_option("--config", bn.config, "accel.cfg");
  bench->add_option("--sweep", bn.sweep, "key=v1,v2,... (lanes, width or any accel.cfg key)");
  bench->add_option("--seed", bn.seed, "RNG seed");

  OpcountArgs oc;
  auto* opcount = app.add_subcommand("opcount", "Per-token op count and weight MatMul share");
  opcount->add_option("--shape", oc.shape, "Model shape file (default: TinyLlama v1.1)");
  opcount->add_option("--context", oc.context, "KV-cache length")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*quantize) return cmd_quantize(quant);
    if (*matmul) return cmd_matmul(mm);
    if (*compare) return cmd_compare(cmp);
    if (*bench) return cmd_bench(bn);
    if (*opcount) return cmd_opcount(oc);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::usage ? kExitUsage : kExitFormat;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFormat;
  }
  return kExitUsage;
}
