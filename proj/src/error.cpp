// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include "sbaccel/error.hpp"

namespace sbaccel {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::range: return "range";
    case ErrorKind::format: return "format";
    case ErrorKind::shape: return "shape";
    case ErrorKind::buffer: return "buffer";
    case ErrorKind::protocol: return "protocol";
    case ErrorKind::decode: return "decode";
    case ErrorKind::underrun: return "underrun";
    case ErrorKind::scheduler: return "scheduler";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::domain: return "domain";
    case ErrorKind::usage: return "usage";
    case ErrorKind::registration: return "registration";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

namespace {

std::string decorate(ErrorKind kind, const std::string& what, std::optional<std::size_t> offset) {
  std::string msg = std::string(to_string(kind)) + " error: " + what;
  if (offset) msg += " (at offset " + std::to_string(*offset) + ")";
  return msg;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> offset)
    : std::runtime_error(decorate(kind, what, offset)), kind_(kind), offset_(offset) {}

SimulationError::SimulationError(ErrorKind kind, std::size_t instruction_index, std::string unit,
                                 const std::string& detail, std::optional<std::size_t> offset)
    : Error(kind,
            "instruction #" + std::to_string(instruction_index) + " [" + unit + "]: " + detail,
            offset),
      instruction_index_(instruction_index),
      unit_(std::move(unit)) {}

}  // namespace sbaccel
