// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sbaccel {

enum class ErrorKind {
  range,
  format,
  shape,
  buffer,
  protocol,
  decode,
  underrun,
  scheduler,
  capacity,
  domain,
  usage,
  registration,
  io,
};

std::string_view to_string(ErrorKind kind);

// Base error for every module. `offset` is a byte or word offset into the
// input being parsed, when one is meaningful.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> offset = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> offset_;
};

// Raised by the simulator; names the failing instruction and unit.
class SimulationError : public Error {
 public:
  SimulationError(ErrorKind kind, std::size_t instruction_index, std::string unit,
                  const std::string& detail, std::optional<std::size_t> offset = std::nullopt);

  std::size_t instruction_index() const noexcept { return instruction_index_; }
  const std::string& unit() const noexcept { return unit_; }

 private:
  std::size_t instruction_index_;
  std::string unit_;
};

}  // namespace sbaccel
