// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Two profiling modes, merged into one report:
//  - simulation profiling: capture points sampled by the simulator against
//    its cycle counter;
//  - execution profiling: wall-clock time of the driver phases (sending
//    input, waiting on the accelerator, unpacking output).
//
// Text report format (one `key=value` per line, fixed order):
//
//   format=sbaccel-profile
//   version=1
//   total_cycles=<u64>
//   modeled_time_us=<double>
//   clock_mhz=<double>
//   unit.<decoder|mapper|sbvp|scheduler>.cycles=<u64>
//   sbvp.busy_cycles / sbvp.idle_cycles / mapper.stall_cycles=<u64>
//   buffer.<weight|input|output>.high_water=<u64>
//   sim.instructions / sim.superblock_dots / sim.words_in / sim.words_out=<u64>
//   phase.<send_input|wait_compute|unpack_output>.<ns|blocks|bytes>=<u64>
//   estimate.driver_us / estimate.accel_modeled_us / estimate.combined_us=<double>
//   point.<id>.kind=<cycle_counter|occupancy_gauge|utilization_ratio>
//   point.<id>.series=<cycle>:<value>,<cycle>:<value>,...
//
// The combined estimate is driver time outside the accelerator wait
// (send_input + unpack_output) plus the accelerator's modeled time.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sbaccel/sim_report.hpp"

namespace sbaccel::prof {

enum class PointKind { cycle_counter, occupancy_gauge, utilization_ratio };

std::string_view to_string(PointKind kind);
PointKind point_kind_from_string(std::string_view s);

struct Sample {
  std::uint64_t cycle = 0;
  double value = 0.0;
  friend bool operator==(const Sample&, const Sample&) = default;
};

struct CapturePoint {
  std::string id;
  PointKind kind = PointKind::cycle_counter;
  std::vector<Sample> samples;
  friend bool operator==(const CapturePoint&, const CapturePoint&) = default;
};

enum class DriverPhase : std::size_t { send_input = 0, wait_compute = 1, unpack_output = 2 };
inline constexpr std::size_t kDriverPhaseCount = 3;
std::string_view to_string(DriverPhase phase);

struct PhaseStats {
  std::uint64_t duration_ns = 0;
  std::uint64_t blocks = 0;
  std::uint64_t bytes = 0;
  friend bool operator==(const PhaseStats&, const PhaseStats&) = default;
};

struct DriverProfile {
  std::array<PhaseStats, kDriverPhaseCount> phases{};

  PhaseStats& operator[](DriverPhase p) { return phases[static_cast<std::size_t>(p)]; }
  const PhaseStats& operator[](DriverPhase p) const { return phases[static_cast<std::size_t>(p)]; }
  std::uint64_t total_ns() const;

  friend bool operator==(const DriverProfile&, const DriverProfile&) = default;
};

// Accumulates wall-clock time per driver phase. A phase may not be entered
// while a scope for the same phase is still open.
class PhaseTimer {
 public:
  class Scope {
   public:
    Scope(Scope&& other) noexcept;
    Scope& operator=(Scope&&) = delete;
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;
    ~Scope();

   private:
    friend class PhaseTimer;
    friend class ProfileSession;
    Scope(PhaseTimer* owner, DriverPhase phase);
    PhaseTimer* owner_;
    DriverPhase phase_;
    std::int64_t start_ns_;
  };

  Scope scope(DriverPhase phase);
  void add_counts(DriverPhase phase, std::uint64_t blocks, std::uint64_t bytes);

  const DriverProfile& profile() const { return profile_; }

 private:
  DriverProfile profile_;
  std::array<bool, kDriverPhaseCount> active_{};
};

struct CombinedEstimate {
  double driver_us = 0.0;
  double accel_modeled_us = 0.0;
  double combined_us = 0.0;
  friend bool operator==(const CombinedEstimate&, const CombinedEstimate&) = default;
};

CombinedEstimate combine(const DriverProfile& driver, const sim::SimReport& sim);

struct ProfileReport {
  sim::SimReport sim;
  std::vector<CapturePoint> points;
  DriverProfile driver;
  CombinedEstimate estimate;

  std::string to_text() const;
  std::string to_json() const;
  static ProfileReport parse_text(std::string_view text);

  friend bool operator==(const ProfileReport&, const ProfileReport&) = default;
};

enum class ReportFormat { text, json };

// One session per driver/simulator session. A disabled session accepts
// every call and records nothing.
class ProfileSession {
 public:
  explicit ProfileSession(bool enabled = true) : enabled_(enabled) {}

  bool enabled() const { return enabled_; }
  bool is_open() const { return open_; }

  // Registering an existing id with the same kind is a no-op; a different
  // kind is a registration error.
  void register_point(std::string_view id, PointKind kind);
  bool has_point(std::string_view id) const;
  const CapturePoint& point(std::string_view id) const;

  // Appends a sample. Unknown ids, decreasing cycles, and utilization values
  // outside [0, 1] are errors.
  void record(std::string_view id, std::uint64_t sim_cycle, double value);

  PhaseTimer::Scope phase_scope(DriverPhase phase);
  void add_phase_counts(DriverPhase phase, std::uint64_t blocks, std::uint64_t bytes);
  void merge_driver_profile(const DriverProfile& profile);
  void set_sim_report(const sim::SimReport& report);

  void close();
  ProfileReport report() const;
  std::string emit_report(ReportFormat format = ReportFormat::text) const;

 private:
  void require_open() const;

  bool enabled_;
  bool open_ = true;
  std::vector<CapturePoint> points_;
  std::unordered_map<std::string, std::size_t> index_;
  PhaseTimer timer_;
  DriverProfile merged_;
  sim::SimReport sim_;
};

}  // namespace sbaccel::prof
