// SPDX-FileCopyrightText: © 2026 The sbaccel authors
//
// SPDX-License-Identifier: Apache-2.0
#include "sbaccel/profiler.hpp"

#include <charconv>
#include <chrono>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sbaccel/error.hpp"

namespace sbaccel::prof {

std::string_view to_string(PointKind kind) {
  switch (kind) {
    case PointKind::cycle_counter: return "cycle_counter";
    case PointKind::occupancy_gauge: return "occupancy_gauge";
    case PointKind::utilization_ratio: return "utilization_ratio";
  }
  return "?";
}

PointKind point_kind_from_string(std::string_view s) {
  if (s == "cycle_counter") return PointKind::cycle_counter;
  if (s == "occupancy_gauge") return PointKind::occupancy_gauge;
  if (s == "utilization_ratio") return PointKind::utilization_ratio;
  throw Error(ErrorKind::format, "unknown capture point kind '" + std::string(s) + "'");
}

std::string_view to_string(DriverPhase phase) {
  switch (phase) {
    case DriverPhase::send_input: return "send_input";
    case DriverPhase::wait_compute: return "wait_compute";
    case DriverPhase::unpack_output: return "unpack_output";
  }
  return "?";
}

std::uint64_t DriverProfile::total_ns() const {
  std::uint64_t total = 0;
  for (const auto& p : phases) total += p.duration_ns;
  return total;
}

namespace {

std::int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

PhaseTimer::Scope::Scope(PhaseTimer* owner, DriverPhase phase)
    : owner_(owner), phase_(phase), start_ns_(owner ? now_ns() : 0) {}

PhaseTimer::Scope::Scope(Scope&& other) noexcept
    : owner_(other.owner_), phase_(other.phase_), start_ns_(other.start_ns_) {
  other.owner_ = nullptr;
}

PhaseTimer::Scope::~Scope() {
  if (owner_ == nullptr) return;
  const std::int64_t elapsed = now_ns() - start_ns_;
  owner_->profile_[phase_].duration_ns += static_cast<std::uint64_t>(elapsed > 0 ? elapsed : 0);
  owner_->active_[static_cast<std::size_t>(phase_)] = false;
}

PhaseTimer::Scope PhaseTimer::scope(DriverPhase phase) {
  auto& active = active_[static_cast<std::size_t>(phase)];
  if (active) {
    throw Error(ErrorKind::usage, "phase '" + std::string(to_string(phase)) + "' is already open");
  }
  active = true;
  return Scope(this, phase);
}

void PhaseTimer::add_counts(DriverPhase phase, std::uint64_t blocks, std::uint64_t bytes) {
  profile_[phase].blocks += blocks;
  profile_[phase].bytes += bytes;
}

CombinedEstimate combine(const DriverProfile& driver, const sim::SimReport& sim) {
  CombinedEstimate e;
  const std::uint64_t outside_ns =
      driver[DriverPhase::send_input].duration_ns + driver[DriverPhase::unpack_output].duration_ns;
  e.driver_us = static_cast<double>(outside_ns) / 1000.0;
  e.accel_modeled_us = sim.modeled_time_us();
  e.combined_us = e.driver_us + e.accel_modeled_us;
  return e;
}

// --- session -------------------------------------------------------------

void ProfileSession::require_open() const {
  if (!open_) throw Error(ErrorKind::usage, "profiling session is closed");
}

void ProfileSession::register_point(std::string_view id, PointKind kind) {
  if (!enabled_) return;
  require_open();
  if (const auto it = index_.find(std::string(id)); it != index_.end()) {
    if (points_[it->second].kind != kind) {
      throw Error(ErrorKind::registration,
                  "capture point '" + std::string(id) + "' already registered with another kind");
    }
    return;
  }
  index_.emplace(std::string(id), points_.size());
  points_.push_back(CapturePoint{std::string(id), kind, {}});
}

bool ProfileSession::has_point(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

const CapturePoint& ProfileSession::point(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    throw Error(ErrorKind::registration, "unknown capture point '" + std::string(id) + "'");
  }
  return points_[it->second];
}

void ProfileSession::record(std::string_view id, std::uint64_t sim_cycle, double value) {
  if (!enabled_) return;
  require_open();
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    throw Error(ErrorKind::registration, "unknown capture point '" + std::string(id) + "'");
  }
  CapturePoint& p = points_[it->second];
  if (!p.samples.empty() && sim_cycle < p.samples.back().cycle) {
    throw Error(ErrorKind::usage, "capture point '" + p.id + "': cycle " +
                                      std::to_string(sim_cycle) + " precedes " +
                                      std::to_string(p.samples.back().cycle));
  }
  if (p.kind == PointKind::utilization_ratio && !(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorKind::domain, "utilization sample outside [0, 1] for '" + p.id + "'");
  }
  p.samples.push_back(Sample{sim_cycle, value});
}

PhaseTimer::Scope ProfileSession::phase_scope(DriverPhase phase) {
  if (!enabled_) return PhaseTimer::Scope(nullptr, phase);
  require_open();
  return timer_.scope(phase);
}

void ProfileSession::add_phase_counts(DriverPhase phase, std::uint64_t blocks, std::uint64_t bytes) {
  if (!enabled_) return;
  require_open();
  timer_.add_counts(phase, blocks, bytes);
}

void ProfileSession::merge_driver_profile(const DriverProfile& profile) {
  if (!enabled_) return;
  require_open();
  for (std::size_t i = 0; i < kDriverPhaseCount; ++i) {
    merged_.phases[i].duration_ns += profile.phases[i].duration_ns;
    merged_.phases[i].blocks += profile.phases[i].blocks;
    merged_.phases[i].bytes += profile.phases[i].bytes;
  }
}

void ProfileSession::set_sim_report(const sim::SimReport& report) {
  if (!enabled_) return;
  require_open();
  sim_ = report;
}

void ProfileSession::close() { open_ = false; }

ProfileReport ProfileSession::report() const {
  if (open_) throw Error(ErrorKind::usage, "profiling session must be closed before reporting");
  ProfileReport r;
  r.sim = sim_;
  r.points = points_;
  r.driver = merged_;
  const DriverProfile& timed = timer_.profile();
  for (std::size_t i = 0; i < kDriverPhaseCount; ++i) {
    r.driver.phases[i].duration_ns += timed.phases[i].duration_ns;
    r.driver.phases[i].blocks += timed.phases[i].blocks;
    r.driver.phases[i].bytes += timed.phases[i].bytes;
  }
  r.estimate = combine(r.driver, r.sim);
  return r;
}

std::string ProfileSession::emit_report(ReportFormat format) const {
  const ProfileReport r = report();
  return format == ReportFormat::json ? r.to_json() : r.to_text();
}

// --- serialization ---------------------------------------------------------

namespace {

// Shortest round-trip representation, locale independent.
std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, std::string_view key) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::format, "bad number for '" + std::string(key) + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view s, std::string_view key) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::format, "bad integer for '" + std::string(key) + "'");
  }
  return v;
}

struct U64Field {
  const char* key;
  std::uint64_t sim::SimReport::*member;
};

constexpr U64Field kSimFields[] = {
    {"unit.decoder.cycles", &sim::SimReport::decoder_cycles},
    {"unit.mapper.cycles", &sim::SimReport::mapper_cycles},
    {"unit.sbvp.cycles", &sim::SimReport::sbvp_cycles},
    {"unit.scheduler.cycles", &sim::SimReport::scheduler_cycles},
    {"sbvp.busy_cycles", &sim::SimReport::sbvp_busy_cycles},
    {"sbvp.idle_cycles", &sim::SimReport::sbvp_idle_cycles},
    {"mapper.stall_cycles", &sim::SimReport::mapper_stall_cycles},
    {"buffer.weight.high_water", &sim::SimReport::weight_slots_high_water},
    {"buffer.input.high_water", &sim::SimReport::input_slots_high_water},
    {"buffer.output.high_water", &sim::SimReport::output_slots_high_water},
    {"sim.instructions", &sim::SimReport::instructions},
    {"sim.superblock_dots", &sim::SimReport::superblock_dots},
    {"sim.words_in", &sim::SimReport::words_in},
    {"sim.words_out", &sim::SimReport::words_out},
};

constexpr DriverPhase kPhases[] = {DriverPhase::send_input, DriverPhase::wait_compute,
                                   DriverPhase::unpack_output};

}  // namespace

std::string ProfileReport::to_text() const {
  std::ostringstream out;
  out << "format=sbaccel-profile\n";
  out << "version=1\n";
  out << "total_cycles=" << sim.total_cycles << '\n';
  out << "modeled_time_us=" << format_double(sim.modeled_time_us()) << '\n';
  out << "clock_mhz=" << format_double(sim.clock_mhz) << '\n';
  for (const auto& f : kSimFields) out << f.key << '=' << sim.*f.member << '\n';
  for (DriverPhase p : kPhases) {
    const PhaseStats& s = driver[p];
    const std::string prefix = "phase." + std::string(to_string(p));
    out << prefix << ".ns=" << s.duration_ns << '\n';
    out << prefix << ".blocks=" << s.blocks << '\n';
    out << prefix << ".bytes=" << s.bytes << '\n';
  }
  out << "estimate.driver_us=" << format_double(estimate.driver_us) << '\n';
  out << "estimate.accel_modeled_us=" << format_double(estimate.accel_modeled_us) << '\n';
  out << "estimate.combined_us=" << format_double(estimate.combined_us) << '\n';
  for (const auto& p : points) {
    out << "point." << p.id << ".kind=" << to_string(p.kind) << '\n';
    out << "point." << p.id << ".series=";
    for (std::size_t i = 0; i < p.samples.size(); ++i) {
      if (i) out << ',';
      out << p.samples[i].cycle << ':' << format_double(p.samples[i].value);
    }
    out << '\n';
  }
  return out.str();
}

std::string ProfileReport::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "sbaccel-profile";
  j["version"] = 1;
  j["total_cycles"] = sim.total_cycles;
  j["modeled_time_us"] = sim.modeled_time_us();
  j["clock_mhz"] = sim.clock_mhz;
  for (const auto& f : kSimFields) j[f.key] = sim.*f.member;
  for (DriverPhase p : kPhases) {
    const PhaseStats& s = driver[p];
    j["phase"][std::string(to_string(p))] = {
        {"ns", s.duration_ns}, {"blocks", s.blocks}, {"bytes", s.bytes}};
  }
  j["estimate"] = {{"driver_us", estimate.driver_us},
                   {"accel_modeled_us", estimate.accel_modeled_us},
                   {"combined_us", estimate.combined_us}};
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : points) {
    nlohmann::ordered_json series = nlohmann::ordered_json::array();
    for (const auto& s : p.samples) series.push_back({s.cycle, s.value});
    j["points"].push_back({{"id", p.id}, {"kind", to_string(p.kind)}, {"series", series}});
  }
  return j.dump(2) + "\n";
}

ProfileReport ProfileReport::parse_text(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::vector<std::string> point_order;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::format, "report line " + std::to_string(line_no) + " has no '='");
    }
    std::string key(line.substr(0, eq));
    if (key.rfind("point.", 0) == 0 && key.size() > 11 && key.ends_with(".kind")) {
      point_order.push_back(key.substr(6, key.size() - 11));
    }
    if (!kv.emplace(key, std::string(line.substr(eq + 1))).second) {
      throw Error(ErrorKind::format, "duplicate report key '" + key + "'");
    }
  }

  auto take = [&kv](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorKind::format, "report is missing '" + key + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (take("format") != "sbaccel-profile") throw Error(ErrorKind::format, "not a profile report");
  if (take("version") != "1") throw Error(ErrorKind::format, "unsupported report version");

  ProfileReport r;
  r.sim.total_cycles = parse_u64(take("total_cycles"), "total_cycles");
  take("modeled_time_us");  // derived
  r.sim.clock_mhz = parse_double(take("clock_mhz"), "clock_mhz");
  for (const auto& f : kSimFields) r.sim.*f.member = parse_u64(take(f.key), f.key);
  for (DriverPhase p : kPhases) {
    const std::string prefix = "phase." + std::string(to_string(p));
    PhaseStats& s = r.driver[p];
    s.duration_ns = parse_u64(take(prefix + ".ns"), prefix);
    s.blocks = parse_u64(take(prefix + ".blocks"), prefix);
    s.bytes = parse_u64(take(prefix + ".bytes"), prefix);
  }
  r.estimate.driver_us = parse_double(take("estimate.driver_us"), "estimate.driver_us");
  r.estimate.accel_modeled_us =
      parse_double(take("estimate.accel_modeled_us"), "estimate.accel_modeled_us");
  r.estimate.combined_us = parse_double(take("estimate.combined_us"), "estimate.combined_us");

  for (const auto& id : point_order) {
    CapturePoint p;
    p.id = id;
    p.kind = point_kind_from_string(take("point." + id + ".kind"));
    const std::string series = take("point." + id + ".series");
    std::string_view rest = series;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      const auto colon = item.find(':');
      if (colon == std::string_view::npos) throw Error(ErrorKind::format, "bad sample in " + id);
      p.samples.push_back(Sample{parse_u64(item.substr(0, colon), id),
                                 parse_double(item.substr(colon + 1), id)});
    }
    r.points.push_back(std::move(p));
  }
  if (!kv.empty()) throw Error(ErrorKind::format, "unknown report key '" + kv.begin()->first + "'");
  return r;
}

}  // namespace sbaccel::prof
