// Copyright 2026 The Software Assembly Line Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sal/delivery.hpp"
#include "sal/line_model.hpp"
#include "sal/system_graph.hpp"

namespace sal {

enum class EventKind { Build, Certify, Deliver, Transition, Release, Register };

std::string_view to_string(EventKind k);

/// One milestone. Payload fields by kind:
///   Register   {what: "line"} | {what: "package", package, station}
///              | {what: "artifact", artifact, location}
///   Build      {package, station, goals, outcome, executed[, primaries]}
///   Transition {package, station, event, from, to}
///   Certify    {certification}
///   Deliver    {phase: "request", ticket} | {phase: "execute", record}
///              | {phase: "transfer", delivery, certification}
///   Release    {package, station, artifacts}
struct Event {
  std::uint64_t sequence = 0;
  std::string timestamp;
  std::string actor;
  EventKind kind = EventKind::Register;
  nlohmann::json payload = nlohmann::json::object();
};

/// Everything the line knows; a pure function of the topology and the
/// journal.
struct LineState {
  LineTopology topology;
  std::map<std::string, PackageRecord> packages;
  std::vector<DeliveryRecord> deliveries;
  std::vector<CertificationRecord> certifications;
  Registry registry;
  std::uint64_t last_sequence = 0;

  /// Throws UnknownPackage.
  const PackageRecord& package(const std::string& id) const;

  friend bool operator==(const LineState&, const LineState&) = default;
};

LineState initial_state(LineTopology topology);

/// Folds one event into `state`. Throws InvalidEventSequence when the event
/// does not apply (wrong sequence number, unknown package, illegal
/// transition, ...); `state` is unchanged in that case.
void apply_event(LineState& state, const Event& event);

nlohmann::json state_to_json(const LineState& state);
nlohmann::json to_json(const CertificationRecord& record);
nlohmann::json to_json(const DeliveryTicket& ticket);
nlohmann::json to_json(const DeliveryRecord& record);
/// Canonical text form used for the cache and for equality checks.
std::string serialize_state(const LineState& state);

std::string serialize_event(const Event& event);
/// Throws CorruptJournal with `line_no`.
Event parse_event(std::string_view line, std::size_t line_no);

enum class TornTail { Reject, Ignore };

/// Reads every event. A last line without its newline is an interrupted
/// append: CorruptJournal under Reject, skipped under Ignore. Sequence
/// numbers must run 1, 2, 3, ... without gaps.
std::vector<Event> read_journal(const std::filesystem::path& path,
                                TornTail torn = TornTail::Reject);

LineState replay(const LineTopology& topology, const std::vector<Event>& events);
/// Throws CorruptJournal (with the line number) or InvalidEventSequence.
LineState replay(std::string_view topology_config, const std::filesystem::path& journal);

enum class FaultPoint { BeforeAppend, MidAppend, AfterAppend, AfterApply, AfterCache };

std::string_view to_string(FaultPoint p);

/// Test seam invoked at each point of a commit. It may throw, or end the
/// process to simulate a crash.
using FaultHook = std::function<void(FaultPoint, const Event&)>;

/// `<line root>/.sal/journal.ndjson`: one JSON object per line.
class Journal {
 public:
  explicit Journal(std::filesystem::path path) : path_(std::move(path)) {}

  const std::filesystem::path& path() const { return path_; }

  /// Assigns the next sequence number under an exclusive file lock, writes
  /// the line and syncs it. Throws StorageFailure.
  std::uint64_t append(Event& event, const FaultHook& hook = {});

  /// Cuts an interrupted trailing line. Returns true if it removed bytes.
  bool recover();

 private:
  std::filesystem::path path_;
};

/// Advisory exclusive lock on `<line root>/.sal/lock`, held for the
/// lifetime of the object.
class LineLock {
 public:
  explicit LineLock(const std::filesystem::path& line_root);
  ~LineLock();
  LineLock(const LineLock&) = delete;
  LineLock& operator=(const LineLock&) = delete;

 private:
  int fd_ = -1;
};

std::filesystem::path sal_dir(const std::filesystem::path& line_root);
std::filesystem::path config_path(const std::filesystem::path& line_root);
std::filesystem::path journal_path(const std::filesystem::path& line_root);
std::filesystem::path cache_path(const std::filesystem::path& line_root);

/// Journal plus the materialised state it implies.
class Store {
 public:
  enum class Mode { ReadOnly, Mutating };

  /// ReadOnly skips an interrupted trailing append; Mutating cuts it off
  /// first, so the caller must hold the LineLock. Throws LineNotFound.
  static Store open(const std::filesystem::path& line_root, Mode mode, FaultHook hook = {});

  /// Creates `.sal/` with an empty journal. Throws StorageFailure if the
  /// line already exists.
  static Store create(const std::filesystem::path& line_root, FaultHook hook = {});

  const std::filesystem::path& root() const { return root_; }
  const LineState& state() const { return state_; }

  /// Validates the event against the current state, appends it durably,
  /// then applies it and refreshes the cache. Returns its sequence number.
  std::uint64_t commit(Event event);

  void write_cache() const;
  std::optional<std::string> read_cache() const;

 private:
  Store(std::filesystem::path root, LineState state, FaultHook hook);

  std::filesystem::path root_;
  LineState state_;
  Journal journal_;
  FaultHook hook_;
};

}  // namespace sal
