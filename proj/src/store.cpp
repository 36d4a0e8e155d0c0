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

#include "sal/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "sal/digest.hpp"
#include "sal/error.hpp"

namespace sal {

namespace fs = std::filesystem;
using nlohmann::json;

// JSON forms of the domain records.

namespace {

json to_json(const Fingerprints& fps) {
  json j = json::object();
  for (const auto& [name, digest] : fps) j[name] = digest;
  return j;
}

Fingerprints fingerprints_from(const json& j) {
  Fingerprints fps;
  for (const auto& [name, digest] : j.items()) fps.emplace(name, digest.get<std::string>());
  return fps;
}

}  // namespace

json to_json(const CertificationRecord& c) {
  json outcomes = json::array();
  for (const auto& o : c.outcomes) outcomes.push_back({{"command", o.command}, {"exit", o.exit_status}});
  json tools = json::array();
  for (const auto& t : c.tool_manifest) {
    tools.push_back(
        {{"name", t.name}, {"path", t.path}, {"digest", t.digest}, {"producer", t.producer}});
  }
  return {{"package", c.package}, {"station", c.station},   {"timestamp", c.timestamp},
          {"outcomes", outcomes}, {"tool_manifest", tools}, {"result", c.pass ? "pass" : "fail"}};
}

namespace {

CertificationRecord certification_from(const json& j) {
  CertificationRecord c;
  c.package = j.at("package").get<std::string>();
  c.station = j.at("station").get<std::string>();
  c.timestamp = j.at("timestamp").get<std::string>();
  for (const auto& o : j.at("outcomes")) {
    c.outcomes.push_back({o.at("command").get<std::string>(), o.at("exit").get<int>()});
  }
  for (const auto& t : j.at("tool_manifest")) {
    c.tool_manifest.push_back({t.at("name").get<std::string>(), t.at("path").get<std::string>(),
                               t.at("digest").get<std::string>(),
                               t.at("producer").get<std::string>()});
  }
  c.pass = j.at("result").get<std::string>() == "pass";
  return c;
}

}  // namespace

json to_json(const DeliveryTicket& t) {
  return {{"package", t.package},
          {"from", t.from},
          {"to", t.to},
          {"requested_by", t.requested_by},
          {"created", t.created}};
}

namespace {

DeliveryTicket ticket_from(const json& j) {
  return {j.at("package").get<std::string>(), j.at("from").get<std::string>(),
          j.at("to").get<std::string>(), j.at("requested_by").get<std::string>(),
          j.at("created").get<std::string>()};
}

}  // namespace

json to_json(const DeliveryRecord& d) {
  return {{"ticket", to_json(d.ticket)},
          {"moved", to_json(d.moved)},
          {"destination", d.destination},
          {"responsibility", std::string(to_string(d.responsibility))},
          {"pending_owner", d.pending_owner}};
}

namespace {

DeliveryRecord delivery_from(const json& j) {
  DeliveryRecord d;
  d.ticket = ticket_from(j.at("ticket"));
  d.moved = fingerprints_from(j.at("moved"));
  d.destination = j.at("destination").get<std::string>();
  d.responsibility = j.at("responsibility").get<std::string>() == "transferred"
                         ? Responsibility::Transferred
                         : Responsibility::Pending;
  d.pending_owner = j.at("pending_owner").get<std::string>();
  return d;
}

json to_json(const PackageRecord& r) {
  json j = {{"package", r.package},
            {"station", r.station},
            {"state", std::string(to_string(r.state))},
            {"responsible", r.responsible},
            {"primaries", to_json(r.primaries)}};
  j["last_certification"] = r.last_certification ? to_json(*r.last_certification) : json(nullptr);
  return j;
}

json to_json(const LineTopology& topo) {
  json stations = json::array();
  for (const auto& [id, s] : topo.stations()) {
    stations.push_back({{"id", s.id}, {"owner", s.owner}, {"root", s.root},
                        {"downstream", json(s.downstream)}});
  }
  return {{"stations", stations}, {"tool_path", json(topo.tool_path())}};
}

const std::string& str(const json& payload, const char* key) {
  return payload.at(key).get_ref<const std::string&>();
}

}  // namespace

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Build: return "Build";
    case EventKind::Certify: return "Certify";
    case EventKind::Deliver: return "Deliver";
    case EventKind::Transition: return "Transition";
    case EventKind::Release: return "Release";
    case EventKind::Register: return "Register";
  }
  return "?";
}

std::string_view to_string(FaultPoint p) {
  switch (p) {
    case FaultPoint::BeforeAppend: return "BeforeAppend";
    case FaultPoint::MidAppend: return "MidAppend";
    case FaultPoint::AfterAppend: return "AfterAppend";
    case FaultPoint::AfterApply: return "AfterApply";
    case FaultPoint::AfterCache: return "AfterCache";
  }
  return "?";
}

const PackageRecord& LineState::package(const std::string& id) const {
  auto it = packages.find(id);
  if (it == packages.end()) throw Error(Errc::UnknownPackage, "no package '" + id + "' on the line");
  return it->second;
}

LineState initial_state(LineTopology topology) {
  LineState state;
  state.topology = std::move(topology);
  return state;
}

namespace {

PackageRecord& package_at(LineState& state, const json& payload) {
  const auto& id = str(payload, "package");
  auto it = state.packages.find(id);
  if (it == state.packages.end()) {
    throw Error(Errc::UnknownPackage, "event names unknown package '" + id + "'");
  }
  if (payload.contains("station") && str(payload, "station") != it->second.station) {
    throw Error(Errc::WrongStation, "package '" + id + "' is not at station '" +
                                        str(payload, "station") + "'");
  }
  return it->second;
}

void apply_register(LineState& state, const json& p) {
  const auto& what = str(p, "what");
  if (what == "line") return;
  if (what == "package") {
    const auto& id = str(p, "package");
    const auto& station = state.topology.station(str(p, "station"));
    if (state.packages.contains(id)) {
      throw Error(Errc::DuplicatePackage, "package '" + id + "' already exists");
    }
    PackageRecord record;
    record.package = id;
    record.station = station.id;
    record.responsible = station.owner;
    state.packages.emplace(id, std::move(record));
    return;
  }
  if (what == "artifact") {
    state.registry[str(p, "artifact")] = str(p, "location");
    return;
  }
  throw Error(Errc::InvalidEventSequence, "unknown registration '" + what + "'");
}

void apply_build(LineState& state, const json& p) {
  auto& record = package_at(state, p);
  if (str(p, "outcome") == "success" && p.contains("primaries")) {
    record.primaries = fingerprints_from(p.at("primaries"));
  }
}

void apply_transition(LineState& state, const json& p) {
  auto& record = package_at(state, p);
  auto from = parse_package_state(str(p, "from"));
  auto to = parse_package_state(str(p, "to"));
  if (record.state != from) {
    throw Error(Errc::InvalidTransition, "package '" + record.package + "' is " +
                                             std::string(to_string(record.state)) + ", not " +
                                             str(p, "from"));
  }
  auto next = transition(record, parse_lifecycle_event(str(p, "event")), state.topology);
  if (next.state != to) {
    throw Error(Errc::InvalidTransition, "transition of '" + record.package + "' ends in " +
                                             std::string(to_string(next.state)) + ", not " +
                                             str(p, "to"));
  }
  record = std::move(next);
}

void apply_certify(LineState& state, const json& p) {
  auto cert = certification_from(p.at("certification"));
  auto& record = package_at(state, json{{"package", cert.package}, {"station", cert.station}});
  record.last_certification = cert;
  state.certifications.push_back(std::move(cert));
}

void apply_deliver(LineState& state, const json& p, const std::string& actor) {
  const auto& phase = str(p, "phase");
  if (phase == "request") {
    auto ticket = ticket_from(p.at("ticket"));
    if (ticket.requested_by != actor) {
      throw Error(Errc::NotOwner, "ticket requested by '" + ticket.requested_by +
                                      "' but journaled by '" + actor + "'");
    }
    request_delivery(state.topology, state.package(ticket.package), ticket.from, ticket.to,
                     ticket.requested_by, ticket.created);
    return;
  }
  if (phase == "execute") {
    auto record = delivery_from(p.at("record"));
    auto& dest = package_at(state, json{{"package", record.destination}, {"station", record.ticket.to}});
    state.package(record.ticket.package);
    dest.responsible = record.pending_owner;
    state.deliveries.push_back(std::move(record));
    return;
  }
  if (phase == "transfer") {
    auto di = p.at("delivery").get<std::size_t>();
    auto ci = p.at("certification").get<std::size_t>();
    if (di >= state.deliveries.size() || ci >= state.certifications.size()) {
      throw Error(Errc::InvalidEventSequence, "transfer refers to unknown records");
    }
    auto next = transfer_responsibility(state.deliveries[di], state.certifications[ci]);
    auto& dest = package_at(state, json{{"package", next.destination}});
    dest.responsible = state.topology.station(next.ticket.to).owner;
    state.deliveries[di] = std::move(next);
    return;
  }
  throw Error(Errc::InvalidEventSequence, "unknown delivery phase '" + phase + "'");
}

void apply_release(LineState& state, const json& p) {
  auto& record = package_at(state, p);
  if (record.state != PackageState::Released) {
    throw Error(Errc::InvalidTransition, "package '" + record.package + "' is not Released");
  }
  for (const auto& [name, location] : p.at("artifacts").items()) {
    state.registry[name] = location.get<std::string>();
  }
}

}  // namespace

void apply_event(LineState& state, const Event& event) {
  if (event.sequence != state.last_sequence + 1) {
    throw Error(Errc::InvalidEventSequence, "expected event " +
                                                std::to_string(state.last_sequence + 1) +
                                                ", got " + std::to_string(event.sequence));
  }
  LineState next = state;
  try {
    const auto& p = event.payload;
    switch (event.kind) {
      case EventKind::Register: apply_register(next, p); break;
      case EventKind::Build: apply_build(next, p); break;
      case EventKind::Transition: apply_transition(next, p); break;
      case EventKind::Certify: apply_certify(next, p); break;
      case EventKind::Deliver: apply_deliver(next, p, event.actor); break;
      case EventKind::Release: apply_release(next, p); break;
    }
  } catch (const Error& e) {
    throw Error(Errc::InvalidEventSequence, "event " + std::to_string(event.sequence) + " (" +
                                                std::string(to_string(event.kind)) +
                                                "): " + std::string(e.name()) + ": " + e.what());
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidEventSequence, "event " + std::to_string(event.sequence) +
                                                " has a malformed payload: " + e.what());
  }
  next.last_sequence = event.sequence;
  state = std::move(next);
}

json state_to_json(const LineState& state) {
  json packages = json::object();
  for (const auto& [id, r] : state.packages) packages[id] = to_json(r);
  json deliveries = json::array();
  for (const auto& d : state.deliveries) deliveries.push_back(to_json(d));
  json certs = json::array();
  for (const auto& c : state.certifications) certs.push_back(to_json(c));
  json registry = json::object();
  for (const auto& [name, location] : state.registry) registry[name] = location;
  return {{"topology", to_json(state.topology)},
          {"packages", packages},
          {"deliveries", deliveries},
          {"certifications", certs},
          {"registry", registry},
          {"last_sequence", state.last_sequence}};
}

std::string serialize_state(const LineState& state) { return state_to_json(state).dump(2) + "\n"; }

std::string serialize_event(const Event& event) {
  json j = {{"seq", event.sequence},
            {"ts", event.timestamp},
            {"actor", event.actor},
            {"kind", std::string(to_string(event.kind))},
            {"payload", event.payload}};
  return j.dump();
}

Event parse_event(std::string_view line, std::size_t line_no) {
  try {
    auto j = json::parse(line);
    Event e;
    e.sequence = j.at("seq").get<std::uint64_t>();
    e.timestamp = j.at("ts").get<std::string>();
    e.actor = j.at("actor").get<std::string>();
    const auto& kind = j.at("kind").get_ref<const std::string&>();
    bool known = false;
    for (auto k : {EventKind::Build, EventKind::Certify, EventKind::Deliver, EventKind::Transition,
                   EventKind::Release, EventKind::Register}) {
      if (to_string(k) == kind) {
        e.kind = k;
        known = true;
      }
    }
    if (!known) throw Error(Errc::CorruptJournal, line_no, "unknown event kind '" + kind + "'");
    e.payload = j.at("payload");
    if (!e.payload.is_object()) throw Error(Errc::CorruptJournal, line_no, "payload is not an object");
    return e;
  } catch (const json::exception& ex) {
    throw Error(Errc::CorruptJournal, line_no, std::string("unreadable event: ") + ex.what());
  }
}

std::vector<Event> read_journal(const fs::path& path, TornTail torn) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    throw Error(Errc::CorruptJournal, "journal " + path.string() + " does not exist");
  }
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw Error(Errc::StorageFailure, e.what());
  }
  std::vector<Event> events;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    ++line_no;
    if (eol == std::string::npos) {
      if (torn == TornTail::Ignore) break;
      throw Error(Errc::CorruptJournal, line_no, "truncated event (interrupted append)");
    }
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    auto event = parse_event(line, line_no);
    if (event.sequence != events.size() + 1) {
      throw Error(Errc::CorruptJournal, line_no, "sequence " + std::to_string(event.sequence) +
                                                     " where " +
                                                     std::to_string(events.size() + 1) +
                                                     " was expected");
    }
    events.push_back(std::move(event));
  }
  return events;
}

LineState replay(const LineTopology& topology, const std::vector<Event>& events) {
  auto state = initial_state(topology);
  for (const auto& e : events) apply_event(state, e);
  return state;
}

LineState replay(std::string_view topology_config, const fs::path& journal) {
  return replay(load_topology(topology_config), read_journal(journal));
}

// Journal

namespace {

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

[[noreturn]] void storage_failure(const std::string& what, const fs::path& path) {
  throw Error(Errc::StorageFailure, what + " " + path.string() + ": " + std::strerror(errno));
}

void write_all(int fd, const char* data, std::size_t size, const fs::path& path) {
  while (size > 0) {
    auto n = ::write(fd, data, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      storage_failure("cannot append to", path);
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

// Sequence number of the last complete line, 0 for an empty journal.
std::uint64_t last_sequence(int fd, const fs::path& path) {
  auto size = ::lseek(fd, 0, SEEK_END);
  if (size < 0) storage_failure("cannot seek", path);
  if (size == 0) return 0;

  std::string tail;
  off_t chunk = 4096;
  for (;;) {
    off_t start = size > chunk ? size - chunk : 0;
    tail.resize(static_cast<std::size_t>(size - start));
    auto n = ::pread(fd, tail.data(), tail.size(), start);
    if (n < 0) storage_failure("cannot read", path);
    tail.resize(static_cast<std::size_t>(n));
    if (tail.empty() || tail.back() != '\n') {
      throw Error(Errc::CorruptJournal, "journal " + path.string() +
                                            " ends with an interrupted append; run `sal fsck`");
    }
    auto prev = tail.find_last_of('\n', tail.size() - 2);
    if (prev != std::string::npos || start == 0) {
      auto begin = prev == std::string::npos ? 0 : prev + 1;
      auto line = std::string_view(tail).substr(begin, tail.size() - 1 - begin);
      return parse_event(line, 0).sequence;
    }
    chunk *= 2;
  }
}

}  // namespace

std::uint64_t Journal::append(Event& event, const FaultHook& hook) {
  Fd fd(::open(path_.c_str(), O_RDWR | O_APPEND | O_CREAT | O_CLOEXEC, 0644));
  if (fd.get() < 0) storage_failure("cannot open journal", path_);
  if (::flock(fd.get(), LOCK_EX) != 0) storage_failure("cannot lock journal", path_);

  event.sequence = last_sequence(fd.get(), path_) + 1;
  auto line = serialize_event(event) + "\n";

  if (hook) {
    auto half = line.size() / 2;
    write_all(fd.get(), line.data(), half, path_);
    hook(FaultPoint::MidAppend, event);
    write_all(fd.get(), line.data() + half, line.size() - half, path_);
  } else {
    write_all(fd.get(), line.data(), line.size(), path_);
  }
  if (::fsync(fd.get()) != 0) storage_failure("cannot sync journal", path_);
  return event.sequence;
}

bool Journal::recover() {
  std::error_code ec;
  if (!fs::exists(path_, ec)) return false;
  auto text = read_file(path_);
  if (text.empty() || text.back() == '\n') return false;
  auto keep = text.find_last_of('\n');
  keep = keep == std::string::npos ? 0 : keep + 1;
  fs::resize_file(path_, keep, ec);
  if (ec) throw Error(Errc::StorageFailure, "cannot repair journal: " + ec.message());
  return true;
}

LineLock::LineLock(const fs::path& line_root) {
  auto path = sal_dir(line_root) / "lock";
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) storage_failure("cannot open lock", path);
  while (::flock(fd_, LOCK_EX) != 0) {
    if (errno != EINTR) {
      ::close(fd_);
      storage_failure("cannot lock", path);
    }
  }
}

LineLock::~LineLock() {
  if (fd_ >= 0) ::close(fd_);
}

fs::path sal_dir(const fs::path& line_root) { return line_root / ".sal"; }
fs::path config_path(const fs::path& line_root) { return line_root / "line.json"; }
fs::path journal_path(const fs::path& line_root) { return sal_dir(line_root) / "journal.ndjson"; }
fs::path cache_path(const fs::path& line_root) { return sal_dir(line_root) / "state.json"; }

// Store

Store::Store(fs::path root, LineState state, FaultHook hook)
    : root_(std::move(root)),
      state_(std::move(state)),
      journal_(journal_path(root_)),
      hook_(std::move(hook)) {}

Store Store::open(const fs::path& line_root, Mode mode, FaultHook hook) {
  std::error_code ec;
  if (!fs::is_directory(sal_dir(line_root), ec) || !fs::exists(journal_path(line_root), ec)) {
    throw Error(Errc::LineNotFound, "no assembly line at " + line_root.string());
  }
  auto topology = load_topology(read_file(config_path(line_root)));
  Journal journal(journal_path(line_root));
  if (mode == Mode::Mutating) journal.recover();
  auto events = read_journal(journal.path(),
                             mode == Mode::Mutating ? TornTail::Reject : TornTail::Ignore);
  return Store(line_root, replay(topology, events), std::move(hook));
}

Store Store::create(const fs::path& line_root, FaultHook hook) {
  std::error_code ec;
  if (fs::exists(journal_path(line_root), ec)) {
    throw Error(Errc::StorageFailure, "a line already exists at " + line_root.string());
  }
  auto topology = load_topology(read_file(config_path(line_root)));
  fs::create_directories(sal_dir(line_root), ec);
  if (ec) throw Error(Errc::StorageFailure, "cannot create " + sal_dir(line_root).string());
  Fd fd(::open(journal_path(line_root).c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644));
  if (fd.get() < 0) storage_failure("cannot create journal", journal_path(line_root));
  Store store(line_root, initial_state(std::move(topology)), std::move(hook));
  store.write_cache();
  return store;
}

std::uint64_t Store::commit(Event event) {
  // Validate against a copy first so a rejected event never reaches disk.
  auto next = state_;
  event.sequence = state_.last_sequence + 1;
  apply_event(next, event);

  if (hook_) hook_(FaultPoint::BeforeAppend, event);
  auto seq = journal_.append(event, hook_);
  if (seq != next.last_sequence) {
    throw Error(Errc::InvalidEventSequence,
                "journal advanced underneath this process; hold the line lock while mutating");
  }
  if (hook_) hook_(FaultPoint::AfterAppend, event);
  state_ = std::move(next);
  if (hook_) hook_(FaultPoint::AfterApply, event);
  write_cache();
  if (hook_) hook_(FaultPoint::AfterCache, event);
  return seq;
}

void Store::write_cache() const { write_file_atomic(cache_path(root_), serialize_state(state_)); }

std::optional<std::string> Store::read_cache() const {
  std::error_code ec;
  if (!fs::exists(cache_path(root_), ec)) return std::nullopt;
  return read_file(cache_path(root_));
}

}  // namespace sal
