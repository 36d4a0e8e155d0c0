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

#include "sal/assembly_line.hpp"

#include <ctime>

#include "sal/digest.hpp"
#include "sal/error.hpp"

namespace sal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kStagedFile = "staged";

fs::path staged_path(const fs::path& package_root) { return package_root / ".sal" / kStagedFile; }

std::set<std::string> load_staged(const fs::path& package_root) {
  std::set<std::string> names;
  std::error_code ec;
  if (!fs::exists(staged_path(package_root), ec)) return names;
  auto text = read_file(staged_path(package_root));
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    if (eol > pos) names.insert(text.substr(pos, eol - pos));
    pos = eol + 1;
  }
  return names;
}

void check_package_id(const std::string& id) {
  if (id.empty() || id.front() == '.' || id.find('/') != std::string::npos ||
      id.find_first_of(" \t\n") != std::string::npos) {
    throw Error(Errc::ConfigError, "invalid package id '" + id + "'");
  }
}

void require_owner(const LineState& state, const std::string& station, const std::string& actor,
                   const std::string& action) {
  const auto& owner = state.topology.station(station).owner;
  if (actor != owner) {
    throw Error(Errc::NotOwner, "'" + actor + "' cannot " + action + " at station '" + station +
                                    "'; it is owned by '" + owner + "'");
  }
}

json to_json_fps(const Fingerprints& fps) {
  json j = json::object();
  for (const auto& [name, digest] : fps) j[name] = digest;
  return j;
}

}  // namespace

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  ::gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct AssemblyLine::Resolution {
  InputPaths inputs;
  std::map<std::string, std::string> input_producers;
  std::map<std::string, ToolSource> tools;
  std::vector<fs::path> search_path;
};

AssemblyLine::AssemblyLine(fs::path root, LineOptions options)
    : root_(fs::absolute(std::move(root)).lexically_normal()), options_(std::move(options)) {
  if (!options_.runner) options_.runner = std::make_shared<ShellRunner>();
  if (!options_.clock) options_.clock = utc_timestamp;
}

AssemblyLine AssemblyLine::init(const fs::path& root, const std::string& actor,
                                LineOptions options) {
  AssemblyLine line(root, std::move(options));
  std::error_code ec;
  if (!fs::exists(config_path(line.root_), ec)) {
    throw Error(Errc::ConfigError, "no line.json at " + line.root_.string());
  }
  auto store = Store::create(line.root_, line.options_.fault_hook);
  LineLock lock(line.root_);
  for (const auto& [id, station] : store.state().topology.stations()) {
    fs::create_directories(line.root_ / station.root, ec);
    if (ec) throw Error(Errc::StorageFailure, "cannot create station root " + station.root);
  }
  json stations = json::array();
  for (const auto& [id, station] : store.state().topology.stations()) stations.push_back(id);
  store.commit(line.make_event(EventKind::Register, actor,
                               {{"what", "line"}, {"stations", stations}}));
  return line;
}

LineState AssemblyLine::state() const {
  return Store::open(root_, Store::Mode::ReadOnly).state();
}

Event AssemblyLine::make_event(EventKind kind, const std::string& actor, json payload) const {
  Event e;
  e.timestamp = options_.clock();
  e.actor = actor;
  e.kind = kind;
  e.payload = std::move(payload);
  return e;
}

void AssemblyLine::commit_transition(Store& store, const std::string& package,
                                     LifecycleEvent event, const std::string& actor) const {
  const auto& record = store.state().package(package);
  auto next = transition(record, event, store.state().topology);
  store.commit(make_event(EventKind::Transition, actor,
                          {{"package", package},
                           {"station", record.station},
                           {"event", std::string(to_string(event))},
                           {"from", std::string(to_string(record.state))},
                           {"to", std::string(to_string(next.state))}}));
}

// Package views

fs::path AssemblyLine::package_root(const LineState& state, const std::string& package) const {
  const auto& record = state.package(package);
  return root_ / state.topology.station(record.station).root / package;
}

PackageManifest AssemblyLine::manifest(const LineState& state, const std::string& package) const {
  auto dir = package_root(state, package);
  PackageManifest m;
  m.package_id = package;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return m;
  auto staged = load_staged(dir);
  for (auto it = fs::recursive_directory_iterator(dir); it != fs::recursive_directory_iterator();
       ++it) {
    if (it->is_directory() && it->path().filename() == ".sal") {
      it.disable_recursion_pending();
      continue;
    }
    if (!it->is_regular_file()) continue;
    auto name = it->path().lexically_relative(dir).generic_string();
    if (!staged.contains(name)) m.local_files.insert(std::move(name));
  }
  return m;
}

Recipe AssemblyLine::recipe(const LineState& state, const std::string& package) const {
  auto path = package_root(state, package) / kRecipeFile;
  return expand_macros(parse_recipe(read_file(path)));
}

TipoList AssemblyLine::tipo(const LineState& state, const std::string& package) const {
  return extract_tipo(recipe(state, package), manifest(state, package));
}

fs::path AssemblyLine::package_root(const std::string& package) const {
  return package_root(state(), package);
}
PackageManifest AssemblyLine::manifest(const std::string& package) const {
  return manifest(state(), package);
}
Recipe AssemblyLine::recipe(const std::string& package) const { return recipe(state(), package); }
TipoList AssemblyLine::tipo(const std::string& package) const { return tipo(state(), package); }

std::map<std::string, TipoList> AssemblyLine::line_tipos(const LineState& state,
                                                         bool strict) const {
  std::map<std::string, TipoList> tipos;
  std::error_code ec;
  for (const auto& [id, record] : state.packages) {
    if (!strict && !fs::exists(package_root(state, id) / kRecipeFile, ec)) continue;
    tipos.emplace(id, tipo(state, id));
  }
  return tipos;
}

AssemblyLine::Resolution AssemblyLine::resolve(const LineState& state,
                                               const std::string& package,
                                               const TipoList& tipo) const {
  auto tipos = line_tipos(state, false);
  tipos[package] = tipo;
  auto graph = link_packages(tipos);

  Resolution r;
  std::set<std::string> resolved_inputs;
  for (const auto& e : graph.edges) {
    if (e.consumer != package) continue;
    auto where = package_root(state, e.producer) / e.artifact;
    if (e.tool_edge) {
      r.tools[e.artifact] = ToolSource{where, e.producer};
      r.search_path.push_back(where.parent_path());
    } else {
      r.inputs[e.artifact] = where;
      r.input_producers[e.artifact] = e.producer;
    }
  }
  for (const auto& input : tipo.inputs) {
    if (r.inputs.contains(input)) continue;
    if (auto it = state.registry.find(input); it != state.registry.end()) {
      r.inputs[input] = root_ / it->second;
    }
  }
  for (const auto& dir : state.topology.tool_path()) r.search_path.push_back(root_ / dir);

  auto dir = package_root(state, package);
  for (const auto& tool : tipo.tools) {
    if (r.tools.contains(tool)) continue;
    auto path = resolve_executable(tool, dir, r.search_path);
    if (!path.empty()) {
      r.tools[tool] = ToolSource{path, std::string(kExternalProducer)};
      // A tool that lives inside a line package is that package's product.
      for (const auto& [id, rec] : state.packages) {
        if (id != package && path.parent_path() == package_root(state, id)) {
          r.tools[tool].producer = id;
        }
      }
    }
  }
  return r;
}

void AssemblyLine::stage_inputs(const fs::path& package_root, const InputPaths& inputs) const {
  auto staged = load_staged(package_root);
  bool changed = false;
  std::error_code ec;
  for (const auto& [name, source] : inputs) {
    if (!fs::is_regular_file(source, ec)) continue;
    auto dest = package_root / name;
    auto bytes = read_file(source);
    if (!fs::exists(dest, ec) || digest_file(dest) != digest_bytes(bytes)) {
      fs::create_directories(dest.parent_path());
      write_file_atomic(dest, bytes);
    }
    changed |= staged.insert(name).second;
  }
  if (changed) {
    fs::create_directories(staged_path(package_root).parent_path());
    std::string text;
    for (const auto& name : staged) text += name + "\n";
    write_file_atomic(staged_path(package_root), text);
  }
}

// Mutations

void AssemblyLine::add_package(const std::string& station, const std::string& package,
                               const std::string& actor) {
  check_package_id(package);
  LineLock lock(root_);
  auto store = Store::open(root_, Store::Mode::Mutating, options_.fault_hook);
  const auto& s = store.state().topology.station(station);
  if (store.state().packages.contains(package)) {
    throw Error(Errc::DuplicatePackage, "package '" + package + "' already exists");
  }
  std::error_code ec;
  fs::create_directories(root_ / s.root / package, ec);
  if (ec) throw Error(Errc::StorageFailure, "cannot create package directory: " + ec.message());
  store.commit(make_event(EventKind::Register, actor,
                          {{"what", "package"}, {"package", package}, {"station", station}}));
}

void AssemblyLine::register_artifact(const std::string& artifact, const std::string& location,
                                     const std::string& actor) {
  LineLock lock(root_);
  auto store = Store::open(root_, Store::Mode::Mutating, options_.fault_hook);
  store.commit(make_event(EventKind::Register, actor,
                          {{"what", "artifact"}, {"artifact", artifact}, {"location", location}}));
}

BuildResult AssemblyLine::build(const std::string& package,
                                const std::optional<std::string>& target,
                                const std::string& actor) {
  LineLock lock(root_);
  auto store = Store::open(root_, Store::Mode::Mutating, options_.fault_hook);
  const auto& state = store.state();
  auto dir = package_root(state, package);
  auto rec = recipe(state, package);
  auto tp = tipo(state, package);
  auto res = resolve(state, package, tp);
  stage_inputs(dir, res.inputs);

  auto primaries = fingerprint_tree(dir, tp.primaries);
  if (state.package(package).state != PackageState::Development &&
      primaries != state.package(package).primaries) {
    commit_transition(store, package, LifecycleEvent::Edit, actor);
  }

  auto goals = target ? std::vector<std::string>{*target} : default_goals(rec);
  auto recorded = load_fingerprints(dir);
  auto plan = plan_build(rec, goals, recorded, dir, res.inputs);
  auto result = execute_build(plan, dir, *options_.runner, res.search_path);
  if (result.success) save_fingerprints(dir, record_build(recorded, plan, result));

  json payload = {{"package", package},
                  {"station", state.package(package).station},
                  {"goals", goals},
                  {"outcome", result.success ? "success" : "failure"},
                  {"executed", result.executed}};
  if (result.success && !target) payload["primaries"] = to_json_fps(primaries);
  store.commit(make_event(EventKind::Build, actor, std::move(payload)));

  if (!target && store.state().package(package).state == PackageState::Development) {
    commit_transition(store, package,
                      result.success ? LifecycleEvent::BuildOk : LifecycleEvent::BuildFail, actor);
  }
  result.throw_if_failed();
  return result;
}

CertificationRecord AssemblyLine::certify(const std::string& package, const std::string& actor) {
  LineLock lock(root_);
  auto store = Store::open(root_, Store::Mode::Mutating, options_.fault_hook);
  const auto& state = store.state();
  const auto record = state.package(package);
  require_owner(state, record.station, actor, "certify");

  auto dir = package_root(state, package);
  auto tp = tipo(state, package);
  if (record.state == PackageState::Built && fingerprint_tree(dir, tp.primaries) != record.primaries) {
    throw Error(Errc::StalePrimaries, "package '" + package +
                                          "' changed since it was built; build it again");
  }
  auto res = resolve(state, package, tp);

  CertificationEnv env;
  env.package_root = dir;
  env.recipe = recipe(state, package);
  env.recorded = load_fingerprints(dir);
  env.inputs = res.inputs;
  env.search_path = res.search_path;
  env.tools = res.tools;
  env.input_producers = res.input_producers;
  for (const auto& [id, r] : state.packages) env.package_states[id] = r.state;
  env.timestamp = options_.clock();

  auto cert = sal::certify(record, tp, env, *options_.runner);
  store.commit(make_event(EventKind::Certify, actor, {{"certification", to_json(cert)}}));
  commit_transition(store, package, cert.pass ? LifecycleEvent::CertOk : LifecycleEvent::CertFail,
                    actor);

  if (cert.pass) {
    const auto& deliveries = store.state().deliveries;
    auto cert_index = store.state().certifications.size() - 1;
    for (std::size_t i = 0; i < deliveries.size(); ++i) {
      const auto& d = deliveries[i];
      if (d.destination == package && d.responsibility == Responsibility::Pending &&
          d.ticket.to == record.station) {
        store.commit(make_event(EventKind::Deliver, actor,
                                {{"phase", "transfer"}, {"delivery", i},
                                 {"certification", cert_index}}));
      }
    }
  }
  return cert;
}

DeliveryRecord AssemblyLine::deliver(const std::string& package, const std::string& from,
                                     const std::string& to, const std::string& into,
                                     const std::string& actor) {
  LineLock lock(root_);
  auto store = Store::open(root_, Store::Mode::Mutating, options_.fault_hook);
  const auto& state = store.state();
  const auto source = state.package(package);
  auto ticket = request_delivery(state.topology, source, from, to, actor, options_.clock());

  auto source_root = package_root(state, package);
  auto source_tipo = tipo(state, package);
  if (fingerprint_tree(source_root, source_tipo.primaries) != source.primaries) {
    throw Error(Errc::NotCertified, "package '" + package +
                                        "' was modified after certification");
  }
  if (source.last_certification) {
    for (const auto& tool : source.last_certification->tool_manifest) {
      std::error_code ec;
      if (!fs::is_regular_file(tool.path, ec) || digest_file(tool.path) != tool.digest) {
        throw Error(Errc::NotCertified, "certification of '" + package + "' is void: tool '" +
                                            tool.name + "' changed since it was certified");
      }
    }
  }

  store.commit(make_event(EventKind::Deliver, actor,
                          {{"phase", "request"}, {"ticket", to_json(ticket)}}));

  auto dest = store.state().packages.find(into);
  if (dest == store.state().packages.end() || dest->second.station != to) {
    throw Error(Errc::DestinationMissing, "no package '" + into + "' at station '" + to + "'");
  }

  DeliverySite site;
  site.source_root = source_root;
  site.destination_root = package_root(store.state(), into);
  site.source_tipo = source_tipo;
  site.source_owner = source.responsible;
  for (const auto& d : store.state().deliveries) {
    if (d.destination != into) continue;
    for (const auto& [name, digest] : d.moved) site.delivered_by[name] = d.ticket.package;
  }

  auto record = execute_delivery(ticket, into, site);
  store.commit(make_event(EventKind::Deliver, actor,
                          {{"phase", "execute"}, {"record", to_json(record)}}));
  commit_transition(store, into, LifecycleEvent::Arrive, actor);
  return record;
}

void AssemblyLine::release(const std::string& package, const std::string& actor) {
  LineLock lock(root_);
  auto store = Store::open(root_, Store::Mode::Mutating, options_.fault_hook);
  const auto& state = store.state();
  const auto record = state.package(package);
  require_owner(state, record.station, actor, "release");
  transition(record, LifecycleEvent::Release, state.topology);

  auto dir = package_root(state, package);
  auto tp = tipo(state, package);
  if (fingerprint_tree(dir, tp.primaries) != record.primaries) {
    throw Error(Errc::NotCertified, "package '" + package +
                                        "' was modified after certification");
  }
  json artifacts = json::object();
  std::error_code ec;
  for (const auto& name : tp.deliverables()) {
    if (fs::is_regular_file(dir / name, ec)) {
      artifacts[name] = (dir / name).lexically_relative(root_).generic_string();
    }
  }
  commit_transition(store, package, LifecycleEvent::Release, actor);
  store.commit(make_event(EventKind::Release, actor,
                          {{"package", package},
                           {"station", record.station},
                           {"artifacts", artifacts}}));
}

// Read-only views

std::string AssemblyLine::structure(std::vector<std::string>* warnings) const {
  auto s = state();
  auto tipos = line_tipos(s, true);
  auto graph = link_packages(tipos);
  if (warnings) *warnings = report_hidden_dependencies(graph, s.registry);
  return emit_system_structure(tipos, graph);
}

BuildOrder AssemblyLine::order() const {
  auto s = state();
  return build_order(link_packages(line_tipos(s, true)));
}

FsckReport AssemblyLine::fsck(bool rebuild) {
  LineLock lock(root_);
  FsckReport report;
  Journal journal(journal_path(root_));
  {
    std::error_code ec;
    if (fs::exists(journal.path(), ec) && fs::file_size(journal.path(), ec) > 0) {
      auto text = read_file(journal.path());
      report.torn_tail = text.back() != '\n';
    }
  }
  if (rebuild) report.repaired_tail = journal.recover();
  auto store = Store::open(root_, rebuild ? Store::Mode::Mutating : Store::Mode::ReadOnly);
  report.events = store.state().last_sequence;
  auto cached = store.read_cache();
  report.cache_matches = cached && *cached == serialize_state(store.state());
  if (rebuild && !report.cache_matches) {
    store.write_cache();
    report.cache_rebuilt = true;
  }
  return report;
}

}  // namespace sal
