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

#include "sal/line_model.hpp"

#include <algorithm>

#include <json.hpp>

#include "sal/digest.hpp"
#include "sal/error.hpp"

namespace sal {

namespace {

using nlohmann::json;

std::string required_string(const json& obj, const char* key, std::size_t index) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw Error(Errc::ConfigError, "station #" + std::to_string(index) + ": field '" + key +
                                       "' must be a non-empty string");
  }
  return it->get<std::string>();
}

// True when one lexically normalised path equals or contains the other.
bool nested(const std::filesystem::path& a, const std::filesystem::path& b) {
  auto ai = a.begin();
  auto bi = b.begin();
  for (; ai != a.end() && bi != b.end(); ++ai, ++bi) {
    if (ai->empty() || bi->empty()) break;
    if (*ai != *bi) return false;
  }
  return true;
}

std::filesystem::path normal_root(const std::string& root) {
  auto p = std::filesystem::path(root).lexically_normal();
  auto s = p.string();
  while (s.size() > 1 && s.back() == '/') s.pop_back();
  return s;
}

}  // namespace

const Station& LineTopology::station(const std::string& id) const {
  auto it = stations_.find(id);
  if (it == stations_.end()) throw Error(Errc::UnknownStation, "no station '" + id + "'");
  return it->second;
}

bool LineTopology::has_edge(const std::string& from, const std::string& to) const {
  auto it = stations_.find(from);
  return it != stations_.end() && it->second.downstream.contains(to);
}

std::set<std::string> LineTopology::entry_stations() const {
  std::set<std::string> targets;
  for (const auto& [id, s] : stations_) targets.insert(s.downstream.begin(), s.downstream.end());
  std::set<std::string> out;
  for (const auto& [id, s] : stations_) {
    if (!targets.contains(id)) out.insert(id);
  }
  return out;
}

std::set<std::string> LineTopology::final_stations() const {
  std::set<std::string> out;
  for (const auto& [id, s] : stations_) {
    if (s.downstream.empty()) out.insert(id);
  }
  return out;
}

bool LineTopology::is_final(const std::string& id) const {
  return station(id).downstream.empty();
}

bool LineTopology::has_owner(const std::string& identity) const {
  for (const auto& [id, s] : stations_) {
    if (s.owner == identity) return true;
  }
  return false;
}

LineTopology load_topology(std::string_view config) {
  json doc;
  try {
    doc = json::parse(config);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ConfigError, std::string("line config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("stations") || !doc["stations"].is_array()) {
    throw Error(Errc::ConfigError, "line config needs a 'stations' array");
  }

  LineTopology topo;
  if (auto it = doc.find("tool_path"); it != doc.end()) {
    if (!it->is_array()) throw Error(Errc::ConfigError, "'tool_path' must be an array of strings");
    for (const auto& entry : *it) {
      if (!entry.is_string()) {
        throw Error(Errc::ConfigError, "'tool_path' must be an array of strings");
      }
      topo.tool_path_.push_back(entry.get<std::string>());
    }
  }

  std::size_t index = 0;
  for (const auto& item : doc["stations"]) {
    if (!item.is_object()) {
      throw Error(Errc::ConfigError, "station #" + std::to_string(index) + " is not an object");
    }
    Station s;
    s.id = required_string(item, "id", index);
    s.owner = required_string(item, "owner", index);
    s.root = required_string(item, "root", index);
    if (auto it = item.find("downstream"); it != item.end()) {
      if (!it->is_array()) {
        throw Error(Errc::ConfigError, "station '" + s.id + "': 'downstream' must be an array");
      }
      for (const auto& d : *it) {
        if (!d.is_string()) {
          throw Error(Errc::ConfigError, "station '" + s.id + "': downstream ids are strings");
        }
        s.downstream.insert(d.get<std::string>());
      }
    }
    if (topo.stations_.contains(s.id)) {
      throw Error(Errc::DuplicateStation, "station '" + s.id + "' is declared twice");
    }
    topo.stations_.emplace(s.id, std::move(s));
    ++index;
  }

  for (const auto& [id, s] : topo.stations_) {
    for (const auto& d : s.downstream) {
      if (!topo.stations_.contains(d)) {
        throw Error(Errc::ConfigError, "station '" + id + "' delivers to unknown station '" + d + "'");
      }
    }
  }

  for (auto a = topo.stations_.begin(); a != topo.stations_.end(); ++a) {
    auto ra = normal_root(a->second.root);
    if (ra == "." || ra.empty()) {
      throw Error(Errc::SharedRoot, "station '" + a->first + "' cannot use the line root itself");
    }
    for (auto b = std::next(a); b != topo.stations_.end(); ++b) {
      if (nested(ra, normal_root(b->second.root))) {
        throw Error(Errc::SharedRoot, "stations '" + a->first + "' and '" + b->first +
                                          "' have overlapping roots");
      }
    }
  }

  // Depth-first search for a back edge.
  enum class Mark { Active, Done };
  std::map<std::string, Mark> marks;
  std::vector<std::string> stack;
  auto visit = [&](auto&& self, const std::string& id) -> void {
    marks[id] = Mark::Active;
    stack.push_back(id);
    for (const auto& next : topo.stations_.at(id).downstream) {
      auto it = marks.find(next);
      if (it != marks.end() && it->second == Mark::Active) {
        std::string path;
        for (auto s = std::find(stack.begin(), stack.end(), next); s != stack.end(); ++s) {
          path += *s + " -> ";
        }
        throw Error(Errc::TopologyCycle, "delivery cycle: " + path + next);
      }
      if (it == marks.end()) self(self, next);
    }
    stack.pop_back();
    marks[id] = Mark::Done;
  };
  for (const auto& [id, s] : topo.stations_) {
    if (!marks.contains(id)) visit(visit, id);
  }

  if (topo.final_stations().empty() || topo.entry_stations().empty()) {
    throw Error(Errc::NoFinalStation, "a line needs at least one entry and one final station");
  }
  return topo;
}

std::string_view to_string(PackageState s) {
  switch (s) {
    case PackageState::Development: return "Development";
    case PackageState::Built: return "Built";
    case PackageState::Certified: return "Certified";
    case PackageState::Released: return "Released";
  }
  return "?";
}

std::string_view to_string(LifecycleEvent e) {
  switch (e) {
    case LifecycleEvent::Edit: return "Edit";
    case LifecycleEvent::BuildOk: return "BuildOk";
    case LifecycleEvent::BuildFail: return "BuildFail";
    case LifecycleEvent::CertOk: return "CertOk";
    case LifecycleEvent::CertFail: return "CertFail";
    case LifecycleEvent::Arrive: return "Arrive";
    case LifecycleEvent::Release: return "Release";
  }
  return "?";
}

PackageState parse_package_state(std::string_view s) {
  for (auto v : {PackageState::Development, PackageState::Built, PackageState::Certified,
                 PackageState::Released}) {
    if (to_string(v) == s) return v;
  }
  throw Error(Errc::ConfigError, "unknown package state '" + std::string(s) + "'");
}

LifecycleEvent parse_lifecycle_event(std::string_view s) {
  for (auto v : {LifecycleEvent::Edit, LifecycleEvent::BuildOk, LifecycleEvent::BuildFail,
                 LifecycleEvent::CertOk, LifecycleEvent::CertFail, LifecycleEvent::Arrive,
                 LifecycleEvent::Release}) {
    if (to_string(v) == s) return v;
  }
  throw Error(Errc::ConfigError, "unknown lifecycle event '" + std::string(s) + "'");
}

PackageRecord transition(const PackageRecord& record, LifecycleEvent event,
                         const LineTopology& topology) {
  using S = PackageState;
  using E = LifecycleEvent;
  auto next = record;
  auto invalid = [&]() -> Error {
    return Error(Errc::InvalidTransition, "package '" + record.package + "': " +
                                              std::string(to_string(event)) + " is not allowed in " +
                                              std::string(to_string(record.state)));
  };

  switch (event) {
    case E::Edit:
    case E::Arrive:
      next.state = S::Development;
      break;
    case E::BuildOk:
      if (record.state != S::Development) throw invalid();
      next.state = S::Built;
      break;
    case E::BuildFail:
      if (record.state != S::Development) throw invalid();
      break;
    case E::CertOk:
      if (record.state != S::Built) throw invalid();
      next.state = S::Certified;
      break;
    case E::CertFail:
      if (record.state != S::Built) throw invalid();
      next.state = S::Development;
      break;
    case E::Release:
      if (record.state != S::Certified) throw invalid();
      if (!topology.is_final(record.station)) {
        throw Error(Errc::ReleaseNotFinal, "package '" + record.package + "' is at station '" +
                                               record.station + "', which is not a final station");
      }
      next.state = S::Released;
      break;
  }
  return next;
}

CertificationRecord certify(const PackageRecord& record, const TipoList& tipo,
                            const CertificationEnv& env, CommandRunner& runner) {
  if (record.state != PackageState::Built) {
    throw Error(Errc::InvalidTransition, "package '" + record.package + "' is " +
                                             std::string(to_string(record.state)) +
                                             "; certification requires a build");
  }
  if (!env.recipe.has_target(kTestTarget)) {
    throw Error(Errc::NoTestTarget, "package '" + record.package + "' has no '" +
                                        std::string(kTestTarget) + "' target");
  }

  auto certified = [&](const std::string& producer) {
    auto it = env.package_states.find(producer);
    return it != env.package_states.end() &&
           (it->second == PackageState::Certified || it->second == PackageState::Released);
  };

  CertificationRecord cert;
  cert.package = record.package;
  cert.station = record.station;
  cert.timestamp = env.timestamp;

  for (const auto& name : tipo.tools) {
    auto it = env.tools.find(name);
    if (it == env.tools.end() || it->second.path.empty()) {
      throw Error(Errc::ToolMissing, "package '" + record.package + "': tool '" + name +
                                         "' cannot be resolved");
    }
    const auto& source = it->second;
    if (source.producer != kExternalProducer && source.producer != record.package &&
        !certified(source.producer)) {
      throw Error(Errc::ToolNotCertified, "tool '" + name + "' comes from package '" +
                                              source.producer + "', which is not certified");
    }
    cert.tool_manifest.push_back(
        {name, source.path.string(), digest_file(source.path), source.producer});
  }
  for (const auto& input : tipo.inputs) {
    auto it = env.input_producers.find(input);
    if (it != env.input_producers.end() && !certified(it->second)) {
      throw Error(Errc::InputNotCertified, "input '" + input + "' comes from package '" +
                                               it->second + "', which is not certified");
    }
  }

  auto plan = plan_build(env.recipe, std::string(kTestTarget), env.recorded, env.package_root,
                         env.inputs);
  auto result = execute_build(plan, env.package_root, runner, env.search_path);
  for (const auto& entry : result.log) cert.outcomes.push_back({entry.command, entry.exit_code});
  cert.pass = result.success;
  return cert;
}

}  // namespace sal
