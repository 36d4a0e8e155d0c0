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

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sal/build.hpp"
#include "sal/recipe.hpp"
#include "sal/runner.hpp"
#include "sal/tipo.hpp"

namespace sal {

/// Producer recorded for tools that no line package builds.
inline constexpr std::string_view kExternalProducer = "external";

struct Station {
  std::string id;
  std::string owner;
  /// Directory relative to the line root (absolute paths are kept as is).
  std::string root;
  std::set<std::string> downstream;

  friend bool operator==(const Station&, const Station&) = default;
};

class LineTopology {
 public:
  LineTopology() = default;

  const std::map<std::string, Station>& stations() const { return stations_; }
  const std::vector<std::string>& tool_path() const { return tool_path_; }

  /// Throws UnknownStation.
  const Station& station(const std::string& id) const;
  bool contains(const std::string& id) const { return stations_.contains(id); }
  bool has_edge(const std::string& from, const std::string& to) const;

  /// Stations with no incoming delivery: the programmer workbenches.
  std::set<std::string> entry_stations() const;
  /// Stations with no outgoing delivery.
  std::set<std::string> final_stations() const;
  bool is_final(const std::string& id) const;
  bool has_owner(const std::string& identity) const;

  friend bool operator==(const LineTopology&, const LineTopology&) = default;

 private:
  friend LineTopology load_topology(std::string_view config);

  std::map<std::string, Station> stations_;
  std::vector<std::string> tool_path_;
};

/// Parses and validates `line.json`:
///
///   {
///     "tool_path": ["tools"],            optional, searched before $PATH
///     "stations": [
///       {"id": "wb1", "owner": "alice", "root": "wb1", "downstream": ["int"]}
///     ]
///   }
///
/// Throws ConfigError (malformed document or unknown downstream id),
/// DuplicateStation, SharedRoot (roots equal or nested), TopologyCycle,
/// NoFinalStation.
LineTopology load_topology(std::string_view config);

enum class PackageState { Development, Built, Certified, Released };
enum class LifecycleEvent { Edit, BuildOk, BuildFail, CertOk, CertFail, Arrive, Release };

std::string_view to_string(PackageState s);
std::string_view to_string(LifecycleEvent e);
/// Throw ConfigError on unknown names.
PackageState parse_package_state(std::string_view s);
LifecycleEvent parse_lifecycle_event(std::string_view s);

struct ToolManifestEntry {
  std::string name;
  std::string path;
  std::string digest;
  /// Producing package id, or "external".
  std::string producer;

  friend bool operator==(const ToolManifestEntry&, const ToolManifestEntry&) = default;
};

struct TestOutcome {
  std::string command;
  int exit_status = 0;

  friend bool operator==(const TestOutcome&, const TestOutcome&) = default;
};

struct CertificationRecord {
  std::string package;
  std::string station;
  std::string timestamp;
  std::vector<TestOutcome> outcomes;
  std::vector<ToolManifestEntry> tool_manifest;
  bool pass = false;

  friend bool operator==(const CertificationRecord&, const CertificationRecord&) = default;
};

struct PackageRecord {
  std::string package;
  std::string station;
  PackageState state = PackageState::Development;
  std::string responsible;
  /// Digests of the primaries at the last successful build.
  Fingerprints primaries;
  std::optional<CertificationRecord> last_certification;

  friend bool operator==(const PackageRecord&, const PackageRecord&) = default;
};

/// The package lifecycle:
///
///   Development --BuildOk--> Built --CertOk--> Certified --Release--> Released
///   Development --BuildFail--> Development
///   Built --CertFail--> Development
///   any --Edit--> Development          (repair)
///   any --Arrive--> Development        (a delivery landed)
///
/// Release needs a final station (ReleaseNotFinal otherwise). Everything
/// else throws InvalidTransition.
PackageRecord transition(const PackageRecord& record, LifecycleEvent event,
                         const LineTopology& topology);

struct ToolSource {
  std::filesystem::path path;
  std::string producer{kExternalProducer};
};

/// What certification needs to know about the rest of the line.
struct CertificationEnv {
  std::filesystem::path package_root;
  Recipe recipe;
  Fingerprints recorded;
  InputPaths inputs;
  std::vector<std::filesystem::path> search_path;
  /// Every TOOL of the package, resolved.
  std::map<std::string, ToolSource> tools;
  /// Inputs built on the line: artifact -> producing package id.
  std::map<std::string, std::string> input_producers;
  std::map<std::string, PackageState> package_states;
  std::string timestamp;
};

/// Runs the recipe's `test` target and pins every tool's digest. The caller
/// applies CertOk or CertFail from `pass`.
///
/// Throws InvalidTransition (record not Built), NoTestTarget, ToolMissing,
/// ToolNotCertified / InputNotCertified (a line producer is neither
/// Certified nor Released).
CertificationRecord certify(const PackageRecord& record, const TipoList& tipo,
                            const CertificationEnv& env, CommandRunner& runner);

}  // namespace sal
