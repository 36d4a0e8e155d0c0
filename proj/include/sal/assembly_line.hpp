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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sal/build.hpp"
#include "sal/delivery.hpp"
#include "sal/line_model.hpp"
#include "sal/runner.hpp"
#include "sal/store.hpp"
#include "sal/system_graph.hpp"
#include "sal/tipo.hpp"

namespace sal {

struct LineOptions {
  /// Defaults to a ShellRunner.
  std::shared_ptr<CommandRunner> runner;
  /// Event timestamps; defaults to the UTC wall clock in ISO 8601.
  std::function<std::string()> clock;
  FaultHook fault_hook;
};

std::string utc_timestamp();

struct FsckReport {
  std::size_t events = 0;
  /// The journal ended in an interrupted append.
  bool torn_tail = false;
  bool repaired_tail = false;
  bool cache_matches = false;
  bool cache_rebuilt = false;
};

/// A filesystem-resident assembly line rooted at a directory holding
/// `line.json` and `.sal/`. Every mutating call takes the line lock, replays
/// the journal, validates, and journals its milestones before returning.
/// Packages live at `<line root>/<station root>/<package id>/`.
class AssemblyLine {
 public:
  explicit AssemblyLine(std::filesystem::path root, LineOptions options = {});

  /// Creates `.sal/` for the `line.json` already at `root` and makes every
  /// station root.
  static AssemblyLine init(const std::filesystem::path& root, const std::string& actor,
                           LineOptions options = {});

  const std::filesystem::path& root() const { return root_; }

  /// Current state, read without the lock.
  LineState state() const;

  std::filesystem::path package_root(const std::string& package) const;
  PackageManifest manifest(const std::string& package) const;
  Recipe recipe(const std::string& package) const;
  TipoList tipo(const std::string& package) const;

  void add_package(const std::string& station, const std::string& package,
                   const std::string& actor);
  void register_artifact(const std::string& artifact, const std::string& location,
                         const std::string& actor);

  /// Builds the default goals, or `target` alone. A changed primary in a
  /// Built/Certified/Released package is journaled as an Edit first; a
  /// default build then journals BuildOk or BuildFail. Throws CommandFailed
  /// after journaling a failed build.
  BuildResult build(const std::string& package, const std::optional<std::string>& target,
                    const std::string& actor);

  /// Only the owner of the package's station certifies. A pass also
  /// transfers responsibility for every pending delivery into the package.
  CertificationRecord certify(const std::string& package, const std::string& actor);

  DeliveryRecord deliver(const std::string& package, const std::string& from,
                         const std::string& to, const std::string& into,
                         const std::string& actor);

  /// Certified -> Released at a final station, by that station's owner; the
  /// package's deliverables enter the registry.
  void release(const std::string& package, const std::string& actor);

  /// Structure document for every package; `warnings` receives the hidden
  /// dependencies.
  std::string structure(std::vector<std::string>* warnings = nullptr) const;
  BuildOrder order() const;

  FsckReport fsck(bool rebuild);

 private:
  struct Resolution;

  std::filesystem::path package_root(const LineState& state, const std::string& package) const;
  PackageManifest manifest(const LineState& state, const std::string& package) const;
  Recipe recipe(const LineState& state, const std::string& package) const;
  TipoList tipo(const LineState& state, const std::string& package) const;
  std::map<std::string, TipoList> line_tipos(const LineState& state, bool strict) const;
  Resolution resolve(const LineState& state, const std::string& package,
                     const TipoList& tipo) const;
  void stage_inputs(const std::filesystem::path& package_root, const InputPaths& inputs) const;
  Event make_event(EventKind kind, const std::string& actor, nlohmann::json payload) const;
  void commit_transition(Store& store, const std::string& package, LifecycleEvent event,
                         const std::string& actor) const;

  std::filesystem::path root_;
  LineOptions options_;
};

}  // namespace sal
