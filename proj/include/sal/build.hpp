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
#include <vector>

#include "sal/recipe.hpp"
#include "sal/runner.hpp"

namespace sal {

struct Fingerprint {
  std::string name;
  std::string digest;

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

/// File name -> content digest. Ordered, so iteration is sorted by name.
using Fingerprints = std::map<std::string, std::string>;

/// Resolved locations of INPUT components that do not live in the workspace.
using InputPaths = std::map<std::string, std::filesystem::path>;

struct PlanStep {
  std::string target;
  std::vector<std::string> commands;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct BuildPlan {
  std::vector<std::string> goals;
  /// Topologically ordered: a step follows every step producing one of its
  /// components.
  std::vector<PlanStep> steps;
  /// Every target and component reachable from the goals.
  std::set<std::string> closure;
  /// Targets of rules outside the closure; used to keep the recorded set
  /// honest when they share components with the closure.
  std::map<std::string, std::vector<std::string>> outside_consumers;
  InputPaths inputs;

  bool empty() const { return steps.empty(); }
};

struct CommandLog {
  std::string target;
  std::string command;
  int exit_code = 0;
  std::string output;
};

struct CommandFailure {
  std::string target;
  std::string command;
  int exit_code = 0;
  std::string output;
};

struct BuildResult {
  bool success = true;
  /// Targets whose commands all exited 0, in execution order.
  std::vector<std::string> executed;
  std::vector<CommandLog> log;
  /// Digests of the closure after a successful build; empty on failure.
  Fingerprints fingerprints;
  std::optional<CommandFailure> failure;

  /// Throws Error(CommandFailed) describing `failure`, if any.
  void throw_if_failed() const;
};

/// A target is stale when its file is missing, when the recorded set lacks
/// it or holds a different digest for it, when any component's digest
/// differs from the recorded one, or when any component is produced by a
/// stale rule.
///
/// Throws UnknownTarget, DependencyCycle (message names the cycle) or
/// MissingIngredient (a non-target component neither in the workspace nor
/// in `inputs`).
BuildPlan plan_build(const Recipe& recipe, const std::vector<std::string>& goals,
                     const Fingerprints& recorded, const std::filesystem::path& workspace,
                     const InputPaths& inputs = {});

inline BuildPlan plan_build(const Recipe& recipe, const std::string& goal,
                            const Fingerprints& recorded, const std::filesystem::path& workspace,
                            const InputPaths& inputs = {}) {
  return plan_build(recipe, std::vector<std::string>{goal}, recorded, workspace, inputs);
}

/// Goals used when none is named: targets no other rule consumes, `test`
/// excluded, in recipe order.
std::vector<std::string> default_goals(const Recipe& recipe);

/// Runs the plan in order and stops at the first nonzero exit.
BuildResult execute_build(const BuildPlan& plan, const std::filesystem::path& workspace,
                          CommandRunner& runner,
                          const std::vector<std::filesystem::path>& search_path = {});

/// Throws FileMissing for a name that is neither in the workspace nor in
/// `inputs`.
Fingerprints fingerprint_tree(const std::filesystem::path& workspace,
                              const std::set<std::string>& names, const InputPaths& inputs = {});

/// Folds a successful build into the recorded set. Targets of rules outside
/// the plan's closure lose their entry when a component they share changed,
/// which makes them stale for the next build that reaches them.
Fingerprints record_build(const Fingerprints& recorded, const BuildPlan& plan,
                          const BuildResult& result);

/// `<root>/.sal/fingerprints`, one `<hex digest> <file name>` line per file,
/// sorted by file name.
std::filesystem::path fingerprints_path(const std::filesystem::path& package_root);
Fingerprints load_fingerprints(const std::filesystem::path& package_root);
void save_fingerprints(const std::filesystem::path& package_root, const Fingerprints& fps);
std::string render_fingerprints(const Fingerprints& fps);

}  // namespace sal
