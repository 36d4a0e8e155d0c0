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

#include "sal/build.hpp"

#include <algorithm>
#include <unordered_map>

#include "sal/digest.hpp"
#include "sal/error.hpp"
#include "strings.hpp"

namespace sal {

namespace {

namespace fs = std::filesystem;

class Planner {
 public:
  Planner(const Recipe& recipe, const Fingerprints& recorded, const fs::path& workspace,
          const InputPaths& inputs)
      : recipe_(recipe), recorded_(recorded), workspace_(workspace), inputs_(inputs) {}

  BuildPlan plan(const std::vector<std::string>& goals) {
    for (const auto& goal : goals) {
      if (!recipe_.has_target(goal)) {
        throw Error(Errc::UnknownTarget, "no rule for target '" + goal + "'");
      }
    }
    for (const auto& goal : goals) visit(goal);

    BuildPlan plan;
    plan.goals = goals;
    plan.inputs = inputs_;
    for (const auto* rule : order_) {
      plan.closure.insert(rule->target);
      for (const auto& c : rule->components) plan.closure.insert(c);
      if (stale_.at(rule->target)) plan.steps.push_back({rule->target, rule->commands});
    }
    for (const auto& rule : recipe_.rules) {
      if (state_.contains(rule.target)) continue;
      for (const auto& c : rule.components) {
        if (plan.closure.contains(c)) plan.outside_consumers[c].push_back(rule.target);
      }
    }
    return plan;
  }

 private:
  enum class Mark { Active, Done };

  void visit(const std::string& target) {
    auto it = state_.find(target);
    if (it != state_.end()) {
      if (it->second == Mark::Active) report_cycle(target);
      return;
    }
    state_[target] = Mark::Active;
    stack_.push_back(target);
    const Rule* rule = recipe_.find(target);

    bool stale = false;
    for (const auto& component : rule->components) {
      if (recipe_.has_target(component)) {
        visit(component);
        if (stale_.at(component)) stale = true;
      } else if (!exists(component)) {
        throw Error(Errc::MissingIngredient, "'" + component + "' needed by '" + target +
                                                 "' is not in the workspace and is not a "
                                                 "resolvable input");
      }
      if (differs_from_record(component)) stale = true;
    }
    if (differs_from_record(target)) stale = true;

    stack_.pop_back();
    state_[target] = Mark::Done;
    stale_[target] = stale;
    order_.push_back(rule);
  }

  [[noreturn]] void report_cycle(const std::string& target) {
    auto start = std::find(stack_.begin(), stack_.end(), target);
    std::string path;
    for (auto it = start; it != stack_.end(); ++it) {
      path += *it;
      path += " -> ";
    }
    path += target;
    throw Error(Errc::DependencyCycle, "dependency cycle: " + path);
  }

  std::optional<fs::path> locate(const std::string& name) const {
    std::error_code ec;
    auto local = workspace_ / name;
    if (fs::is_regular_file(local, ec)) return local;
    if (auto it = inputs_.find(name); it != inputs_.end() && fs::is_regular_file(it->second, ec)) {
      return it->second;
    }
    return std::nullopt;
  }

  bool exists(const std::string& name) const { return locate(name).has_value(); }

  // Missing files and unrecorded names both count as different.
  bool differs_from_record(const std::string& name) {
    auto rec = recorded_.find(name);
    if (rec == recorded_.end()) return true;
    auto cached = digests_.find(name);
    if (cached == digests_.end()) {
      auto where = locate(name);
      cached = digests_.emplace(name, where ? digest_file(*where) : std::string()).first;
    }
    return cached->second.empty() || cached->second != rec->second;
  }

  const Recipe& recipe_;
  const Fingerprints& recorded_;
  const fs::path& workspace_;
  const InputPaths& inputs_;

  std::unordered_map<std::string, Mark> state_;
  std::unordered_map<std::string, bool> stale_;
  std::unordered_map<std::string, std::string> digests_;
  std::vector<std::string> stack_;
  std::vector<const Rule*> order_;
};

}  // namespace

void BuildResult::throw_if_failed() const {
  if (!failure) return;
  std::string message = "target '" + failure->target + "': command '" + failure->command +
                        "' exited " + std::to_string(failure->exit_code);
  if (!failure->output.empty()) {
    message += "\n";
    message += failure->output;
  }
  throw Error(Errc::CommandFailed, message);
}

BuildPlan plan_build(const Recipe& recipe, const std::vector<std::string>& goals,
                     const Fingerprints& recorded, const std::filesystem::path& workspace,
                     const InputPaths& inputs) {
  return Planner(recipe, recorded, workspace, inputs).plan(goals);
}

std::vector<std::string> default_goals(const Recipe& recipe) {
  std::set<std::string> consumed;
  for (const auto& rule : recipe.rules) {
    if (rule.target == kTestTarget) continue;
    for (const auto& c : rule.components) consumed.insert(c);
  }
  std::vector<std::string> goals;
  for (const auto& rule : recipe.rules) {
    if (rule.target != kTestTarget && !consumed.contains(rule.target)) goals.push_back(rule.target);
  }
  return goals;
}

BuildResult execute_build(const BuildPlan& plan, const std::filesystem::path& workspace,
                          CommandRunner& runner,
                          const std::vector<std::filesystem::path>& search_path) {
  BuildResult result;
  for (const auto& step : plan.steps) {
    for (const auto& command : step.commands) {
      auto outcome = runner.run(CommandRequest{command, workspace, search_path});
      result.log.push_back({step.target, command, outcome.exit_code, outcome.output});
      if (outcome.exit_code != 0) {
        result.success = false;
        result.failure = CommandFailure{step.target, command, outcome.exit_code, outcome.output};
        return result;
      }
    }
    result.executed.push_back(step.target);
  }

  std::set<std::string> present;
  std::error_code ec;
  for (const auto& name : plan.closure) {
    auto in = plan.inputs.find(name);
    if (std::filesystem::is_regular_file(workspace / name, ec) ||
        (in != plan.inputs.end() && std::filesystem::is_regular_file(in->second, ec))) {
      present.insert(name);
    }
  }
  result.fingerprints = fingerprint_tree(workspace, present, plan.inputs);
  return result;
}

Fingerprints fingerprint_tree(const std::filesystem::path& workspace,
                              const std::set<std::string>& names, const InputPaths& inputs) {
  Fingerprints out;
  std::error_code ec;
  for (const auto& name : names) {
    auto local = workspace / name;
    if (std::filesystem::is_regular_file(local, ec)) {
      out.emplace(name, digest_file(local));
    } else if (auto it = inputs.find(name); it != inputs.end()) {
      out.emplace(name, digest_file(it->second));
    } else {
      throw Error(Errc::FileMissing, "cannot fingerprint missing file '" + name + "'");
    }
  }
  return out;
}

Fingerprints record_build(const Fingerprints& recorded, const BuildPlan& plan,
                          const BuildResult& result) {
  if (!result.success) return recorded;
  Fingerprints next = recorded;
  for (const auto& name : plan.closure) {
    if (!result.fingerprints.contains(name)) next.erase(name);
  }
  for (const auto& [name, digest] : result.fingerprints) {
    auto old = recorded.find(name);
    bool changed = old == recorded.end() || old->second != digest;
    next[name] = digest;
    if (!changed) continue;
    if (auto it = plan.outside_consumers.find(name); it != plan.outside_consumers.end()) {
      for (const auto& target : it->second) next.erase(target);
    }
  }
  return next;
}

std::filesystem::path fingerprints_path(const std::filesystem::path& package_root) {
  return package_root / ".sal" / "fingerprints";
}

std::string render_fingerprints(const Fingerprints& fps) {
  std::string out;
  for (const auto& [name, digest] : fps) {
    out += digest;
    out += ' ';
    out += name;
    out += '\n';
  }
  return out;
}

Fingerprints load_fingerprints(const std::filesystem::path& package_root) {
  auto path = fingerprints_path(package_root);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return {};
  auto text = read_file(path);
  Fingerprints fps;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto space = line.find(' ');
    if (space != 64 || space + 1 >= line.size()) {
      throw Error(Errc::StorageFailure, line_no, "malformed fingerprint in " + path.string());
    }
    fps.emplace(std::string(line.substr(space + 1)), std::string(line.substr(0, space)));
  }
  return fps;
}

void save_fingerprints(const std::filesystem::path& package_root, const Fingerprints& fps) {
  auto path = fingerprints_path(package_root);
  std::filesystem::create_directories(path.parent_path());
  write_file_atomic(path, render_fingerprints(fps));
}

}  // namespace sal
