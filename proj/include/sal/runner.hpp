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
#include <string>
#include <vector>

namespace sal {

struct CommandRequest {
  std::string command;
  std::filesystem::path cwd;
  /// Directories placed in front of PATH for this command only.
  std::vector<std::filesystem::path> search_path;
};

struct CommandOutcome {
  int exit_code = 0;
  /// stdout and stderr, interleaved as produced.
  std::string output;
};

/// Seam between the build engine and the outside world. Implementations must
/// be callable from several threads when handed to a parallel caller.
class CommandRunner {
 public:
  virtual ~CommandRunner() = default;
  virtual CommandOutcome run(const CommandRequest& request) = 0;
};

/// Runs each command with `/bin/sh -c` in the requested directory.
class ShellRunner final : public CommandRunner {
 public:
  CommandOutcome run(const CommandRequest& request) override;
};

/// Adapts a callable; used by tests to stand in for real tools.
class FunctionRunner final : public CommandRunner {
 public:
  using Fn = std::function<CommandOutcome(const CommandRequest&)>;
  explicit FunctionRunner(Fn fn) : fn_(std::move(fn)) {}
  CommandOutcome run(const CommandRequest& request) override { return fn_(request); }

 private:
  Fn fn_;
};

/// Looks `name` up the way a shell would: names containing '/' resolve
/// against `cwd`, bare names against `search_path` then $PATH. Returns an
/// empty path when nothing executable is found.
std::filesystem::path resolve_executable(const std::string& name,
                                         const std::filesystem::path& cwd,
                                         const std::vector<std::filesystem::path>& search_path);

}  // namespace sal
