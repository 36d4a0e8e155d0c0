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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sal/assembly_line.hpp"

namespace sal {

/// Process context the CLI reads: working directory, SAL_OWNER, SAL_LINE.
struct CliEnvironment {
  std::filesystem::path cwd;
  std::optional<std::string> owner;
  std::optional<std::string> line;
  LineOptions options;
};

CliEnvironment environment_from_process();

/// Runs one `sal` invocation; `args` excludes the program name. Exit codes:
/// 0 success, 1 domain error (stderr starts with the error name), 2 usage.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const CliEnvironment& env);

}  // namespace sal
