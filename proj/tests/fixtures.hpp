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

#include <atomic>
#include <cstdio>
#include <memory>
#include <sstream>
#include <vector>
#include <string>

#include "sal/assembly_line.hpp"
#include "test_support.hpp"

namespace sal::testing {

// `stubcc a b -o out` writes a marker line then the operands' bytes.
inline constexpr const char* kStubCc = R"(#!/bin/sh
out=""
srcs=""
while [ $# -gt 0 ]; do
  if [ "$1" = "-o" ]; then out="$2"; shift 2; else srcs="$srcs $1"; shift; fi
done
{ echo "object-code"; cat $srcs; } > "$out"
)";

inline constexpr const char* kStubLd = R"(#!/bin/sh
out=""
objs=""
while [ $# -gt 0 ]; do
  if [ "$1" = "-o" ]; then out="$2"; shift 2; else objs="$objs $1"; shift; fi
done
{ echo "linked-image"; cat $objs; } > "$out"
)";

inline constexpr const char* kCheck = R"(#!/bin/sh
for f in "$@"; do
  [ -s "$f" ] || { echo "check: $f missing or empty" >&2; exit 1; }
done
)";

/// What stubcc would write for the given operand contents.
inline std::string stubcc_output(const std::string& operands) { return "object-code\n" + operands; }
inline std::string stubld_output(const std::string& operands) { return "linked-image\n" + operands; }

/// Runs the stub tools (and `cat a b > out`) in-process. The tool files
/// still have to exist on disk so certification can resolve and pin them.
inline std::shared_ptr<CommandRunner> in_process_stubs() {
  return std::make_shared<FunctionRunner>([](const CommandRequest& req) -> CommandOutcome {
    std::istringstream in(req.command);
    std::vector<std::string> words;
    for (std::string w; in >> w;) words.push_back(w);
    if (words.empty()) return {0, ""};
    const auto& tool = words[0];
    if (tool == "stubcc" || tool == "stubld" || tool == "cat") {
      std::string out;
      std::string body;
      for (std::size_t i = 1; i < words.size(); ++i) {
        if (words[i] == "-o" || words[i] == ">") {
          if (i + 1 < words.size()) out = words[++i];
          continue;
        }
        std::ifstream src(req.cwd / words[i], std::ios::binary);
        if (!src) return {1, tool + ": cannot read " + words[i] + "\n"};
        std::ostringstream buf;
        buf << src.rdbuf();
        body += buf.str();
      }
      if (tool == "stubcc") body = stubcc_output(body);
      if (tool == "stubld") body = stubld_output(body);
      write(req.cwd / out, body);
      return {0, ""};
    }
    if (tool == "check") {
      for (std::size_t i = 1; i < words.size(); ++i) {
        std::error_code ec;
        auto p = req.cwd / words[i];
        if (!fs::is_regular_file(p, ec) || fs::file_size(p, ec) == 0) {
          return {1, "check: " + words[i] + " missing or empty\n"};
        }
      }
      return {0, ""};
    }
    return {127, tool + ": not found\n"};
  });
}

inline void install_stub_tools(const fs::path& dir) {
  write_executable(dir / "stubcc", kStubCc);
  write_executable(dir / "stubld", kStubLd);
  write_executable(dir / "check", kCheck);
}

/// Deterministic timestamps: 2026-01-01T00:00:00Z plus one second per call.
inline std::function<std::string()> counting_clock() {
  auto tick = std::make_shared<std::atomic<int>>(0);
  return [tick] {
    int n = (*tick)++;
    char buf[32];
    std::snprintf(buf, sizeof buf, "2026-01-01T%02d:%02d:%02dZ", (n / 3600) % 24, (n / 60) % 60,
                  n % 60);
    return std::string(buf);
  };
}

inline LineOptions test_options() {
  LineOptions options;
  options.clock = counting_clock();
  return options;
}

// Two workbenches feed one integration station.
inline constexpr const char* kTwoBenchConfig = R"({
  "tool_path": ["tools"],
  "stations": [
    {"id": "wb1", "owner": "alice", "root": "wb1", "downstream": ["int1"]},
    {"id": "wb2", "owner": "bob", "root": "wb2", "downstream": ["int1"]},
    {"id": "int1", "owner": "carol", "root": "int1", "downstream": []}
  ]
})";

inline constexpr const char* kPackage1Recipe =
    "programA: mainA\n"
    "\tstubcc mainA -o programA\n"
    "test: programA\n"
    "\tcheck programA\n";

inline constexpr const char* kPackage2Recipe =
    "programB: mainB\n"
    "\tstubcc mainB -o programB\n"
    "test: programB\n"
    "\tcheck programB\n";

// The integration recipe: one product built from both workbenches' sources
// while keeping productA and productB apart.
inline constexpr const char* kRecipeAB =
    "productAB: productA productB\n"
    "\tstubld productA productB -o productAB\n"
    "productA: mainA\n"
    "\tstubcc mainA -o productA\n"
    "productB: mainB\n"
    "\tstubcc mainB -o productB\n"
    "sources: Package1.mk Package2.mk\n"
    "\tcat Package1.mk Package2.mk > sources\n"
    "test: productAB sources\n"
    "\tcheck productAB productA productB sources\n";

inline constexpr const char* kMainA = "int main() { return 'A'; }\n";
inline constexpr const char* kMainB = "int main() { return 'B'; }\n";

/// A line on disk shaped like the integration example: Package1 at wb1,
/// Package2 at wb2, Package3 holding recipeAB at int1.
struct TwoBenchLine {
  explicit TwoBenchLine(const fs::path& at, LineOptions options = test_options()) : root(at) {
    write(root / "line.json", kTwoBenchConfig);
    install_stub_tools(root / "tools");
    line = std::make_unique<AssemblyLine>(AssemblyLine::init(root, "alice", std::move(options)));
    line->add_package("wb1", "Package1", "alice");
    line->add_package("wb2", "Package2", "bob");
    line->add_package("int1", "Package3", "carol");
    write(root / "wb1/Package1/recipe.mk", kPackage1Recipe);
    write(root / "wb1/Package1/mainA", kMainA);
    write(root / "wb2/Package2/recipe.mk", kPackage2Recipe);
    write(root / "wb2/Package2/mainB", kMainB);
    write(root / "int1/Package3/recipe.mk", kRecipeAB);
  }

  fs::path root;
  std::unique_ptr<AssemblyLine> line;
};

}  // namespace sal::testing
