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

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sal {

/// Conventional name of a package's construction procedure.
inline constexpr std::string_view kRecipeFile = "recipe.mk";

/// The rule run by certification. Its target is an ordinary OUTPUT, but
/// what it consumes is never flagged intermediate, default builds skip it,
/// and the system graph never matches it as a deliverable.
inline constexpr std::string_view kTestTarget = "test";

/// One `target: component...` entry plus its tab-indented command lines.
struct Rule {
  std::string target;
  std::vector<std::string> components;
  std::vector<std::string> commands;

  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Command names declared with a `tool:` directive.
struct ToolDeclaration {
  std::set<std::string> names;

  friend bool operator==(const ToolDeclaration&, const ToolDeclaration&) = default;
};

struct Recipe {
  std::vector<Rule> rules;
  std::map<std::string, std::string> macros;
  ToolDeclaration tools;

  const Rule* find(std::string_view target) const;
  bool has_target(std::string_view target) const { return find(target) != nullptr; }

  friend bool operator==(const Recipe&, const Recipe&) = default;
};

bool is_macro_name(std::string_view name);

/// Parses the make-subset recipe grammar:
///
///   file    = { macro | tool | rule | comment | blank }
///   macro   = NAME "=" text NEWLINE
///   tool    = "tool:" { name } NEWLINE
///   rule    = target ":" { component } NEWLINE { TAB command NEWLINE }
///   comment = "#" text NEWLINE
///
/// Rules and commands keep source order. Any defect raises a single
/// Error(SyntaxError) carrying the 1-based line number; nothing is returned
/// partially. A rule named `tool` is not expressible, the directive wins.
Recipe parse_recipe(std::string_view text);

/// Replaces every `$(NAME)` in targets, components, commands and tool names
/// with the macro's value. One pass: replacement text is not rescanned.
/// `$$` yields a literal `$`. Components are re-split on whitespace after
/// expansion so a macro may stand for several files.
Recipe expand_macros(const Recipe& recipe);

/// Canonical text form: sorted macros, one `tool:` line, then the rules.
/// parse_recipe(render_recipe(r)) == r for every valid recipe.
std::string render_recipe(const Recipe& recipe);

}  // namespace sal
