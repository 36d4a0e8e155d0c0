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

#include <set>
#include <string>
#include <string_view>

#include "sal/recipe.hpp"

namespace sal {

enum class IngredientClass { Tool, Input, Primary, Output };

std::string_view to_string(IngredientClass c);

/// A package's interconnection signature: tools, inputs, primaries, outputs.
struct TipoList {
  std::set<std::string> tools;
  std::set<std::string> inputs;
  std::set<std::string> primaries;
  std::set<std::string> outputs;
  /// Outputs consumed by another rule of the same recipe.
  std::set<std::string> intermediates;

  /// Outputs another package may consume: not intermediate, not `test`.
  std::set<std::string> deliverables() const;
  /// Ingredient count (the M of a package): tools + inputs + primaries.
  std::size_t ingredient_count() const {
    return tools.size() + inputs.size() + primaries.size();
  }

  friend bool operator==(const TipoList&, const TipoList&) = default;
};

struct PackageManifest {
  std::string package_id;
  /// Relative names of the files physically present at the package root.
  std::set<std::string> local_files;
};

/// Shell built-ins never count as tools.
bool is_shell_builtin(std::string_view command_name);

/// Classifies every file the (macro-expanded) recipe names:
///   OUTPUT  every rule target;
///   PRIMARY a non-target component present in the manifest, plus recipe.mk;
///   INPUT   a non-target component absent from the manifest;
///   TOOL    first token of each command and each `tool:` name, minus
///           built-ins and anything already classified.
/// Throws NoOutput for a recipe without rules, ClassConflict when a declared
/// tool is also a component or target, FileMissing when the manifest lacks
/// recipe.mk.
TipoList extract_tipo(const Recipe& recipe, const PackageManifest& manifest);

/// Four lines, names sorted and space separated:
///   TOOL = ...\nINPUT = ...\nPRIMARY = ...\nOUTPUT = ...\n
/// An empty class renders as `INPUT =` with nothing after the sign.
std::string render_tipo(const TipoList& tipo);

}  // namespace sal
