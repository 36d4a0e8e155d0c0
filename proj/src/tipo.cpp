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

#include "sal/tipo.hpp"

#include <array>

#include "sal/error.hpp"
#include "strings.hpp"

namespace sal {

std::string_view to_string(IngredientClass c) {
  switch (c) {
    case IngredientClass::Tool: return "TOOL";
    case IngredientClass::Input: return "INPUT";
    case IngredientClass::Primary: return "PRIMARY";
    case IngredientClass::Output: return "OUTPUT";
  }
  return "?";
}

std::set<std::string> TipoList::deliverables() const {
  std::set<std::string> out;
  for (const auto& name : outputs) {
    if (name != kTestTarget && !intermediates.contains(name)) out.insert(name);
  }
  return out;
}

bool is_shell_builtin(std::string_view command_name) {
  static constexpr std::array<std::string_view, 6> kBuiltins = {"cd", "echo", "rm",
                                                                 "cp", "mkdir", "touch"};
  for (auto b : kBuiltins) {
    if (b == command_name) return true;
  }
  return false;
}

TipoList extract_tipo(const Recipe& recipe, const PackageManifest& manifest) {
  if (recipe.rules.empty()) {
    throw Error(Errc::NoOutput, "package '" + manifest.package_id +
                                    "': recipe has no rules, a package needs at least one output");
  }
  if (!manifest.local_files.contains(std::string(kRecipeFile))) {
    throw Error(Errc::FileMissing, "package '" + manifest.package_id + "' has no " +
                                       std::string(kRecipeFile));
  }

  TipoList tipo;
  for (const auto& rule : recipe.rules) tipo.outputs.insert(rule.target);
  if (tipo.outputs.contains(std::string(kRecipeFile))) {
    throw Error(Errc::ClassConflict, std::string(kRecipeFile) + " cannot be a target");
  }

  std::set<std::string> components;
  for (const auto& rule : recipe.rules) {
    for (const auto& component : rule.components) {
      components.insert(component);
      if (tipo.outputs.contains(component)) {
        if (rule.target != kTestTarget) tipo.intermediates.insert(component);
      } else if (manifest.local_files.contains(component)) {
        tipo.primaries.insert(component);
      } else {
        tipo.inputs.insert(component);
      }
    }
  }
  tipo.primaries.insert(std::string(kRecipeFile));

  auto classified = [&](const std::string& name) {
    return tipo.outputs.contains(name) || components.contains(name) || name == kRecipeFile;
  };

  for (const auto& name : recipe.tools.names) {
    if (classified(name)) {
      throw Error(Errc::ClassConflict,
                  "declared tool '" + name + "' is also a component or target");
    }
    tipo.tools.insert(name);
  }
  for (const auto& rule : recipe.rules) {
    for (const auto& command : rule.commands) {
      auto words = detail::split_words(command);
      if (words.empty()) continue;
      const auto& head = words.front();
      std::string local = head.starts_with("./") ? head.substr(2) : head;
      if (is_shell_builtin(head) || classified(local)) continue;
      tipo.tools.insert(head);
    }
  }
  return tipo;
}

std::string render_tipo(const TipoList& tipo) {
  std::string out;
  auto line = [&out](std::string_view label, const std::set<std::string>& names) {
    out += label;
    out += " =";
    for (const auto& name : names) {
      out += ' ';
      out += name;
    }
    out += '\n';
  };
  line("TOOL", tipo.tools);
  line("INPUT", tipo.inputs);
  line("PRIMARY", tipo.primaries);
  line("OUTPUT", tipo.outputs);
  return out;
}

}  // namespace sal
