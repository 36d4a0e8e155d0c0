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

#include "sal/recipe.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_set>

#include "sal/error.hpp"
#include "strings.hpp"

namespace sal {

namespace {

using detail::split_words;
using detail::trim;

constexpr std::string_view kToolDirective = "tool";

// Returns the byte offset of the first invalid sequence, or npos.
std::size_t invalid_utf8_offset(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<std::uint8_t>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xe0) == 0xc0) {
      len = 2;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      len = 3;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > s.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      auto cc = static_cast<std::uint8_t>(s[i + k]);
      if ((cc & 0xc0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3f);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10ffff ||
        (cp >= 0xd800 && cp <= 0xdfff)) {
      return i;
    }
    i += len;
  }
  return std::string_view::npos;
}

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), detail::is_space);
}

}  // namespace

const Rule* Recipe::find(std::string_view target) const {
  for (const auto& rule : rules) {
    if (rule.target == target) return &rule;
  }
  return nullptr;
}

bool is_macro_name(std::string_view name) {
  if (name.empty()) return false;
  auto head = name.front();
  if (!(head == '_' || (head >= 'A' && head <= 'Z') || (head >= 'a' && head <= 'z'))) {
    return false;
  }
  return std::all_of(name.begin() + 1, name.end(), [](char c) {
    return c == '_' || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
           (c >= '0' && c <= '9');
  });
}

Recipe parse_recipe(std::string_view text) {
  Recipe recipe;
  std::unordered_set<std::string> targets;
  Rule* current = nullptr;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    auto line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;

    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (invalid_utf8_offset(line) != std::string_view::npos) {
      throw Error(Errc::SyntaxError, line_no, "invalid UTF-8");
    }

    if (trim(line).empty() || line.front() == '#') continue;

    if (line.front() == '\t') {
      if (current == nullptr) {
        throw Error(Errc::SyntaxError, line_no, "command line with no preceding rule header");
      }
      current->commands.emplace_back(line.substr(1));
      continue;
    }

    current = nullptr;
    auto colon = line.find(':');
    auto equals = line.find('=');

    if (equals != std::string_view::npos && (colon == std::string_view::npos || equals < colon)) {
      auto name = trim(line.substr(0, equals));
      if (!is_macro_name(name)) {
        throw Error(Errc::SyntaxError, line_no, "invalid macro name '" + std::string(name) + "'");
      }
      auto [it, inserted] =
          recipe.macros.emplace(std::string(name), std::string(trim(line.substr(equals + 1))));
      if (!inserted) {
        throw Error(Errc::SyntaxError, line_no, "macro '" + std::string(name) + "' redefined");
      }
      continue;
    }

    if (colon == std::string_view::npos) {
      throw Error(Errc::SyntaxError, line_no, "rule header without ':'");
    }

    auto target = trim(line.substr(0, colon));
    auto rest = line.substr(colon + 1);
    if (target == kToolDirective) {
      for (auto& name : split_words(rest)) recipe.tools.names.insert(std::move(name));
      continue;
    }
    if (target.empty()) {
      throw Error(Errc::SyntaxError, line_no, "rule header without a target");
    }
    if (has_whitespace(target)) {
      throw Error(Errc::SyntaxError, line_no,
                  "multiple targets are not supported: '" + std::string(target) + "'");
    }
    if (!rest.empty() && rest.front() == ':') {
      throw Error(Errc::SyntaxError, line_no, "double-colon rules are not supported");
    }
    if (!targets.insert(std::string(target)).second) {
      throw Error(Errc::SyntaxError, line_no, "duplicate target '" + std::string(target) + "'");
    }
    recipe.rules.push_back(Rule{std::string(target), split_words(rest), {}});
    current = &recipe.rules.back();
  }
  return recipe;
}

namespace {

std::string expand_text(std::string_view text, const std::map<std::string, std::string>& macros) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '$') {
      out.push_back(text[i++]);
      continue;
    }
    if (i + 1 < text.size() && text[i + 1] == '$') {
      out.push_back('$');
      i += 2;
      continue;
    }
    if (i + 1 < text.size() && text[i + 1] == '(') {
      auto close = text.find(')', i + 2);
      if (close != std::string_view::npos) {
        auto name = text.substr(i + 2, close - i - 2);
        if (is_macro_name(name)) {
          auto it = macros.find(std::string(name));
          if (it == macros.end()) {
            throw Error(Errc::UndefinedMacro, "undefined macro $(" + std::string(name) + ")");
          }
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(text[i++]);
  }
  return out;
}

}  // namespace

Recipe expand_macros(const Recipe& recipe) {
  Recipe out;
  out.macros = recipe.macros;
  std::unordered_set<std::string> targets;
  for (const auto& rule : recipe.rules) {
    Rule expanded;
    expanded.target = expand_text(rule.target, recipe.macros);
    if (trim(expanded.target).empty() || has_whitespace(expanded.target)) {
      throw Error(Errc::SyntaxError, "target '" + rule.target +
                                         "' does not expand to a single file name");
    }
    if (!targets.insert(expanded.target).second) {
      throw Error(Errc::SyntaxError, "duplicate target '" + expanded.target + "' after expansion");
    }
    for (const auto& component : rule.components) {
      for (auto& word : split_words(expand_text(component, recipe.macros))) {
        expanded.components.push_back(std::move(word));
      }
    }
    for (const auto& command : rule.commands) {
      expanded.commands.push_back(expand_text(command, recipe.macros));
    }
    out.rules.push_back(std::move(expanded));
  }
  for (const auto& name : recipe.tools.names) {
    for (auto& word : split_words(expand_text(name, recipe.macros))) {
      out.tools.names.insert(std::move(word));
    }
  }
  return out;
}

std::string render_recipe(const Recipe& recipe) {
  std::string out;
  for (const auto& [name, value] : recipe.macros) {
    out += name;
    out += " = ";
    out += value;
    out += '\n';
  }
  if (!recipe.tools.names.empty()) {
    out += "tool: ";
    out += detail::join(recipe.tools.names, " ");
    out += '\n';
  }
  for (const auto& rule : recipe.rules) {
    out += rule.target;
    out += ':';
    for (const auto& component : rule.components) {
      out += ' ';
      out += component;
    }
    out += '\n';
    for (const auto& command : rule.commands) {
      out += '\t';
      out += command;
      out += '\n';
    }
  }
  return out;
}

}  // namespace sal
