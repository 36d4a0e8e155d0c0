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

#include <gtest/gtest.h>

#include <random>

#include "sal/error.hpp"
#include "sal/recipe.hpp"

namespace sal {
namespace {

Errc error_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::LineNotFound;
}

std::size_t error_line(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.line();
  }
  return 0;
}

TEST(ParseRecipe, SingleRuleFromMakeEntry) {
  auto r = parse_recipe("programA: iodefs mainA\n\tcc mainA -o programA\n");
  ASSERT_EQ(r.rules.size(), 1u);
  EXPECT_EQ(r.rules[0], (Rule{"programA", {"iodefs", "mainA"}, {"cc mainA -o programA"}}));
  EXPECT_TRUE(r.macros.empty());
}

TEST(ParseRecipe, EmptyInputHasNoRules) {
  auto r = parse_recipe("");
  EXPECT_TRUE(r.rules.empty());
}

TEST(ParseRecipe, CommandBeforeRuleIsLineOne) {
  auto parse = [] { parse_recipe("\tcc mainA\n"); };
  EXPECT_EQ(error_of(parse), Errc::SyntaxError);
  EXPECT_EQ(error_line(parse), 1u);
}

TEST(ParseRecipe, CommentsBlankLinesMacrosAndTools) {
  auto r = parse_recipe(
      "# package A\n"
      "CC = cc\n"
      "\n"
      "tool: lint ld\n"
      "programA: iodefs mainA\n"
      "# still in the rule\n"
      "\t$(CC) mainA -o programA\n"
      "\tlint programA\n");
  EXPECT_EQ(r.macros.at("CC"), "cc");
  EXPECT_EQ(r.tools.names, (std::set<std::string>{"ld", "lint"}));
  ASSERT_EQ(r.rules.size(), 1u);
  EXPECT_EQ(r.rules[0].commands,
            (std::vector<std::string>{"$(CC) mainA -o programA", "lint programA"}));
}

TEST(ParseRecipe, NoTrailingNewlineAndCrlf) {
  auto a = parse_recipe("x: y\n\tgen y");
  auto b = parse_recipe("x: y\r\n\tgen y\r\n");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rules[0].commands[0], "gen y");
}

TEST(ParseRecipe, PureDependencyRule) {
  auto r = parse_recipe("all: a b\na:\n\tgen a\nb:\n\tgen b\n");
  ASSERT_EQ(r.rules.size(), 3u);
  EXPECT_TRUE(r.rules[0].commands.empty());
  EXPECT_TRUE(r.rules[1].components.empty());
}

TEST(ParseRecipe, Errors) {
  EXPECT_EQ(error_of([] { parse_recipe("a: b\njust words\n"); }), Errc::SyntaxError);
  EXPECT_EQ(error_line([] { parse_recipe("a: b\njust words\n"); }), 2u);
  EXPECT_EQ(error_line([] { parse_recipe("a: b\n\tx\n\na: c\n"); }), 4u);
  EXPECT_EQ(error_of([] { parse_recipe("a b: c\n"); }), Errc::SyntaxError);
  EXPECT_EQ(error_of([] { parse_recipe(": c\n"); }), Errc::SyntaxError);
  EXPECT_EQ(error_of([] { parse_recipe("1X = y\n"); }), Errc::SyntaxError);
  EXPECT_EQ(error_of([] { parse_recipe("X = 1\nX = 2\n"); }), Errc::SyntaxError);
  EXPECT_EQ(error_of([] { parse_recipe("a:: b\n"); }), Errc::SyntaxError);
  EXPECT_EQ(error_line([] { parse_recipe("a: b\n\tok\nc: \xff\n"); }), 3u);
}

TEST(ParseRecipe, MacroLineEndsRuleContext) {
  EXPECT_EQ(error_of([] { parse_recipe("a: b\nX = 1\n\tgen\n"); }), Errc::SyntaxError);
}

TEST(ExpandMacros, DirectSubstitution) {
  auto r = expand_macros(parse_recipe("CC = cc\nprogramA: mainA\n\t$(CC) mainA -o programA\n"));
  EXPECT_EQ(r.rules[0].commands[0], "cc mainA -o programA");
}

TEST(ExpandMacros, IdentityWithoutReferences) {
  auto r = parse_recipe("X = unused\nprogramA: mainA\n\tcc mainA -o programA\n");
  EXPECT_EQ(expand_macros(r), r);
}

TEST(ExpandMacros, UndefinedMacro) {
  auto r = parse_recipe("prog: main.o\n\t$(LD) main.o\n");
  EXPECT_EQ(error_of([&] { expand_macros(r); }), Errc::UndefinedMacro);
}

TEST(ExpandMacros, SinglePassAndWordSplitting) {
  auto r = expand_macros(parse_recipe(
      "A = $(B)\nB = b\nOBJS = x y\nT = prog\n$(T): $(OBJS)\n\techo $(A) $$HOME\ntool: $(B)\n"));
  EXPECT_EQ(r.rules[0].target, "prog");
  EXPECT_EQ(r.rules[0].components, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(r.rules[0].commands[0], "echo $(B) $HOME");
  EXPECT_TRUE(r.tools.names.contains("b"));
}

TEST(ExpandMacros, TargetMustStayOneWord) {
  auto r = parse_recipe("T = a b\n$(T): x\n");
  EXPECT_EQ(error_of([&] { expand_macros(r); }), Errc::SyntaxError);
}

// parse(render(r)) == r over generated recipes.
TEST(RenderRecipe, RoundTripProperty) {
  std::mt19937 rng(7);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  const std::vector<std::string> words = {"a", "b.c", "lib/x.o", "$(CC)", "-o", "main", "z_1"};
  for (int iter = 0; iter < 500; ++iter) {
    Recipe r;
    for (int m = pick(3); m > 0; --m) r.macros["M" + std::to_string(pick(5))] = words[pick(7)];
    for (int t = pick(3); t > 0; --t) r.tools.names.insert("tool" + std::to_string(pick(4)));
    int rules = pick(5);
    for (int i = 0; i < rules; ++i) {
      Rule rule;
      rule.target = "t" + std::to_string(i);
      for (int c = pick(4); c > 0; --c) rule.components.push_back(words[pick(7)]);
      for (int c = pick(3); c > 0; --c) {
        rule.commands.push_back(words[pick(7)] + " " + words[pick(7)] + "  # kept");
      }
      r.rules.push_back(rule);
    }
    auto text = render_recipe(r);
    ASSERT_EQ(parse_recipe(text), r) << text;
  }
}

// Either a full Recipe or exactly one SyntaxError with a line number.
TEST(ParseRecipe, AllOrNothingOnArbitraryInput) {
  std::mt19937 rng(11);
  const std::string alphabet = "ab:=\t #\n$()x";
  for (int iter = 0; iter < 2000; ++iter) {
    std::string text;
    for (int n = static_cast<int>(rng() % 40); n > 0; --n) text += alphabet[rng() % alphabet.size()];
    try {
      auto r = parse_recipe(text);
      for (const auto& rule : r.rules) EXPECT_FALSE(rule.target.empty());
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::SyntaxError);
      EXPECT_GE(e.line(), 1u);
    }
  }
}

}  // namespace
}  // namespace sal
