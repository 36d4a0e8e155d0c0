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

#include <sys/wait.h>

#include <sstream>

#include "fixtures.hpp"
#include "sal/cli.hpp"
#include "sal/store.hpp"

namespace sal {
namespace {

using testing::TempDir;
using testing::slurp;
using testing::write;
namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    write(dir_ / "line.json", testing::kTwoBenchConfig);
    testing::install_stub_tools(dir_ / "tools");
    env_.cwd = dir_.path();
    env_.options = testing::test_options();
  }

  Outcome cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err, env_);
    return {code, out.str(), err.str()};
  }

  std::uint64_t events() {
    return read_journal(journal_path(dir_.path()), TornTail::Ignore).size();
  }

  void populate() {
    ASSERT_EQ(cli({"init"}).code, 0);
    ASSERT_EQ(cli({"add-package", "wb1", "pkgA"}).code, 0);
    ASSERT_EQ(cli({"add-package", "int1", "pkg3"}).code, 0);
    write(dir_ / "wb1/pkgA/recipe.mk",
          "programA: iodefs mainA\n\tstubcc mainA -o programA\ntest: programA\n\tcheck programA\n");
    write(dir_ / "wb1/pkgA/mainA", testing::kMainA);
    write(dir_ / "int1/pkg3/recipe.mk", "out: mainA\n\tstubcc mainA -o out\n");
    write(dir_ / "shared/iodefs", "#define N 1\n");
    ASSERT_EQ(cli({"register", "iodefs", "shared/iodefs"}).code, 0);
  }

  TempDir dir_;
  CliEnvironment env_;
};

TEST_F(CliTest, TipoPrintsFourLines) {
  populate();
  auto r = cli({"tipo", "pkgA"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "TOOL = check stubcc\n"
            "INPUT = iodefs\n"
            "PRIMARY = mainA recipe.mk\n"
            "OUTPUT = programA test\n");
}

TEST_F(CliTest, NonOwnerDeliveryIsRefused) {
  populate();
  auto r = cli({"deliver", "pkgA", "--from", "wb1", "--to", "int1", "--into", "pkg3", "--as", "bob"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("NotOwner", 0), 0u) << r.err;
}

TEST_F(CliTest, UsageErrors) {
  auto r = cli({"bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(cli({"tipo"}).code, 2);
  EXPECT_EQ(cli({"build", "x", "--nope"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
  populate();
  // certify without an identity
  EXPECT_EQ(cli({"certify", "pkgA"}).code, 2);
}

TEST_F(CliTest, DomainErrorsExitOne) {
  auto r = cli({"status"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("LineNotFound", 0), 0u) << r.err;
  populate();
  r = cli({"tipo", "ghost"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("UnknownPackage", 0), 0u) << r.err;
}

TEST_F(CliTest, ReadOnlyCommandsAppendNothingMutatingOnesAppend) {
  populate();
  auto count = events();
  for (std::vector<std::string> args :
       {std::vector<std::string>{"tipo", "pkgA"}, {"status"}, {"log"}, {"log", "--pkg", "pkgA"},
        {"graph"}, {"fsck"}}) {
    auto r = cli(args);
    EXPECT_EQ(r.code, 0) << args[0] << ": " << r.err;
    EXPECT_EQ(events(), count) << args[0];
  }
  auto step = [&](std::vector<std::string> args) {
    auto before = events();
    auto r = cli(args);
    EXPECT_EQ(r.code, 0) << args[0] << ": " << r.err;
    EXPECT_GT(events(), before) << args[0];
  };
  step({"build", "pkgA"});
  step({"register", "libc", "shared/libc"});
  env_.owner = "alice";
  step({"certify", "pkgA"});
  step({"deliver", "pkgA", "--from", "wb1", "--to", "int1", "--into", "pkg3", "--as", "carol"});
  step({"build", "pkg3"});
}

TEST_F(CliTest, StatusAndLogAreDeterministic) {
  populate();
  cli({"build", "pkgA"});
  auto a = cli({"status"});
  auto b = cli({"status"});
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("pkgA"), std::string::npos);
  EXPECT_NE(a.out.find("Built"), std::string::npos);
  EXPECT_EQ(cli({"graph"}).out, cli({"graph"}).out);
  auto log = cli({"log", "--pkg", "pkgA"}).out;
  EXPECT_NE(log.find("BuildOk"), std::string::npos) << log;
  EXPECT_EQ(log.find("pkg3"), std::string::npos) << log;
}

TEST_F(CliTest, GraphToFileAndLineDiscovery) {
  populate();
  fs::create_directories(dir_ / "wb1/pkgA/sub");
  env_.cwd = dir_ / "wb1/pkgA/sub";
  auto r = cli({"graph", "-o", (dir_ / "structure.txt").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(dir_ / "structure.txt").find("## package pkgA"), std::string::npos);

  env_.cwd = fs::temp_directory_path();
  EXPECT_EQ(cli({"status", "--line", dir_.path().string()}).code, 0);
  env_.line = dir_.path().string();
  EXPECT_EQ(cli({"status"}).code, 0);
}

TEST_F(CliTest, FsckReportsCacheDrift) {
  populate();
  EXPECT_EQ(cli({"fsck"}).code, 0);
  write(cache_path(dir_.path()), "stale");
  EXPECT_EQ(cli({"fsck"}).code, 1);
  EXPECT_EQ(cli({"fsck", "--rebuild"}).code, 0);
  EXPECT_EQ(cli({"fsck"}).code, 0);
}

TEST(CliBinary, UnknownSubcommandExitsTwo) {
  std::string cmd = std::string("'") + SAL_BINARY + "' bogus >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
}

}  // namespace
}  // namespace sal
