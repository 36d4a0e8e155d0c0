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

#include "fixtures.hpp"
#include "sal/error.hpp"
#include "sal/line_model.hpp"

namespace sal {
namespace {

using testing::TempDir;
using testing::write;

Errc error_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::LineNotFound;
}

std::string station(const std::string& id, const std::string& root,
                    const std::string& downstream = "") {
  return R"({"id": ")" + id + R"(", "owner": "o-)" + id + R"(", "root": ")" + root +
         R"(", "downstream": [)" + downstream + "]}";
}

std::string config(const std::vector<std::string>& stations) {
  std::string out = R"({"stations": [)";
  for (std::size_t i = 0; i < stations.size(); ++i) out += (i ? ", " : "") + stations[i];
  return out + "]}";
}

TEST(LoadTopology, FourWorkbenchesTwoIntegrationsOneFinal) {
  auto t = load_topology(config({
      station("wb1", "wb/1", R"("i1")"), station("wb2", "wb/2", R"("i1")"),
      station("wb3", "wb/3", R"("i2")"), station("wb4", "wb/4", R"("i2")"),
      station("i1", "int/1", R"("final")"), station("i2", "int/2", R"("final")"),
      station("final", "release")}));
  EXPECT_EQ(t.entry_stations(), (std::set<std::string>{"wb1", "wb2", "wb3", "wb4"}));
  EXPECT_EQ(t.final_stations(), std::set<std::string>{"final"});
  EXPECT_TRUE(t.has_edge("wb3", "i2"));
  EXPECT_FALSE(t.has_edge("wb3", "i1"));
  EXPECT_TRUE(t.has_owner("o-i1"));
  EXPECT_EQ(t.station("i1").root, "int/1");
  EXPECT_EQ(error_of([&] { t.station("nope"); }), Errc::UnknownStation);
}

TEST(LoadTopology, SingleStationIsEntryAndFinal) {
  auto t = load_topology(config({station("solo", "solo")}));
  EXPECT_EQ(t.entry_stations(), std::set<std::string>{"solo"});
  EXPECT_EQ(t.final_stations(), std::set<std::string>{"solo"});
  EXPECT_TRUE(t.tool_path().empty());
}

TEST(LoadTopology, Rejections) {
  EXPECT_EQ(error_of([] { load_topology(config({station("a", "a", R"("b")"), station("b", "b", R"("a")")})); }),
            Errc::TopologyCycle);
  EXPECT_EQ(error_of([] {
              load_topology(config({station("a", "a", R"("b")"), station("b", "b", R"("c")"),
                                    station("c", "c", R"("b")"), station("d", "d")}));
            }),
            Errc::TopologyCycle);
  EXPECT_EQ(error_of([] { load_topology(config({station("a", "x"), station("a", "y")})); }),
            Errc::DuplicateStation);
  EXPECT_EQ(error_of([] { load_topology(config({station("a", "x"), station("b", "x/")})); }),
            Errc::SharedRoot);
  EXPECT_EQ(error_of([] { load_topology(config({station("a", "x"), station("b", "x/y")})); }),
            Errc::SharedRoot);
  EXPECT_EQ(error_of([] { load_topology(config({station("a", ".")})); }), Errc::SharedRoot);
  EXPECT_EQ(error_of([] { load_topology(config({station("a", "a", R"("ghost")")})); }),
            Errc::ConfigError);
  EXPECT_EQ(error_of([] { load_topology(config({})); }), Errc::NoFinalStation);
  EXPECT_EQ(error_of([] { load_topology("{"); }), Errc::ConfigError);
  EXPECT_EQ(error_of([] { load_topology(R"({"stations": [{"id": "a", "root": "a"}]})"); }),
            Errc::ConfigError);
  EXPECT_EQ(error_of([] { load_topology(R"({"tool_path": "x", "stations": []})"); }),
            Errc::ConfigError);
  // Sibling names sharing a prefix are not nested.
  EXPECT_NO_THROW(load_topology(config({station("a", "wb1"), station("b", "wb10")})));
}

class TransitionTable : public ::testing::Test {
 protected:
  LineTopology topo = load_topology(config({station("wb", "wb", R"("fin")"), station("fin", "fin")}));
};

TEST_F(TransitionTable, EveryStateEventPair) {
  using S = PackageState;
  using E = LifecycleEvent;
  struct Row {
    S from;
    E event;
    std::optional<S> to;  // nullopt: rejected
  };
  const std::vector<Row> rows = {
      {S::Development, E::Edit, S::Development},  {S::Development, E::BuildOk, S::Built},
      {S::Development, E::BuildFail, S::Development}, {S::Development, E::CertOk, {}},
      {S::Development, E::CertFail, {}},            {S::Development, E::Arrive, S::Development},
      {S::Development, E::Release, {}},
      {S::Built, E::Edit, S::Development},          {S::Built, E::BuildOk, {}},
      {S::Built, E::BuildFail, {}},                 {S::Built, E::CertOk, S::Certified},
      {S::Built, E::CertFail, S::Development},      {S::Built, E::Arrive, S::Development},
      {S::Built, E::Release, {}},
      {S::Certified, E::Edit, S::Development},      {S::Certified, E::BuildOk, {}},
      {S::Certified, E::BuildFail, {}},             {S::Certified, E::CertOk, {}},
      {S::Certified, E::CertFail, {}},              {S::Certified, E::Arrive, S::Development},
      {S::Certified, E::Release, S::Released},
      {S::Released, E::Edit, S::Development},       {S::Released, E::BuildOk, {}},
      {S::Released, E::BuildFail, {}},              {S::Released, E::CertOk, {}},
      {S::Released, E::CertFail, {}},               {S::Released, E::Arrive, S::Development},
      {S::Released, E::Release, {}},
  };
  for (const auto& row : rows) {
    PackageRecord r{"p", "fin", row.from, "o-fin", {}, {}};
    SCOPED_TRACE(std::string(to_string(row.from)) + " + " + std::string(to_string(row.event)));
    if (row.to) {
      auto next = transition(r, row.event, topo);
      EXPECT_EQ(next.state, *row.to);
      EXPECT_EQ(next.station, r.station);
    } else {
      EXPECT_EQ(error_of([&] { transition(r, row.event, topo); }), Errc::InvalidTransition);
    }
  }
}

TEST_F(TransitionTable, ReleaseNeedsFinalStation) {
  PackageRecord r{"p", "wb", PackageState::Certified, "o-wb", {}, {}};
  EXPECT_EQ(error_of([&] { transition(r, LifecycleEvent::Release, topo); }), Errc::ReleaseNotFinal);
}

TEST(Names, RoundTrip) {
  for (auto s : {PackageState::Development, PackageState::Built, PackageState::Certified,
                 PackageState::Released}) {
    EXPECT_EQ(parse_package_state(to_string(s)), s);
  }
  EXPECT_EQ(parse_lifecycle_event("CertFail"), LifecycleEvent::CertFail);
  EXPECT_EQ(error_of([] { parse_package_state("Deprecated"); }), Errc::ConfigError);
}

class CertifyTest : public ::testing::Test {
 protected:
  void SetUp() override {
    testing::install_stub_tools(tools_.path());
    write(pkg_ / "recipe.mk", recipe_text_);
    write(pkg_ / "mainA", testing::kMainA);
    write(pkg_ / "iodefs", "");
    env_.package_root = pkg_.path();
    env_.recipe = parse_recipe(recipe_text_);
    env_.search_path = {tools_.path()};
    env_.tools = {{"stubcc", ToolSource{tools_ / "stubcc"}}, {"check", ToolSource{tools_ / "check"}}};
    env_.timestamp = "2026-01-01T00:00:00Z";
    tipo_ = extract_tipo(env_.recipe, {"pkgA", {"recipe.mk", "mainA"}});
  }

  std::string recipe_text_ =
      "programA: iodefs mainA\n\tstubcc mainA -o programA\ntest: programA\n\tcheck programA\n";
  TempDir pkg_;
  TempDir tools_;
  CertificationEnv env_;
  TipoList tipo_;
  PackageRecord record_{"pkgA", "wb1", PackageState::Built, "alice", {}, {}};
  ShellRunner runner_;
};

TEST_F(CertifyTest, PassPinsExternalToolDigests) {
  auto expected = testing::sha256sum(tools_ / "stubcc");
  auto cert = certify(record_, tipo_, env_, runner_);
  EXPECT_TRUE(cert.pass);
  EXPECT_EQ(cert.package, "pkgA");
  EXPECT_EQ(cert.station, "wb1");
  ASSERT_EQ(cert.tool_manifest.size(), 2u);
  EXPECT_EQ(cert.tool_manifest[1],
            (ToolManifestEntry{"stubcc", (tools_ / "stubcc").string(), expected, "external"}));
  ASSERT_EQ(cert.outcomes.size(), 2u);
  EXPECT_EQ(cert.outcomes[1], (TestOutcome{"check programA", 0}));
}

TEST_F(CertifyTest, FailingTestIsRecordedNotThrown) {
  write(tools_ / "check", "#!/bin/sh\nexit 4\n");
  auto cert = certify(record_, tipo_, env_, runner_);
  EXPECT_FALSE(cert.pass);
  EXPECT_EQ(cert.outcomes.back().exit_status, 4);
}

TEST_F(CertifyTest, Preconditions) {
  auto dev = record_;
  dev.state = PackageState::Development;
  EXPECT_EQ(error_of([&] { certify(dev, tipo_, env_, runner_); }), Errc::InvalidTransition);

  auto no_test = env_;
  no_test.recipe = parse_recipe("programA: iodefs mainA\n\tstubcc mainA -o programA\n");
  EXPECT_EQ(error_of([&] { certify(record_, tipo_, no_test, runner_); }), Errc::NoTestTarget);

  auto missing = env_;
  missing.tools.erase("check");
  EXPECT_EQ(error_of([&] { certify(record_, tipo_, missing, runner_); }), Errc::ToolMissing);
}

TEST_F(CertifyTest, LineProducedToolAndInputMustBeCertified) {
  auto env = env_;
  env.tools["stubcc"].producer = "compiler";
  env.package_states["compiler"] = PackageState::Built;
  try {
    certify(record_, tipo_, env, runner_);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ToolNotCertified);
    EXPECT_NE(std::string(e.what()).find("compiler"), std::string::npos);
  }
  env.package_states["compiler"] = PackageState::Released;
  EXPECT_TRUE(certify(record_, tipo_, env, runner_).pass);

  env.input_producers["iodefs"] = "headers";
  env.package_states["headers"] = PackageState::Development;
  EXPECT_EQ(error_of([&] { certify(record_, tipo_, env, runner_); }), Errc::InputNotCertified);
  env.package_states["headers"] = PackageState::Certified;
  EXPECT_TRUE(certify(record_, tipo_, env, runner_).pass);
}

}  // namespace
}  // namespace sal
