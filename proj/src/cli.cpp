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

#include "sal/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>

#include "sal/digest.hpp"
#include "sal/error.hpp"

namespace sal {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path find_line_root(const fs::path& start) {
  for (auto dir = fs::absolute(start); ; dir = dir.parent_path()) {
    std::error_code ec;
    if (fs::is_directory(sal_dir(dir), ec)) return dir;
    if (dir == dir.root_path() || dir.parent_path() == dir) break;
  }
  throw Error(Errc::LineNotFound, "no assembly line found from " + start.string() +
                                      "; pass --line or set SAL_LINE");
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string event_summary(const Event& e) {
  const auto& p = e.payload;
  auto get = [&](const char* key) -> std::string {
    return p.contains(key) && p[key].is_string() ? p[key].get<std::string>() : std::string();
  };
  switch (e.kind) {
    case EventKind::Register:
      if (get("what") == "package") return "package " + get("package") + " at " + get("station");
      if (get("what") == "artifact") return "artifact " + get("artifact") + " -> " + get("location");
      return "line";
    case EventKind::Build:
      return get("package") + " " + get("outcome") + " (" +
             std::to_string(p.value("executed", nlohmann::json::array()).size()) + " rebuilt)";
    case EventKind::Transition:
      return get("package") + " " + get("from") + " --" + get("event") + "--> " + get("to");
    case EventKind::Certify: {
      const auto& c = p.at("certification");
      return c.value("package", "") + " at " + c.value("station", "") + ": " +
             c.value("result", "");
    }
    case EventKind::Deliver:
      if (get("phase") == "request") {
        const auto& t = p.at("ticket");
        return "request " + t.value("package", "") + " " + t.value("from", "") + " -> " +
               t.value("to", "");
      }
      if (get("phase") == "execute") {
        const auto& r = p.at("record");
        return "execute " + r.at("ticket").value("package", "") + " into " +
               r.value("destination", "") + " (" + std::to_string(r.at("moved").size()) +
               " files)";
      }
      return "transfer delivery #" + std::to_string(p.value("delivery", 0));
    case EventKind::Release:
      return get("package") + " at " + get("station");
  }
  return "";
}

bool mentions(const Event& e, const std::string& package) {
  const auto& p = e.payload;
  auto is = [&](const nlohmann::json& j, const char* key) {
    return j.contains(key) && j[key].is_string() && j[key].get<std::string>() == package;
  };
  if (is(p, "package")) return true;
  if (p.contains("certification") && p["certification"].is_object() &&
      is(p["certification"], "package")) {
    return true;
  }
  if (p.contains("ticket") && is(p["ticket"], "package")) return true;
  if (p.contains("record") && (is(p["record"], "destination") || is(p["record"]["ticket"], "package"))) {
    return true;
  }
  return false;
}

}  // namespace

CliEnvironment environment_from_process() {
  CliEnvironment env;
  env.cwd = fs::current_path();
  if (const char* owner = std::getenv("SAL_OWNER"); owner && *owner) env.owner = owner;
  if (const char* line = std::getenv("SAL_LINE"); line && *line) env.line = line;
  return env;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const CliEnvironment& env) {
  CLI::App app{"sal - software assembly line", "sal"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string line_opt;
  app.add_option("--line", line_opt, "Line root (default: $SAL_LINE or nearest ancestor with .sal/)");

  std::string actor_opt;
  auto add_actor = [&](CLI::App* sub) {
    sub->add_option("--as", actor_opt, "Acting identity (default: $SAL_OWNER)");
  };

  auto* init = app.add_subcommand("init", "Create the line described by line.json");
  add_actor(init);

  std::string station, package, target;
  auto* add_package = app.add_subcommand("add-package", "Register a package at a station");
  add_package->add_option("station", station)->required();
  add_package->add_option("package", package)->required();
  add_actor(add_package);

  auto* tipo_cmd = app.add_subcommand("tipo", "Print a package's tipo list");
  tipo_cmd->add_option("package", package)->required();

  auto* build_cmd = app.add_subcommand("build", "Build a package incrementally");
  build_cmd->add_option("package", package)->required();
  build_cmd->add_option("target", target);
  add_actor(build_cmd);

  auto* certify_cmd = app.add_subcommand("certify", "Run a package's test target and certify it");
  certify_cmd->add_option("package", package)->required();
  add_actor(certify_cmd);

  std::string from, to, into;
  auto* deliver_cmd = app.add_subcommand("deliver", "Deliver a certified package's primaries");
  deliver_cmd->add_option("package", package)->required();
  deliver_cmd->add_option("--from", from)->required();
  deliver_cmd->add_option("--to", to)->required();
  deliver_cmd->add_option("--into", into)->required();
  add_actor(deliver_cmd);

  auto* release_cmd = app.add_subcommand("release", "Release a certified package at a final station");
  release_cmd->add_option("package", package)->required();
  add_actor(release_cmd);

  std::string artifact, location;
  auto* register_cmd = app.add_subcommand("register", "Register an external deliverable");
  register_cmd->add_option("artifact", artifact)->required();
  register_cmd->add_option("location", location, "Path, relative to the line root")->required();
  add_actor(register_cmd);

  std::string graph_out;
  auto* graph_cmd = app.add_subcommand("graph", "Write the system structure document");
  graph_cmd->add_option("-o,--output", graph_out);

  auto* status_cmd = app.add_subcommand("status", "Per-station package states");

  std::string log_pkg;
  auto* log_cmd = app.add_subcommand("log", "Show the journal");
  log_cmd->add_option("--pkg", log_pkg);

  bool rebuild = false;
  auto* fsck_cmd = app.add_subcommand("fsck", "Check the journal and the state cache");
  fsck_cmd->add_flag("--rebuild", rebuild, "Repair an interrupted append and rewrite the cache");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }

  auto actor = [&](bool required) -> std::string {
    if (!actor_opt.empty()) return actor_opt;
    if (env.owner) return *env.owner;
    if (required) throw UsageError("this command needs an identity: pass --as or set SAL_OWNER");
    return "unknown";
  };
  auto line_root = [&](bool for_init) -> fs::path {
    auto resolve = [&](const std::string& p) {
      fs::path path(p);
      return path.is_relative() ? env.cwd / path : path;
    };
    if (!line_opt.empty()) return resolve(line_opt);
    if (env.line) return resolve(*env.line);
    return for_init ? env.cwd : find_line_root(env.cwd);
  };

  try {
    if (init->parsed()) {
      auto line = AssemblyLine::init(line_root(true), actor(false), env.options);
      out << "initialized line at " << line.root().string() << " ("
          << line.state().topology.stations().size() << " stations)\n";
      return 0;
    }

    AssemblyLine line(line_root(false), env.options);

    if (add_package->parsed()) {
      line.add_package(station, package, actor(false));
      out << "added " << package << " at " << station << "\n";
    } else if (tipo_cmd->parsed()) {
      out << render_tipo(line.tipo(package));
    } else if (build_cmd->parsed()) {
      auto who = actor(false);
      std::optional<std::string> goal;
      if (!target.empty()) goal = target;
      try {
        auto result = line.build(package, goal, who);
        for (const auto& entry : result.log) {
          out << "  " << entry.command << "\n" << entry.output;
        }
        if (result.executed.empty()) {
          out << package << " is up to date\n";
        } else {
          out << "built " << package << ": " << result.executed.size() << " target(s)\n";
        }
      } catch (const Error& e) {
        if (e.code() != Errc::CommandFailed) throw;
        err << e.name() << ": " << e.what() << "\n";
        return 1;
      }
    } else if (certify_cmd->parsed()) {
      auto cert = line.certify(package, actor(true));
      for (const auto& o : cert.outcomes) out << "  [" << o.exit_status << "] " << o.command << "\n";
      for (const auto& t : cert.tool_manifest) {
        out << "  tool " << t.name << " " << t.digest << " " << t.producer << "\n";
      }
      if (!cert.pass) {
        err << errc_name(Errc::CertificationFailed) << ": " << package << " failed its tests at "
            << cert.station << "\n";
        return 1;
      }
      out << "certified " << package << " at " << cert.station << "\n";
    } else if (deliver_cmd->parsed()) {
      auto record = line.deliver(package, from, to, into, actor(true));
      for (const auto& [name, digest] : record.moved) out << "  " << digest << " " << name << "\n";
      out << "delivered " << package << " from " << from << " to " << to << " into " << into
          << " (responsibility pending)\n";
    } else if (release_cmd->parsed()) {
      line.release(package, actor(true));
      out << "released " << package << "\n";
    } else if (register_cmd->parsed()) {
      line.register_artifact(artifact, location, actor(false));
      out << "registered " << artifact << " -> " << location << "\n";
    } else if (graph_cmd->parsed()) {
      std::vector<std::string> warnings;
      auto doc = line.structure(&warnings);
      if (graph_out.empty()) {
        out << doc;
      } else {
        fs::path dest(graph_out);
        if (dest.is_relative()) dest = env.cwd / dest;
        write_file_atomic(dest, doc);
        out << "wrote " << dest.string() << "\n";
      }
      for (const auto& w : warnings) err << "warning: " << w << "\n";
    } else if (status_cmd->parsed()) {
      auto state = line.state();
      out << pad("STATION", 14) << pad("PACKAGE", 16) << pad("STATE", 12) << "RESPONSIBLE\n";
      std::vector<const PackageRecord*> rows;
      for (const auto& [id, r] : state.packages) rows.push_back(&r);
      std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
        return std::tie(a->station, a->package) < std::tie(b->station, b->package);
      });
      for (const auto* r : rows) {
        out << pad(r->station, 14) << pad(r->package, 16)
            << pad(std::string(to_string(r->state)), 12) << r->responsible << "\n";
      }
    } else if (log_cmd->parsed()) {
      for (const auto& e : read_journal(journal_path(line.root()), TornTail::Ignore)) {
        if (!log_pkg.empty() && !mentions(e, log_pkg)) continue;
        out << std::setw(5) << e.sequence << "  " << e.timestamp << "  " << pad(e.actor, 10)
            << pad(std::string(to_string(e.kind)), 11) << event_summary(e) << "\n";
      }
    } else if (fsck_cmd->parsed()) {
      auto report = line.fsck(rebuild);
      out << report.events << " events replayed\n";
      if (report.torn_tail) {
        out << (report.repaired_tail ? "removed an interrupted append\n"
                                     : "journal ends in an interrupted append\n");
      }
      out << (report.cache_matches ? "state cache matches the journal\n"
                                   : report.cache_rebuilt ? "state cache rebuilt\n"
                                                          : "state cache is stale\n");
      if (!rebuild && (!report.cache_matches || report.torn_tail)) {
        err << errc_name(Errc::CorruptJournal) << ": run `sal fsck --rebuild`\n";
        return 1;
      }
    }
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << e.name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sal
