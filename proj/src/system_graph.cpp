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

#include "sal/system_graph.hpp"

#include <algorithm>

#include "sal/error.hpp"

namespace sal {

SystemGraph link_packages(const std::map<std::string, TipoList>& tipos) {
  SystemGraph graph;
  std::map<std::string, std::vector<std::string>> producers;
  for (const auto& [id, tipo] : tipos) {
    graph.nodes.insert(id);
    for (const auto& artifact : tipo.deliverables()) producers[artifact].push_back(id);
  }

  auto producer_of = [&](const std::string& artifact) -> const std::vector<std::string>* {
    auto it = producers.find(artifact);
    return it == producers.end() ? nullptr : &it->second;
  };
  auto ensure_unique = [](const std::string& artifact, const std::vector<std::string>& ids) {
    if (ids.size() > 1) {
      std::string names;
      for (const auto& id : ids) names += (names.empty() ? "" : ", ") + id;
      throw Error(Errc::AmbiguousProducer,
                  "artifact '" + artifact + "' is produced by several packages: " + names);
    }
  };

  for (const auto& [id, tipo] : tipos) {
    for (const auto& input : tipo.inputs) {
      const auto* ids = producer_of(input);
      if (ids == nullptr) {
        graph.unresolved.push_back({id, input});
        continue;
      }
      ensure_unique(input, *ids);
      if (ids->front() != id) graph.edges.push_back({ids->front(), id, input, false});
    }
    for (const auto& tool : tipo.tools) {
      const auto* ids = producer_of(tool);
      if (ids == nullptr) continue;
      ensure_unique(tool, *ids);
      if (ids->front() != id) graph.edges.push_back({ids->front(), id, tool, true});
    }
  }
  std::sort(graph.edges.begin(), graph.edges.end());
  std::sort(graph.unresolved.begin(), graph.unresolved.end());
  return graph;
}

namespace {

[[noreturn]] void report_coupling_cycle(const SystemGraph& graph,
                                        const std::set<std::string>& remaining) {
  // Each remaining node keeps an incoming edge from another remaining node,
  // so walking producers backwards must revisit a node.
  std::map<std::string, const Coupling*> incoming;
  for (const auto& e : graph.edges) {
    if (remaining.contains(e.producer) && remaining.contains(e.consumer) &&
        !incoming.contains(e.consumer)) {
      incoming[e.consumer] = &e;
    }
  }
  std::map<std::string, std::size_t> seen;
  std::vector<const Coupling*> walk;
  std::string node = *remaining.begin();
  while (!seen.contains(node)) {
    seen[node] = walk.size();
    walk.push_back(incoming.at(node));
    node = walk.back()->producer;
  }
  std::vector<const Coupling*> cycle(walk.begin() + static_cast<std::ptrdiff_t>(seen[node]),
                                     walk.end());
  std::reverse(cycle.begin(), cycle.end());
  std::string message = "coupling cycle:";
  for (const auto* e : cycle) message += " " + e->producer + " -[" + e->artifact + "]->";
  message += " " + cycle.front()->producer;
  throw Error(Errc::CouplingCycle, message);
}

}  // namespace

BuildOrder build_order(const SystemGraph& graph) {
  std::map<std::string, std::size_t> indegree;
  std::map<std::string, std::set<std::string>> successors;
  for (const auto& id : graph.nodes) indegree[id] = 0;
  for (const auto& e : graph.edges) {
    if (successors[e.producer].insert(e.consumer).second) ++indegree[e.consumer];
  }

  std::set<std::string> ready;
  for (const auto& [id, degree] : indegree) {
    if (degree == 0) ready.insert(id);
  }
  BuildOrder order;
  while (!ready.empty()) {
    auto id = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(id);
    for (const auto& next : successors[id]) {
      if (--indegree[next] == 0) ready.insert(next);
    }
  }
  if (order.size() != graph.nodes.size()) {
    std::set<std::string> remaining;
    for (const auto& [id, degree] : indegree) {
      if (degree > 0) remaining.insert(id);
    }
    report_coupling_cycle(graph, remaining);
  }
  return order;
}

std::vector<std::string> report_hidden_dependencies(const SystemGraph& graph,
                                                    const Registry& registry) {
  std::vector<std::string> warnings;
  for (const auto& u : graph.unresolved) {
    if (!registry.contains(u.artifact)) {
      warnings.push_back("hidden dependency: package '" + u.package + "' uses input '" +
                         u.artifact + "' that no package produces and nothing registers");
    }
  }
  return warnings;
}

std::string emit_system_structure(const std::map<std::string, TipoList>& tipos,
                                  const SystemGraph& graph) {
  std::string doc = "# system structure\n";
  if (tipos.empty() && graph.nodes.empty()) return doc;

  doc += "packages: " + std::to_string(graph.nodes.size()) + "\n";
  for (const auto& [id, tipo] : tipos) {
    doc += "\n## package " + id + "\n";
    doc += render_tipo(tipo);
  }

  doc += "\n## edges\n";
  for (const auto& e : graph.edges) {
    doc += e.producer + " -> " + e.consumer + " [" + e.artifact + "]";
    if (e.tool_edge) doc += " tool-edge";
    doc += "\n";
  }

  doc += "\n## unresolved\n";
  for (const auto& u : graph.unresolved) doc += u.package + ": " + u.artifact + "\n";

  doc += "\n## dot\ndigraph system {\n";
  for (const auto& id : graph.nodes) doc += "  \"" + id + "\";\n";
  for (const auto& e : graph.edges) {
    doc += "  \"" + e.producer + "\" -> \"" + e.consumer + "\" [label=\"" + e.artifact + "\"";
    if (e.tool_edge) doc += ", style=dashed";
    doc += "];\n";
  }
  doc += "}\n";
  return doc;
}

}  // namespace sal
