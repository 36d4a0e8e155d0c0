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
#include <vector>

#include "sal/tipo.hpp"

namespace sal {

/// `producer` builds `artifact`; `consumer` uses it as an input, or as a
/// tool when `tool_edge` is set.
struct Coupling {
  std::string producer;
  std::string consumer;
  std::string artifact;
  bool tool_edge = false;

  friend auto operator<=>(const Coupling&, const Coupling&) = default;
};

struct UnresolvedInput {
  std::string package;
  std::string artifact;

  friend auto operator<=>(const UnresolvedInput&, const UnresolvedInput&) = default;
};

struct SystemGraph {
  std::set<std::string> nodes;
  std::vector<Coupling> edges;             // sorted
  std::vector<UnresolvedInput> unresolved;  // sorted

  friend bool operator==(const SystemGraph&, const SystemGraph&) = default;
};

/// Released or externally registered artifacts: name -> location.
using Registry = std::map<std::string, std::string>;

/// Package ids in dependency order.
using BuildOrder = std::vector<std::string>;

/// Couples packages by exact artifact name: an edge (P, Q, a) exists iff a
/// is a deliverable output of P and an input or tool of Q. Inputs nobody
/// produces are listed as unresolved. Throws AmbiguousProducer when two
/// packages deliver an artifact someone consumes.
SystemGraph link_packages(const std::map<std::string, TipoList>& tipos);

/// Topological order with lexicographic tie-breaking. Throws CouplingCycle
/// naming the packages and artifacts of one cycle.
BuildOrder build_order(const SystemGraph& graph);

/// One warning per unresolved input that the registry does not know.
std::vector<std::string> report_hidden_dependencies(const SystemGraph& graph,
                                                    const Registry& registry);

/// Deterministic structure document: tipo blocks, coupling edges,
/// unresolved inputs and a dot rendering of the graph.
std::string emit_system_structure(const std::map<std::string, TipoList>& tipos,
                                  const SystemGraph& graph);

}  // namespace sal
