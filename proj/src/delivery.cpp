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

#include "sal/delivery.hpp"

#include "sal/digest.hpp"
#include "sal/error.hpp"

namespace sal {

namespace fs = std::filesystem;

std::string_view to_string(Responsibility r) {
  return r == Responsibility::Pending ? "pending" : "transferred";
}

std::string delivered_recipe_name(const std::string& source_package) {
  return source_package + ".mk";
}

DeliveryTicket request_delivery(const LineTopology& topology, const PackageRecord& source,
                                const std::string& from, const std::string& to,
                                const std::string& actor, const std::string& created) {
  if (!topology.has_edge(from, to)) {
    throw Error(Errc::NoSuchEdge, "the line has no delivery from '" + from + "' to '" + to + "'");
  }
  const auto& destination = topology.station(to);
  if (actor != destination.owner) {
    throw Error(Errc::NotOwner, "'" + actor + "' does not own station '" + to +
                                    "'; only its owner '" + destination.owner +
                                    "' executes deliveries into it");
  }
  if (source.station != from) {
    throw Error(Errc::NotCertified, "package '" + source.package + "' is at station '" +
                                        source.station + "', not '" + from + "'");
  }
  if (source.state != PackageState::Certified) {
    throw Error(Errc::NotCertified, "package '" + source.package + "' is " +
                                        std::string(to_string(source.state)) + " at '" + from +
                                        "'; only certified packages move");
  }
  return DeliveryTicket{source.package, from, to, actor, created};
}

DeliveryRecord execute_delivery(const DeliveryTicket& ticket, const std::string& destination,
                                const DeliverySite& site) {
  std::error_code ec;
  auto dest_recipe_path = site.destination_root / kRecipeFile;
  if (!fs::is_directory(site.destination_root, ec) || !fs::is_regular_file(dest_recipe_path, ec)) {
    throw Error(Errc::DestinationMissing, "destination package '" + destination +
                                              "' has no recipe at " +
                                              site.destination_root.string());
  }
  auto dest_recipe = expand_macros(parse_recipe(read_file(dest_recipe_path)));
  std::set<std::string> dest_components;
  for (const auto& rule : dest_recipe.rules) {
    dest_components.insert(rule.components.begin(), rule.components.end());
  }

  // destination name -> source name
  std::map<std::string, std::string> moves;
  for (const auto& name : site.source_tipo.primaries) {
    if (name == kRecipeFile) continue;
    moves.emplace(name, name);
  }
  auto recipe_copy = delivered_recipe_name(ticket.package);
  if (dest_components.contains(recipe_copy)) moves.emplace(recipe_copy, std::string(kRecipeFile));

  std::set<std::string> source_names;
  for (const auto& [dest, src] : moves) source_names.insert(src);
  auto before = fingerprint_tree(site.source_root, source_names);

  for (const auto& [dest, src] : moves) {
    auto owner = site.delivered_by.find(dest);
    if (owner != site.delivered_by.end()) {
      if (owner->second != ticket.package) {
        throw Error(Errc::NameCollision, "'" + dest + "' was already delivered into '" +
                                             destination + "' by '" + owner->second + "'");
      }
      continue;
    }
    if (dest == kRecipeFile || dest_recipe.has_target(dest)) {
      throw Error(Errc::NameCollision, "'" + dest + "' clashes with destination '" + destination +
                                           "' recipe");
    }
    auto existing = site.destination_root / dest;
    if (fs::exists(existing, ec) &&
        !(fs::is_regular_file(existing, ec) && digest_file(existing) == before.at(src))) {
      throw Error(Errc::NameCollision, "'" + dest + "' already exists in '" + destination + "'");
    }
  }

  DeliveryRecord record;
  record.ticket = ticket;
  record.destination = destination;
  record.pending_owner = site.source_owner;
  for (const auto& [dest, src] : moves) {
    auto target = site.destination_root / dest;
    fs::create_directories(target.parent_path());
    write_file_atomic(target, read_file(site.source_root / src));
    auto copied = digest_file(target);
    if (copied != before.at(src)) {
      throw Error(Errc::DigestMismatch, "copy of '" + src + "' into '" + destination +
                                            "' does not match its source");
    }
    record.moved.emplace(dest, copied);
  }

  auto after = fingerprint_tree(site.source_root, source_names);
  if (after != before) {
    throw Error(Errc::DigestMismatch, "source package '" + ticket.package +
                                          "' changed while it was being delivered");
  }
  return record;
}

DeliveryRecord transfer_responsibility(const DeliveryRecord& record,
                                       const CertificationRecord& certification) {
  if (!certification.pass) {
    throw Error(Errc::CertificationFailed, "certification of '" + certification.package +
                                               "' failed; responsibility stays with '" +
                                               record.pending_owner + "'");
  }
  if (certification.station != record.ticket.to) {
    throw Error(Errc::WrongStation, "certification ran at '" + certification.station +
                                        "', delivery landed at '" + record.ticket.to + "'");
  }
  if (certification.package != record.destination) {
    throw Error(Errc::WrongPackage, "certification covers '" + certification.package +
                                        "', delivery landed in '" + record.destination + "'");
  }
  auto next = record;
  next.responsibility = Responsibility::Transferred;
  return next;
}

}  // namespace sal
