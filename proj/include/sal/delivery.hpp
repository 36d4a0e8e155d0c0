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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "sal/build.hpp"
#include "sal/line_model.hpp"
#include "sal/recipe.hpp"
#include "sal/tipo.hpp"

namespace sal {

enum class Responsibility { Pending, Transferred };

std::string_view to_string(Responsibility r);

struct DeliveryTicket {
  std::string package;
  std::string from;
  std::string to;
  std::string requested_by;
  std::string created;

  friend bool operator==(const DeliveryTicket&, const DeliveryTicket&) = default;
};

struct DeliveryRecord {
  DeliveryTicket ticket;
  /// Destination file name -> digest of every file copied.
  Fingerprints moved;
  std::string destination;
  Responsibility responsibility = Responsibility::Pending;
  /// Owner answerable for the destination until transfer.
  std::string pending_owner;

  friend bool operator==(const DeliveryRecord&, const DeliveryRecord&) = default;
};

/// Name a source recipe takes at the destination: `<package>.mk`. It is
/// only delivered when the destination recipe names it as a component.
std::string delivered_recipe_name(const std::string& source_package);

/// Pull-style gate: only the owner of `to` may request, along an existing
/// edge, for a package Certified at `from`. Checks run in that order:
/// NoSuchEdge, NotOwner, NotCertified.
DeliveryTicket request_delivery(const LineTopology& topology, const PackageRecord& source,
                                const std::string& from, const std::string& to,
                                const std::string& actor, const std::string& created);

struct DeliverySite {
  std::filesystem::path source_root;
  std::filesystem::path destination_root;
  TipoList source_tipo;
  /// Responsible owner of the source package; answers for the destination
  /// until certification there succeeds.
  std::string source_owner;
  /// Files earlier deliveries placed at the destination: name -> source id.
  std::map<std::string, std::string> delivered_by;
};

/// Copies the source's PRIMARY files (never its inputs, tools or outputs)
/// into the destination root and verifies every copy by digest. The source
/// recipe travels only as `delivered_recipe_name`, and only when listed by
/// the destination recipe.
///
/// Throws DestinationMissing (no root or no recipe.mk there), NameCollision
/// (the name belongs to another source, to the destination itself, or to a
/// destination target), DigestMismatch.
DeliveryRecord execute_delivery(const DeliveryTicket& ticket, const std::string& destination,
                                const DeliverySite& site);

/// Throws CertificationFailed, WrongStation or WrongPackage.
DeliveryRecord transfer_responsibility(const DeliveryRecord& record,
                                       const CertificationRecord& certification);

}  // namespace sal
