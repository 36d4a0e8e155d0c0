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

#include "sal/error.hpp"

namespace sal {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UndefinedMacro: return "UndefinedMacro";
    case Errc::NoOutput: return "NoOutput";
    case Errc::ClassConflict: return "ClassConflict";
    case Errc::UnknownTarget: return "UnknownTarget";
    case Errc::DependencyCycle: return "DependencyCycle";
    case Errc::MissingIngredient: return "MissingIngredient";
    case Errc::CommandFailed: return "CommandFailed";
    case Errc::FileMissing: return "FileMissing";
    case Errc::AmbiguousProducer: return "AmbiguousProducer";
    case Errc::CouplingCycle: return "CouplingCycle";
    case Errc::ConfigError: return "ConfigError";
    case Errc::TopologyCycle: return "TopologyCycle";
    case Errc::DuplicateStation: return "DuplicateStation";
    case Errc::SharedRoot: return "SharedRoot";
    case Errc::NoFinalStation: return "NoFinalStation";
    case Errc::UnknownStation: return "UnknownStation";
    case Errc::UnknownPackage: return "UnknownPackage";
    case Errc::DuplicatePackage: return "DuplicatePackage";
    case Errc::InvalidTransition: return "InvalidTransition";
    case Errc::ReleaseNotFinal: return "ReleaseNotFinal";
    case Errc::ToolNotCertified: return "ToolNotCertified";
    case Errc::InputNotCertified: return "InputNotCertified";
    case Errc::ToolMissing: return "ToolMissing";
    case Errc::NoTestTarget: return "NoTestTarget";
    case Errc::StalePrimaries: return "StalePrimaries";
    case Errc::NotCertified: return "NotCertified";
    case Errc::NotOwner: return "NotOwner";
    case Errc::NoSuchEdge: return "NoSuchEdge";
    case Errc::DigestMismatch: return "DigestMismatch";
    case Errc::DestinationMissing: return "DestinationMissing";
    case Errc::NameCollision: return "NameCollision";
    case Errc::CertificationFailed: return "CertificationFailed";
    case Errc::WrongStation: return "WrongStation";
    case Errc::WrongPackage: return "WrongPackage";
    case Errc::StorageFailure: return "StorageFailure";
    case Errc::CorruptJournal: return "CorruptJournal";
    case Errc::InvalidEventSequence: return "InvalidEventSequence";
    case Errc::LineNotFound: return "LineNotFound";
  }
  return "Error";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

Error::Error(Errc code, std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      code_(code),
      line_(line) {}

}  // namespace sal
