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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sal {

/// Every domain failure the toolkit reports. The enumerator name is the
/// stable prefix printed by the CLI on stderr, so never rename one.
enum class Errc {
  // recipe
  SyntaxError,
  UndefinedMacro,
  // tipo
  NoOutput,
  ClassConflict,
  // build
  UnknownTarget,
  DependencyCycle,
  MissingIngredient,
  CommandFailed,
  FileMissing,
  // system graph
  AmbiguousProducer,
  CouplingCycle,
  // line model
  ConfigError,
  TopologyCycle,
  DuplicateStation,
  SharedRoot,
  NoFinalStation,
  UnknownStation,
  UnknownPackage,
  DuplicatePackage,
  InvalidTransition,
  ReleaseNotFinal,
  ToolNotCertified,
  InputNotCertified,
  ToolMissing,
  NoTestTarget,
  StalePrimaries,
  // delivery
  NotCertified,
  NotOwner,
  NoSuchEdge,
  DigestMismatch,
  DestinationMissing,
  NameCollision,
  CertificationFailed,
  WrongStation,
  WrongPackage,
  // store
  StorageFailure,
  CorruptJournal,
  InvalidEventSequence,
  LineNotFound,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  /// For errors tied to a source or journal line; line numbers start at 1.
  Error(Errc code, std::size_t line, const std::string& message);

  Errc code() const noexcept { return code_; }
  std::string_view name() const { return errc_name(code_); }
  /// Zero when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  Errc code_;
  std::size_t line_ = 0;
};

}  // namespace sal
