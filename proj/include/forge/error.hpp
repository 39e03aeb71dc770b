// Copyright 2026 The Forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FORGE_ERROR_HPP_
#define FORGE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace forge {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kDataIntegrity = 3,
  kExternalCommand = 4,
};

/// Base class for every error raised by the library. `kind()` is a short
/// machine-readable tag ("format", "integrity", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what, ExitCode code)
      : std::runtime_error(what), kind_(std::move(kind)), code_(code) {}

  const std::string& kind() const noexcept { return kind_; }
  ExitCode exit_code() const noexcept { return code_; }

 private:
  std::string kind_;
  ExitCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error("invalid-argument", what, ExitCode::kUsage) {}
};

/// Malformed container or file layout.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error("format", what, ExitCode::kDataIntegrity) {}
};

class UnsupportedCodec : public Error {
 public:
  explicit UnsupportedCodec(const std::string& what)
      : Error("unsupported-codec", what, ExitCode::kDataIntegrity) {}
};

/// Dataset-level inconsistency: duplicate ids, missing audio, journal gaps.
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& what)
      : Error("integrity", what, ExitCode::kDataIntegrity) {}
};

class NotFound : public Error {
 public:
  explicit NotFound(const std::string& what)
      : Error("not-found", what, ExitCode::kDataIntegrity) {}
};

/// A metric whose denominator is zero (e.g. CER against an empty reference).
class UndefinedMetric : public Error {
 public:
  explicit UndefinedMetric(const std::string& what)
      : Error("undefined-metric", what, ExitCode::kFailure) {}
};

class ExternalCommandError : public Error {
 public:
  explicit ExternalCommandError(const std::string& what)
      : Error("external-command", what, ExitCode::kExternalCommand) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what)
      : Error("io", what, ExitCode::kFailure) {}
};

}  // namespace forge

#endif  // FORGE_ERROR_HPP_
