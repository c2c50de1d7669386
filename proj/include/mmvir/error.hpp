// Copyright 2026 The mmvir Authors
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

#include <stdexcept>
#include <string>

namespace mmvir {

/// Base of every error raised by the library. The CLI maps subclasses onto
/// process exit codes (see ExitCode).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller input: malformed files, violated preconditions, bad config.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A persisted file could not be parsed. `offset` is the byte position at
/// which parsing stopped.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : InputError(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class SchemaVersionError : public InputError {
 public:
  using InputError::InputError;
};

class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

/// A model service could not be reached, or kept failing after retries.
class GatewayError : public Error {
 public:
  using Error::Error;
};

/// Captioner output that could not be turned into records. Keeps the raw text.
class CaptionParseError : public Error {
 public:
  CaptionParseError(const std::string& what, std::string raw)
      : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

enum class ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kInput = 2,
  kGateway = 3,
};

}  // namespace mmvir
