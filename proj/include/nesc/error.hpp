// Copyright 2026 The NESC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nesc {

enum class ErrorKind {
  kInvalidArgument,
  kShapeMismatch,
  kMissingTensor,
  kBadMagic,
  kBadVersion,
  kInvalidLayers,
  kLengthMismatch,
  kChecksumMismatch,
  kDuplicateName,
  kTruncated,
  kMalformedRiff,
  kUnsupportedFormat,
  kIo,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kShapeMismatch: return "shape mismatch";
    case ErrorKind::kMissingTensor: return "missing tensor";
    case ErrorKind::kBadMagic: return "bad magic";
    case ErrorKind::kBadVersion: return "bad version";
    case ErrorKind::kInvalidLayers: return "invalid layers";
    case ErrorKind::kLengthMismatch: return "length mismatch";
    case ErrorKind::kChecksumMismatch: return "checksum mismatch";
    case ErrorKind::kDuplicateName: return "duplicate name";
    case ErrorKind::kTruncated: return "truncated";
    case ErrorKind::kMalformedRiff: return "malformed RIFF";
    case ErrorKind::kUnsupportedFormat: return "unsupported format";
    case ErrorKind::kIo: return "I/O error";
  }
  return "unknown";
}

/// Every failure raised by the library. `kind()` lets callers and tests
/// distinguish failure classes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace nesc
