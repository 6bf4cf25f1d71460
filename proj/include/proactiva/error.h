// Copyright 2026 The Proactiva Authors.
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

#ifndef PROACTIVA_ERROR_H_
#define PROACTIVA_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace proactiva {

enum class ErrorCode {
  kEmptyUtterance,
  kInvalidLevel,
  kInvalidConfig,
  kInvalidHistory,
  kScriptExhausted,
  kBackendUnavailable,
  kMalformedResponse,
  kEmptyText,
  kInvalidVector,
  kDimensionMismatch,
  kZeroVector,
  kDuplicateId,
  kEmptyStore,
  kParseError,
  kSchemaViolation,
  kEmptyKnowledgeBase,
  kIndexOutOfRange,
  kEmptyBank,
  kEmptyConversation,
  kUnparsableStep,
  kPreconditionFailed,
  kNoRetainedLabels,
  kSessionNotFound,
  kSessionClosed,
  kBusy,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Base of every domain error raised by the library. The CLI maps these to
// exit code 1 and the service maps them to HTTP statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class BackendUnavailable : public Error {
 public:
  BackendUnavailable(const std::string& message, bool retry_safe)
      : Error(ErrorCode::kBackendUnavailable, message), retry_safe_(retry_safe) {}

  // True when repeating the same request may succeed (network hiccup, 429,
  // 5xx). Authentication failures are not retry-safe.
  bool retry_safe() const noexcept { return retry_safe_; }

 private:
  bool retry_safe_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(ErrorCode::kParseError, message + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnparsableStep : public Error {
 public:
  explicit UnparsableStep(std::string raw)
      : Error(ErrorCode::kUnparsableStep, "cannot parse ReAct step: " + raw),
        raw_(std::move(raw)) {}

  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

}  // namespace proactiva

#endif  // PROACTIVA_ERROR_H_
