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

#include "proactiva/error.h"

namespace proactiva {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyUtterance: return "EmptyUtterance";
    case ErrorCode::kInvalidLevel: return "InvalidLevel";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidHistory: return "InvalidHistory";
    case ErrorCode::kScriptExhausted: return "ScriptExhausted";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kInvalidVector: return "InvalidVector";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kEmptyStore: return "EmptyStore";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kEmptyKnowledgeBase: return "EmptyKnowledgeBase";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kEmptyBank: return "EmptyBank";
    case ErrorCode::kEmptyConversation: return "EmptyConversation";
    case ErrorCode::kUnparsableStep: return "UnparsableStep";
    case ErrorCode::kPreconditionFailed: return "PreconditionFailed";
    case ErrorCode::kNoRetainedLabels: return "NoRetainedLabels";
    case ErrorCode::kSessionNotFound: return "SessionNotFound";
    case ErrorCode::kSessionClosed: return "SessionClosed";
    case ErrorCode::kBusy: return "Busy";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

}  // namespace proactiva
