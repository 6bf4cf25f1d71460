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

#ifndef PROACTIVA_HTTP_BACKEND_H_
#define PROACTIVA_HTTP_BACKEND_H_

#include <chrono>
#include <string>

#include "proactiva/llm.h"

namespace proactiva {

inline constexpr const char* kApiKeyEnv = "PROACTIVA_API_KEY";
inline constexpr const char* kApiBaseEnv = "PROACTIVA_API_BASE";
inline constexpr const char* kModelEnv = "PROACTIVA_MODEL";

struct HttpBackendOptions {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  std::string model = "gpt-3.5-turbo";
  std::chrono::seconds timeout{120};

  // Reads PROACTIVA_API_BASE / PROACTIVA_API_KEY / PROACTIVA_MODEL, keeping
  // defaults for unset variables.
  static HttpBackendOptions from_env();
};

// Splits "http://host:port/prefix" into origin ("http://host:port") and path
// prefix ("/prefix", possibly empty). Throws Error(kInvalidConfig).
struct SplitUrl {
  std::string origin;
  std::string path_prefix;
};
SplitUrl split_url(const std::string& url);

// OpenAI-compatible chat-completions client. Stop sequences are also applied
// client-side, so content never extends past one even if the server ignores
// the `stop` field.
class HttpBackend : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  ChatResponse complete(const ChatRequest& request) override;

  // The JSON body sent for `request`.
  nlohmann::json request_body(const ChatRequest& request) const;

 private:
  HttpBackendOptions options_;
  SplitUrl url_;
};

// Parses a chat-completions response body and applies client-side stop
// truncation. Throws Error(kMalformedResponse).
ChatResponse parse_chat_completion(const std::string& body,
                                   const std::vector<std::string>& stop_sequences);

}  // namespace proactiva

#endif  // PROACTIVA_HTTP_BACKEND_H_
