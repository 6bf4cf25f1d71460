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

#include "proactiva/http_backend.h"

#include <cstdlib>

#include "httplib.h"
#include "proactiva/error.h"

namespace proactiva {

using nlohmann::json;

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return (v != nullptr && *v != '\0') ? std::string(v) : fallback;
}

}  // namespace

HttpBackendOptions HttpBackendOptions::from_env() {
  HttpBackendOptions o;
  o.base_url = env_or(kApiBaseEnv, o.base_url);
  o.api_key = env_or(kApiKeyEnv, "");
  o.model = env_or(kModelEnv, o.model);
  return o;
}

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidConfig, "base URL needs a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.origin = url;
  } else {
    out.origin = url.substr(0, path_start);
    out.path_prefix = url.substr(path_start);
  }
  while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  return out;
}

HttpBackend::HttpBackend(HttpBackendOptions options)
    : options_(std::move(options)), url_(split_url(options_.base_url)) {}

json HttpBackend::request_body(const ChatRequest& request) const {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  }
  json body{{"model", options_.model}, {"messages", messages},
            {"temperature", request.temperature}};
  if (!request.stop_sequences.empty()) body["stop"] = request.stop_sequences;
  if (request.max_output_tokens) body["max_tokens"] = *request.max_output_tokens;
  return body;
}

ChatResponse parse_chat_completion(const std::string& body,
                                   const std::vector<std::string>& stop_sequences) {
  ChatResponse response;
  try {
    auto j = json::parse(body);
    const auto& choice = j.at("choices").at(0);
    const auto& content = choice.at("message").at("content");
    response.content = content.is_null() ? "" : content.get<std::string>();
    auto reason = choice.value("finish_reason", std::string("stop"));
    response.finish_reason = reason == "length" ? FinishReason::kLength : FinishReason::kStop;
    if (j.contains("usage") && j["usage"].is_object()) {
      response.usage = Usage{j["usage"].value("prompt_tokens", 0),
                             j["usage"].value("completion_tokens", 0)};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse, e.what());
  }
  if (truncate_at_stop(response.content, stop_sequences)) {
    response.finish_reason = FinishReason::kStopSequence;
  }
  return response;
}

ChatResponse HttpBackend::complete(const ChatRequest& request) {
  request.validate();
  httplib::Client client(url_.origin);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }
  auto result = client.Post(url_.path_prefix + "/chat/completions", headers,
                            request_body(request).dump(), "application/json");
  if (!result) {
    throw BackendUnavailable("request to " + url_.origin + " failed: " +
                                 httplib::to_string(result.error()),
                             true);
  }
  const auto status = result->status;
  if (status == 401 || status == 403) {
    throw BackendUnavailable("authentication rejected (HTTP " + std::to_string(status) + ")",
                             false);
  }
  if (status == 429 || status >= 500) {
    throw BackendUnavailable("server returned HTTP " + std::to_string(status), true);
  }
  if (status != 200) {
    throw BackendUnavailable("server returned HTTP " + std::to_string(status), false);
  }
  return parse_chat_completion(result->body, request.stop_sequences);
}

}  // namespace proactiva
