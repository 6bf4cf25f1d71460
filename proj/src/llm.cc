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

#include "proactiva/llm.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

#include "proactiva/error.h"

namespace proactiva {

using nlohmann::json;

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

void ChatRequest::validate() const {
  if (messages.empty()) throw Error(ErrorCode::kPreconditionFailed, "request has no messages");
  if (messages.front().role == Role::kAssistant) {
    throw Error(ErrorCode::kPreconditionFailed, "first message must be System or User");
  }
  if (temperature < 0) throw Error(ErrorCode::kPreconditionFailed, "temperature must be >= 0");
  if (max_output_tokens && *max_output_tokens < 1) {
    throw Error(ErrorCode::kPreconditionFailed, "max_output_tokens must be positive");
  }
}

std::string ChatRequest::joined_content() const {
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += '\n';
    out += m.content;
  }
  return out;
}

bool truncate_at_stop(std::string& content, const std::vector<std::string>& stop_sequences) {
  auto cut = std::string::npos;
  for (const auto& stop : stop_sequences) {
    if (stop.empty()) continue;
    cut = std::min(cut, content.find(stop));
  }
  if (cut == std::string::npos) return false;
  content.resize(cut);
  return true;
}

void ScriptedBackend::enqueue(ChatResponse response) {
  std::lock_guard lock(mu_);
  queue_.push_back(std::move(response));
}

void ScriptedBackend::add_rule(Responder responder) {
  std::lock_guard lock(mu_);
  rules_.push_back(std::move(responder));
}

void ScriptedBackend::add_match(std::vector<std::string> all_of, std::vector<std::string> none_of,
                                std::vector<std::string> responses, bool repeat) {
  // Rules run under mu_, so the captured cursor needs no extra locking.
  auto cursor = std::make_shared<std::size_t>(0);
  add_rule([all_of = std::move(all_of), none_of = std::move(none_of),
            responses = std::move(responses), repeat,
            cursor](const ChatRequest& request) -> std::optional<ChatResponse> {
    if (responses.empty()) return std::nullopt;
    auto content = request.joined_content();
    for (const auto& s : all_of) {
      if (content.find(s) == std::string::npos) return std::nullopt;
    }
    for (const auto& s : none_of) {
      if (content.find(s) != std::string::npos) return std::nullopt;
    }
    if (repeat) return ChatResponse::text(responses.front());
    if (*cursor >= responses.size()) return std::nullopt;
    return ChatResponse::text(responses[(*cursor)++]);
  });
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_json(const json& script) {
  auto backend = std::make_unique<ScriptedBackend>();
  try {
    if (script.contains("rules")) {
      for (const auto& rule : script.at("rules")) {
        auto all = rule.value("all", std::vector<std::string>{});
        auto none = rule.value("none", std::vector<std::string>{});
        if (rule.contains("respond")) {
          backend->add_match(std::move(all), std::move(none),
                             {rule.at("respond").get<std::string>()}, true);
        } else {
          backend->add_match(std::move(all), std::move(none),
                             rule.at("queue").get<std::vector<std::string>>(), false);
        }
      }
    }
    if (script.contains("queue")) {
      for (const auto& item : script.at("queue")) backend->enqueue_text(item.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("bad script: ") + e.what());
  }
  return backend;
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open script " + path);
  json script;
  try {
    script = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidConfig, "bad script " + path + ": " + e.what());
  }
  return from_json(script);
}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
  request.validate();
  std::lock_guard lock(mu_);
  for (auto& rule : rules_) {
    if (auto response = rule(request)) {
      call_log_.push_back(request);
      return *response;
    }
  }
  if (queue_.empty()) {
    throw Error(ErrorCode::kScriptExhausted,
                "no scripted response left (served " + std::to_string(call_log_.size()) + ")");
  }
  auto response = std::move(queue_.front());
  queue_.pop_front();
  call_log_.push_back(request);
  return response;
}

std::vector<ChatRequest> ScriptedBackend::call_log() const {
  std::lock_guard lock(mu_);
  return call_log_;
}

std::size_t ScriptedBackend::calls_served() const {
  std::lock_guard lock(mu_);
  return call_log_.size();
}

std::size_t ScriptedBackend::queued() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

ChatResponse with_retry(LlmBackend& backend, const ChatRequest& request, int max_attempts,
                        const RetryPolicy& policy) {
  if (max_attempts < 1) throw Error(ErrorCode::kPreconditionFailed, "max_attempts must be >= 1");
  auto delay = std::chrono::duration<double, std::milli>(policy.initial_backoff);
  for (int attempt = 1;; ++attempt) {
    try {
      return backend.complete(request);
    } catch (const BackendUnavailable& e) {
      if (!e.retry_safe() || attempt >= max_attempts) throw;
    }
    std::this_thread::sleep_for(delay);
    delay *= policy.multiplier;
  }
}

}  // namespace proactiva
