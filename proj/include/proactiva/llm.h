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

#ifndef PROACTIVA_LLM_H_
#define PROACTIVA_LLM_H_

#include <chrono>
#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace proactiva {

enum class Role { kSystem, kUser, kAssistant };

std::string_view role_name(Role role);

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::vector<std::string> stop_sequences;
  std::optional<int> max_output_tokens;

  // Throws Error(kPreconditionFailed) on an empty message list or when the
  // first message is an Assistant message.
  void validate() const;

  // All message contents joined by newlines; what scripted matchers inspect.
  std::string joined_content() const;

  bool operator==(const ChatRequest&) const = default;
};

enum class FinishReason { kStop, kStopSequence, kLength, kError };

struct Usage {
  int prompt_tokens = 0;
  int completion_tokens = 0;

  bool operator==(const Usage&) const = default;
};

struct ChatResponse {
  std::string content;
  FinishReason finish_reason = FinishReason::kStop;
  std::optional<Usage> usage;

  static ChatResponse text(std::string content) {
    return ChatResponse{std::move(content), FinishReason::kStop, std::nullopt};
  }

  bool operator==(const ChatResponse&) const = default;
};

// Cuts `content` at the earliest stop sequence. Returns true if anything was cut.
bool truncate_at_stop(std::string& content, const std::vector<std::string>& stop_sequences);

// Every pipeline stage talks to a model through this interface only.
// Implementations must be safe to call from several threads at once.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

// Deterministic test double.
//
// Responses come from two sources, checked in this order:
//   1. matcher rules, in insertion order; the first rule that yields a
//      response wins (rules may carry their own finite queue);
//   2. the shared FIFO queue.
// When neither yields a response, complete() throws Error(kScriptExhausted).
class ScriptedBackend : public LlmBackend {
 public:
  // Returns nullopt to decline a request. May throw to simulate failures.
  using Responder = std::function<std::optional<ChatResponse>(const ChatRequest&)>;

  ScriptedBackend() = default;

  void enqueue(ChatResponse response);
  void enqueue_text(std::string content) { enqueue(ChatResponse::text(std::move(content))); }

  void add_rule(Responder responder);

  // Fires when every string in `all_of` occurs in the request content and none
  // of `none_of` does. With `repeat` the response is served indefinitely,
  // otherwise `responses` are consumed in order.
  void add_match(std::vector<std::string> all_of, std::vector<std::string> none_of,
                 std::vector<std::string> responses, bool repeat);

  // Script document:
  //   {"queue": ["...", ...],
  //    "rules": [{"all": [...], "none": [...], "respond": "..."}
  //            | {"all": [...], "none": [...], "queue": ["...", ...]}]}
  static std::unique_ptr<ScriptedBackend> from_json(const nlohmann::json& script);
  static std::unique_ptr<ScriptedBackend> from_file(const std::string& path);

  ChatResponse complete(const ChatRequest& request) override;

  std::vector<ChatRequest> call_log() const;
  std::size_t calls_served() const;
  std::size_t queued() const;

 private:
  mutable std::mutex mu_;
  std::vector<Responder> rules_;
  std::deque<ChatResponse> queue_;
  std::vector<ChatRequest> call_log_;
};

struct RetryPolicy {
  std::chrono::milliseconds initial_backoff{200};
  double multiplier = 2.0;
};

// Calls backend.complete at most `max_attempts` times, sleeping with
// exponential backoff between attempts. Only retry-safe BackendUnavailable
// errors are retried; everything else propagates immediately.
ChatResponse with_retry(LlmBackend& backend, const ChatRequest& request, int max_attempts,
                        const RetryPolicy& policy = {});

class RetryingBackend : public LlmBackend {
 public:
  RetryingBackend(std::shared_ptr<LlmBackend> inner, int max_attempts, RetryPolicy policy = {})
      : inner_(std::move(inner)), max_attempts_(max_attempts), policy_(policy) {}

  ChatResponse complete(const ChatRequest& request) override {
    return with_retry(*inner_, request, max_attempts_, policy_);
  }

 private:
  std::shared_ptr<LlmBackend> inner_;
  int max_attempts_;
  RetryPolicy policy_;
};

}  // namespace proactiva

#endif  // PROACTIVA_LLM_H_
