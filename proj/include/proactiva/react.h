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

#ifndef PROACTIVA_REACT_H_
#define PROACTIVA_REACT_H_

#include <cstddef>
#include <fstream>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "proactiva/embedding.h"
#include "proactiva/llm.h"
#include "proactiva/proactivity.h"
#include "proactiva/rewriter.h"
#include "proactiva/types.h"

namespace proactiva {

enum class ActionKind { kSearch, kGetProactivityStrategy, kFinish };

struct Action {
  ActionKind kind = ActionKind::kFinish;
  std::string argument;

  static Action search(std::string question) { return {ActionKind::kSearch, std::move(question)}; }
  static Action strategy(int level) {
    return {ActionKind::kGetProactivityStrategy, std::to_string(level)};
  }
  static Action finish(std::string answer) { return {ActionKind::kFinish, std::move(answer)}; }

  bool operator==(const Action&) const = default;
};

struct ParsedStep {
  std::string thought;
  Action action;

  bool operator==(const ParsedStep&) const = default;
};

struct ReActStep {
  std::string thought;
  Action action;
  std::optional<std::string> observation;  // absent exactly for Finish

  bool operator==(const ReActStep&) const = default;
};

struct ReActTrace {
  std::vector<ReActStep> steps;
  std::string final_answer;
  int reflect_attempts = 0;
  bool reflected_ok = false;
  // Step budget ran out and the last step was turned into a Finish.
  bool truncated = false;
  // The last ReAct prompt sent, for auditing.
  std::string prompt_text;
};

nlohmann::json to_json(const ReActStep& step);
nlohmann::json to_json(const ReActTrace& trace);

// "search[...]", "get_proactivity_strategy[N]" or "finish[...]".
std::string render_action(const Action& action);

// "Thought: ...\nAction: ..." or "Thought: ...\nFinal Answer: ...".
std::string render_step(const ParsedStep& step);

// Accepts an optional "Thought:" label (text before the first keyword is
// thought), then "Action: search[q]", "Action: get_proactivity_strategy[n]"
// or "Final Answer: text". Keywords are case-insensitive; anything after the
// action line is ignored. Throws UnparsableStep, or Error(kInvalidLevel) for a
// strategy argument outside 1..5.
ParsedStep parse_step(std::string_view raw);

enum class InputKind { kQuestion, kEvent };

inline constexpr std::string_view kObservationStop = "Observation:";
inline constexpr std::string_view kMalformedNote =
    "Your last output was malformed; follow the Action format.";

ChatRequest build_react_prompt(const EngineConfig& config, const DialogueHistory& history,
                               std::string_view rewritten_question, std::string_view strategy_text,
                               std::span<const ReActStep> prior_steps,
                               InputKind kind = InputKind::kQuestion,
                               std::string_view correction = {});

struct ActionContext {
  const VectorStore& store;
  const Embedder& embedder;
  const StrategyCatalog& catalog;
  int retrieval_k = 3;
};

inline constexpr std::string_view kNoResults = "NO_RESULTS";

// Search: top retrieval_k rows as "[scenario] field: value; ..." lines, or
// NO_RESULTS for an empty store. Strategy lookup: the catalog text.
std::string execute_action(const Action& action, const ActionContext& context);

struct Verdict {
  bool follows = false;
  bool well_formed = false;
  std::string correction;
};

// First line YES or NO; for NO, the remaining text is the corrected reply.
Verdict parse_verdict(std::string_view reply);

ChatRequest build_reflect_prompt(std::string_view strategy_text, std::string_view context,
                                 std::string_view candidate, double temperature);

struct UserUtterance {
  std::string text;
};
// Scenario trigger that lets a level 4/5 assistant speak first.
struct InitiationEvent {
  std::string description;
};
using TurnInput = std::variant<UserUtterance, InitiationEvent>;

struct ConversationState {
  ProactivityLevel level{1};
  DialogueHistory history;
};

struct RespondResult {
  std::string assistant_text;
  ReActTrace trace;
  std::optional<RewriteResult> rewrite;
};

// Rewrite + ReAct + Reflect. Holds only shared read-only state; one respond
// call per conversation at a time, any number of conversations concurrently.
class Engine {
 public:
  // `examples` may be null, in which case utterances are used unrewritten.
  Engine(EngineConfig config, LlmBackend& backend, const Embedder& embedder,
         const VectorStore& store, const RewriteExampleIndex* examples,
         const StrategyCatalog& catalog = default_catalog());

  const EngineConfig& config() const { return config_; }
  const StrategyCatalog& catalog() const { return catalog_; }

  ReActTrace run_react(const DialogueHistory& history, std::string_view question,
                       ProactivityLevel level, InputKind kind = InputKind::kQuestion) const;

  ReActTrace reflect(ReActTrace trace, std::string_view strategy_text,
                     std::string_view context = {}) const;

  // Appends the user turn (if any) and the assistant turn to state.history
  // only when the whole pipeline succeeds.
  RespondResult respond(ConversationState& state, const TurnInput& input,
                        std::optional<Timestamp> now = std::nullopt) const;

 private:
  EngineConfig config_;
  LlmBackend& backend_;
  const Embedder& embedder_;
  const VectorStore& store_;
  const RewriteExampleIndex* examples_;
  const StrategyCatalog& catalog_;
};

// {session_id, level, rewrite_result, steps, final_answer, reflect_attempts, reflected_ok}
nlohmann::json audit_record(std::string_view session_id, ProactivityLevel level,
                            const RespondResult& result);

// Appends one JSON line per record; safe to share between threads.
class AuditLog {
 public:
  explicit AuditLog(const std::string& path);
  void append(const nlohmann::json& record);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

}  // namespace proactiva

#endif  // PROACTIVA_REACT_H_
