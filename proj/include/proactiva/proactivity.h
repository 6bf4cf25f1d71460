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

#ifndef PROACTIVA_PROACTIVITY_H_
#define PROACTIVA_PROACTIVITY_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "proactiva/llm.h"
#include "proactiva/types.h"

namespace proactiva {

// The five canonical strategies, indexed by level.
class StrategyCatalog {
 public:
  StrategyCatalog();

  const StrategySpec& spec(ProactivityLevel level) const;
  const std::array<StrategySpec, 5>& specs() const { return specs_; }

 private:
  std::array<StrategySpec, 5> specs_;
};

// Process-wide immutable catalog.
const StrategyCatalog& default_catalog();

// Strategy text for `level`, verbatim from the catalog.
// Throws Error(kInvalidLevel) outside 1..5.
const std::string& get_proactivity_strategy(const StrategyCatalog& catalog, int level);

// Scoring rubric shared by the LLM judge prompt and docs/rubric.md.
std::string_view rubric_text();

struct ProactivityScore {
  int value = 0;  // 0 means the task was not completed; 1..5 otherwise.
  std::string rationale;
};

struct TaskContext {
  std::string goal_description;
  // When set, overrides the judge's own completion check.
  std::optional<bool> goal_met;
};

enum class JudgeKind { kKeyword, kLlmRubric };

std::string_view judge_kind_name(JudgeKind kind);

class Judge {
 public:
  virtual ~Judge() = default;
  // Throws Error(kEmptyConversation) when no assistant turn exists.
  virtual ProactivityScore score(const DialogueHistory& conversation,
                                 const TaskContext& task) const = 0;
  virtual JudgeKind kind() const = 0;
};

// Deterministic decision tree:
//   task unmet                                   -> 0
//   assistant opened the conversation            -> 4 if it asked before
//                                                   acting, else 5
//   driver gave an explicit command and the
//   assistant did not ask for confirmation       -> 1
//   otherwise the first assistant move decides:
//     confirmation question                      -> 2
//     announced action                           -> 3
//     neither                                    -> 1
ProactivityScore keyword_rubric(const DialogueHistory& conversation, const TaskContext& task);

class KeywordJudge : public Judge {
 public:
  ProactivityScore score(const DialogueHistory& conversation,
                         const TaskContext& task) const override {
    return keyword_rubric(conversation, task);
  }
  JudgeKind kind() const override { return JudgeKind::kKeyword; }
};

// Asks a model to apply rubric_text(); expects "Score: N" in the reply.
class LlmRubricJudge : public Judge {
 public:
  explicit LlmRubricJudge(LlmBackend& backend, double temperature = 0.0)
      : backend_(backend), temperature_(temperature) {}

  ProactivityScore score(const DialogueHistory& conversation,
                         const TaskContext& task) const override;
  JudgeKind kind() const override { return JudgeKind::kLlmRubric; }

  static ChatRequest build_request(const DialogueHistory& conversation, const TaskContext& task,
                                   double temperature);
  // Throws Error(kMalformedResponse) when no score in 0..5 is found.
  static ProactivityScore parse_reply(std::string_view reply);

 private:
  LlmBackend& backend_;
  double temperature_;
};

// Exposed for tests of the rubric's building blocks.
namespace rubric {

enum class MoveKind { kNone, kQuestion, kConfirmationQuestion, kAction };

// Splits on sentence terminators followed by whitespace or end of text.
std::vector<std::string> split_sentences(std::string_view text);
MoveKind classify_sentence(std::string_view sentence);
bool is_explicit_command(std::string_view utterance);
bool is_refusal(std::string_view assistant_text);

}  // namespace rubric

}  // namespace proactiva

#endif  // PROACTIVA_PROACTIVITY_H_
