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

#ifndef PROACTIVA_USER_SIMULATOR_H_
#define PROACTIVA_USER_SIMULATOR_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "proactiva/llm.h"
#include "proactiva/react.h"
#include "proactiva/types.h"

namespace proactiva {

inline constexpr std::string_view kDoneSentinel = "[DONE]";

// One simulated driver. Levels 1-3 start from `opening_utterance`; levels 4-5
// start from `initiation_event` and let the assistant speak first.
struct SimulatedUserGoal {
  std::string id;
  ProactivityLevel level{1};
  std::optional<std::string> opening_utterance;
  std::optional<std::string> initiation_event;
  std::string goal_description;
  int max_turns = 6;  // maximum number of assistant turns

  // Throws Error(kInvalidConfig) when the opening does not match the level.
  void validate() const;
};

nlohmann::json to_json(const SimulatedUserGoal& goal);
SimulatedUserGoal goal_from_json(const nlohmann::json& j);

// Goal file: [{id, level, opening_utterance?, initiation_event?, goal_description, max_turns?}]
std::vector<SimulatedUserGoal> load_goals(const std::string& path);

ChatRequest build_simulator_prompt(const DialogueHistory& history, const SimulatedUserGoal& goal,
                                   double temperature = 0.0);

// One short driver reply. Precondition: the last turn is the assistant's.
std::string simulate_user_turn(LlmBackend& backend, const DialogueHistory& history,
                               const SimulatedUserGoal& goal, double temperature = 0.0);

enum class Termination { kUserDone, kMaxTurns, kError };

std::string_view termination_name(Termination t);

struct DialogueOutcome {
  DialogueHistory conversation;
  std::size_t turn_count = 0;
  Termination terminated = Termination::kError;
  std::string error;
  std::vector<RespondResult> responses;
};

// Alternates engine replies and simulated driver replies until the driver
// emits [DONE] (stripped from the transcript) or the assistant has spoken
// max_turns times. Errors end the dialogue with Termination::kError and the
// partial conversation.
DialogueOutcome run_dialogue(const Engine& engine, LlmBackend& simulator_backend,
                             const SimulatedUserGoal& goal);

}  // namespace proactiva

#endif  // PROACTIVA_USER_SIMULATOR_H_
