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

#include "proactiva/user_simulator.h"

#include <fstream>

#include "proactiva/error.h"
#include "proactiva/text.h"

namespace proactiva {

using nlohmann::json;

namespace {

constexpr std::string_view kSimulatorSystem =
    "You play a driver talking to the in-vehicle assistant of your car while driving.\n"
    "Rules:\n"
    "- Reply with one short utterance.\n"
    "- Stay on the topic of your goal; do not start new topics.\n"
    "- If the assistant proposes or performs what your goal needs, affirm it.\n"
    "- If the proposal does not match your goal, negate it.\n"
    "- If the assistant asks you something, clarify briefly.\n"
    "- When your goal is satisfied, or you give up, end your reply with [DONE].";

std::string strip_sentinel(std::string_view reply, bool& done) {
  std::string out(reply);
  done = false;
  for (auto pos = out.find(kDoneSentinel); pos != std::string::npos; pos = out.find(kDoneSentinel)) {
    out.erase(pos, kDoneSentinel.size());
    done = true;
  }
  return std::string(text::trim(out));
}

}  // namespace

void SimulatedUserGoal::validate() const {
  auto fail = [this](const std::string& what) {
    throw Error(ErrorCode::kInvalidConfig, "goal '" + id + "': " + what);
  };
  if (max_turns < 1) fail("max_turns must be >= 1");
  if (level.assistant_initiates()) {
    if (opening_utterance) fail("levels 4-5 open with an initiation event, not an utterance");
    if (!initiation_event || text::trim(*initiation_event).empty()) {
      fail("levels 4-5 need an initiation_event");
    }
  } else {
    if (!opening_utterance || text::trim(*opening_utterance).empty()) {
      fail("levels 1-3 need an opening_utterance");
    }
    if (initiation_event) fail("levels 1-3 cannot start from an initiation event");
  }
}

json to_json(const SimulatedUserGoal& goal) {
  json j{{"id", goal.id},
         {"level", goal.level.value()},
         {"goal_description", goal.goal_description},
         {"max_turns", goal.max_turns}};
  if (goal.opening_utterance) j["opening_utterance"] = *goal.opening_utterance;
  if (goal.initiation_event) j["initiation_event"] = *goal.initiation_event;
  return j;
}

SimulatedUserGoal goal_from_json(const json& j) {
  SimulatedUserGoal g;
  try {
    g.id = j.at("id").get<std::string>();
    g.level = ProactivityLevel(j.at("level").get<int>());
    if (j.contains("opening_utterance")) g.opening_utterance = j["opening_utterance"].get<std::string>();
    if (j.contains("initiation_event")) g.initiation_event = j["initiation_event"].get<std::string>();
    g.goal_description = j.at("goal_description").get<std::string>();
    g.max_turns = j.value("max_turns", 6);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("bad goal: ") + e.what());
  }
  g.validate();
  return g;
}

std::vector<SimulatedUserGoal> load_goals(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
  if (!j.is_array()) throw Error(ErrorCode::kInvalidConfig, path + ": goal file must be a list");
  std::vector<SimulatedUserGoal> goals;
  for (const auto& item : j) goals.push_back(goal_from_json(item));
  return goals;
}

ChatRequest build_simulator_prompt(const DialogueHistory& history, const SimulatedUserGoal& goal,
                                   double temperature) {
  ChatRequest request;
  request.messages.push_back({Role::kSystem, std::string(kSimulatorSystem)});
  request.messages.push_back({Role::kUser, "Your goal: " + goal.goal_description +
                                               "\n\nConversation so far:\n" +
                                               render_history(history) +
                                               "\n\nYour reply as the driver:"});
  request.temperature = temperature;
  return request;
}

std::string simulate_user_turn(LlmBackend& backend, const DialogueHistory& history,
                               const SimulatedUserGoal& goal, double temperature) {
  if (history.empty() || history.back().speaker != Speaker::kAssistant) {
    throw Error(ErrorCode::kPreconditionFailed, "the simulated driver replies to the assistant");
  }
  return std::string(
      text::trim(backend.complete(build_simulator_prompt(history, goal, temperature)).content));
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::kUserDone: return "UserDone";
    case Termination::kMaxTurns: return "MaxTurns";
    case Termination::kError: return "Error";
  }
  return "Error";
}

DialogueOutcome run_dialogue(const Engine& engine, LlmBackend& simulator_backend,
                             const SimulatedUserGoal& goal) {
  goal.validate();
  ConversationState state{goal.level, DialogueHistory(goal.id)};
  DialogueOutcome outcome;
  auto finish = [&](Termination t) {
    outcome.conversation = state.history;
    outcome.turn_count = state.history.size();
    outcome.terminated = t;
    return outcome;
  };

  try {
    if (goal.opening_utterance) {
      outcome.responses.push_back(engine.respond(state, UserUtterance{*goal.opening_utterance}));
    } else {
      outcome.responses.push_back(engine.respond(state, InitiationEvent{*goal.initiation_event}));
    }
    for (;;) {
      if (state.history.count(Speaker::kAssistant) >= static_cast<std::size_t>(goal.max_turns)) {
        return finish(Termination::kMaxTurns);
      }
      bool done = false;
      auto reply = strip_sentinel(
          simulate_user_turn(simulator_backend, state.history, goal, engine.config().temperature),
          done);
      if (done) {
        if (!reply.empty()) state.history = append_turn(state.history, Speaker::kUser, reply);
        return finish(Termination::kUserDone);
      }
      outcome.responses.push_back(engine.respond(state, UserUtterance{reply}));
    }
  } catch (const std::exception& e) {
    outcome.error = e.what();
    return finish(Termination::kError);
  }
}

}  // namespace proactiva
