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

#include "proactiva/types.h"

#include <cstdio>
#include <ctime>

#include "proactiva/error.h"
#include "proactiva/text.h"

namespace proactiva {

using nlohmann::json;

std::string_view speaker_name(Speaker speaker) {
  switch (speaker) {
    case Speaker::kUser: return "User";
    case Speaker::kAssistant: return "Assistant";
    case Speaker::kSystem: return "System";
  }
  return "User";
}

Speaker speaker_from_name(std::string_view name) {
  if (name == "User") return Speaker::kUser;
  if (name == "Assistant") return Speaker::kAssistant;
  if (name == "System") return Speaker::kSystem;
  throw Error(ErrorCode::kInvalidHistory, "unknown speaker '" + std::string(name) + "'");
}

std::string format_timestamp(Timestamp ts) {
  auto secs = std::chrono::floor<std::chrono::seconds>(ts);
  auto millis = (ts - secs).count();
  std::time_t t = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(millis));
  return buf;
}

Timestamp parse_timestamp(std::string_view iso) {
  std::tm tm{};
  int millis = 0;
  std::string s(iso);
  int n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ", &tm.tm_year, &tm.tm_mon,
                      &tm.tm_mday, &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &millis);
  if (n < 6) throw Error(ErrorCode::kParseError, "bad timestamp '" + s + "'");
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  std::time_t t = timegm(&tm);
  return std::chrono::time_point_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::from_time_t(t)) +
         std::chrono::milliseconds(millis);
}

DialogueHistory DialogueHistory::from_turns(std::string session_id, std::vector<Turn> turns) {
  DialogueHistory h(std::move(session_id));
  for (std::size_t i = 0; i < turns.size(); ++i) {
    if (turns[i].index != i) {
      throw Error(ErrorCode::kInvalidHistory,
                  "turn index " + std::to_string(turns[i].index) + " at position " +
                      std::to_string(i));
    }
    h = append_turn(h, turns[i].speaker, turns[i].text, turns[i].timestamp);
  }
  return h;
}

const Turn* DialogueHistory::first_spoken() const {
  for (const auto& t : turns_) {
    if (t.speaker != Speaker::kSystem) return &t;
  }
  return nullptr;
}

std::size_t DialogueHistory::count(Speaker speaker) const {
  std::size_t n = 0;
  for (const auto& t : turns_) n += t.speaker == speaker ? 1 : 0;
  return n;
}

DialogueHistory append_turn(const DialogueHistory& history, Speaker speaker,
                            std::string_view text, std::optional<Timestamp> timestamp) {
  auto trimmed = text::trim(text);
  if (trimmed.empty()) throw Error(ErrorCode::kEmptyUtterance, "utterance is blank");
  if (speaker == Speaker::kSystem && !history.empty()) {
    throw Error(ErrorCode::kInvalidHistory, "a System turn may only open the history");
  }
  DialogueHistory next = history;
  next.turns_.push_back(Turn{speaker, std::string(trimmed), history.size(), timestamp});
  return next;
}

std::string render_history(const DialogueHistory& history) {
  std::string out;
  for (const auto& turn : history.turns()) {
    if (turn.speaker == Speaker::kSystem) continue;
    if (!out.empty()) out += '\n';
    out += turn.speaker == Speaker::kUser ? kDriverLabel : kAssistantLabel;
    out += ": ";
    out += turn.text;
  }
  return out;
}

ProactivityLevel::ProactivityLevel(int value) : value_(value) {
  if (value < kMin || value > kMax) {
    throw Error(ErrorCode::kInvalidLevel,
                "proactivity level must be in 1..5, got " + std::to_string(value));
  }
}

std::array<ProactivityLevel, 5> ProactivityLevel::all() {
  return {ProactivityLevel(1), ProactivityLevel(2), ProactivityLevel(3), ProactivityLevel(4),
          ProactivityLevel(5)};
}

std::string_view assumption_name(Assumption a) {
  switch (a) {
    case Assumption::kNone: return "None";
    case Assumption::kSome: return "Some";
    case Assumption::kStrong: return "Strong";
  }
  return "None";
}

std::string_view autonomy_name(Autonomy a) {
  switch (a) {
    case Autonomy::kNone: return "None";
    case Autonomy::kConfirmFirst: return "ConfirmFirst";
    case Autonomy::kActWithMinimalInput: return "ActWithMinimalInput";
    case Autonomy::kProposeThenConfirm: return "ProposeThenConfirm";
    case Autonomy::kActWithExplanation: return "ActWithExplanation";
  }
  return "None";
}

std::string_view user_control_name(UserControl c) {
  switch (c) {
    case UserControl::kFullControl: return "FullControl";
    case UserControl::kConfirmationRequired: return "ConfirmationRequired";
    case UserControl::kMinimalInput: return "MinimalInput";
    case UserControl::kConfirmBeforeExecute: return "ConfirmBeforeExecute";
    case UserControl::kInterveneToStop: return "InterveneToStop";
  }
  return "FullControl";
}

void EngineConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (rewrite_shot_count < 1) fail("rewrite_shot_count must be >= 1");
  if (retrieval_k < 1) fail("retrieval_k must be >= 1");
  if (max_react_steps < 1) fail("max_react_steps must be >= 1");
  if (max_reflect_retries < 0) fail("max_reflect_retries must be >= 0");
  if (!(temperature >= 0.0)) fail("temperature must be >= 0");
}

EngineConfig engine_config_from_json(const json& j, EngineConfig base) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be an object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "level") {
        base.level = ProactivityLevel(value.get<int>());
      } else if (key == "rewrite_shot_count") {
        base.rewrite_shot_count = value.get<int>();
      } else if (key == "retrieval_k") {
        base.retrieval_k = value.get<int>();
      } else if (key == "max_react_steps") {
        base.max_react_steps = value.get<int>();
      } else if (key == "max_reflect_retries") {
        base.max_reflect_retries = value.get<int>();
      } else if (key == "temperature") {
        base.temperature = value.get<double>();
      } else {
        throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::type_error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  base.validate();
  return base;
}

json to_json(const EngineConfig& config) {
  return json{{"level", config.level.value()},
              {"rewrite_shot_count", config.rewrite_shot_count},
              {"retrieval_k", config.retrieval_k},
              {"max_react_steps", config.max_react_steps},
              {"max_reflect_retries", config.max_reflect_retries},
              {"temperature", config.temperature}};
}

json turn_to_json(const Turn& turn) {
  json j{{"speaker", speaker_name(turn.speaker)}, {"text", turn.text}, {"index", turn.index}};
  if (turn.timestamp) j["timestamp"] = format_timestamp(*turn.timestamp);
  return j;
}

Turn turn_from_json(const json& j) {
  try {
    Turn t;
    t.speaker = speaker_from_name(j.at("speaker").get<std::string>());
    t.text = j.at("text").get<std::string>();
    t.index = j.at("index").get<std::size_t>();
    if (j.contains("timestamp")) t.timestamp = parse_timestamp(j["timestamp"].get<std::string>());
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidHistory, e.what());
  }
}

json transcript_to_json(const DialogueHistory& history, ProactivityLevel level) {
  json turns = json::array();
  for (const auto& t : history.turns()) turns.push_back(turn_to_json(t));
  return json{{"session_id", history.session_id()}, {"level", level.value()}, {"turns", turns}};
}

Transcript transcript_from_json(const json& j) {
  try {
    std::vector<Turn> turns;
    for (const auto& t : j.at("turns")) turns.push_back(turn_from_json(t));
    return Transcript{
        DialogueHistory::from_turns(j.at("session_id").get<std::string>(), std::move(turns)),
        ProactivityLevel(j.at("level").get<int>())};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidHistory, e.what());
  }
}

}  // namespace proactiva
