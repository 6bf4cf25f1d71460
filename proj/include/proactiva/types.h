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

#ifndef PROACTIVA_TYPES_H_
#define PROACTIVA_TYPES_H_

#include <array>
#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace proactiva {

enum class Speaker { kUser, kAssistant, kSystem };

std::string_view speaker_name(Speaker speaker);
Speaker speaker_from_name(std::string_view name);

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

std::string format_timestamp(Timestamp ts);
Timestamp parse_timestamp(std::string_view iso);

struct Turn {
  Speaker speaker = Speaker::kUser;
  std::string text;
  std::size_t index = 0;
  std::optional<Timestamp> timestamp;

  bool operator==(const Turn&) const = default;
};

// Ordered dialogue record. Value-semantic: appending yields a new history, so
// candidate continuations can be built without touching the committed one.
class DialogueHistory {
 public:
  DialogueHistory() = default;
  explicit DialogueHistory(std::string session_id) : session_id_(std::move(session_id)) {}

  // Validates indices and the System-turn placement rule.
  static DialogueHistory from_turns(std::string session_id, std::vector<Turn> turns);

  const std::string& session_id() const { return session_id_; }
  const std::vector<Turn>& turns() const { return turns_; }
  std::size_t size() const { return turns_.size(); }
  bool empty() const { return turns_.empty(); }
  const Turn& back() const { return turns_.back(); }

  // First non-System turn, if any.
  const Turn* first_spoken() const;
  std::size_t count(Speaker speaker) const;

  bool operator==(const DialogueHistory&) const = default;

 private:
  friend DialogueHistory append_turn(const DialogueHistory&, Speaker, std::string_view,
                                     std::optional<Timestamp>);

  std::string session_id_;
  std::vector<Turn> turns_;
};

// Throws Error(kEmptyUtterance) when text trims to empty, Error(kInvalidHistory)
// for a System turn that would not be first.
DialogueHistory append_turn(const DialogueHistory& history, Speaker speaker,
                            std::string_view text,
                            std::optional<Timestamp> timestamp = std::nullopt);

// "Driver: ..." / "IVCA: ..." lines in index order; System turns are omitted.
std::string render_history(const DialogueHistory& history);

inline constexpr std::string_view kDriverLabel = "Driver";
inline constexpr std::string_view kAssistantLabel = "IVCA";

class ProactivityLevel {
 public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 5;

  // Throws Error(kInvalidLevel) outside [1, 5].
  explicit ProactivityLevel(int value);

  int value() const { return value_; }
  // Levels 4 and 5 may open the conversation.
  bool assistant_initiates() const { return value_ >= 4; }

  static std::array<ProactivityLevel, 5> all();

  auto operator<=>(const ProactivityLevel&) const = default;

 private:
  int value_;
};

enum class Assumption { kNone, kSome, kStrong };
enum class Autonomy {
  kNone,
  kConfirmFirst,
  kActWithMinimalInput,
  kProposeThenConfirm,
  kActWithExplanation,
};
enum class UserControl {
  kFullControl,
  kConfirmationRequired,
  kMinimalInput,
  kConfirmBeforeExecute,
  kInterveneToStop,
};

std::string_view assumption_name(Assumption a);
std::string_view autonomy_name(Autonomy a);
std::string_view user_control_name(UserControl c);

struct StrategySpec {
  ProactivityLevel level{1};
  Assumption assumption = Assumption::kNone;
  Autonomy autonomy = Autonomy::kNone;
  UserControl user_control = UserControl::kFullControl;
  std::string title;
  std::string strategy_text;
  bool assistant_initiates = false;
};

struct EngineConfig {
  ProactivityLevel level{1};
  int rewrite_shot_count = 3;
  int retrieval_k = 3;
  int max_react_steps = 6;
  int max_reflect_retries = 2;
  double temperature = 0.0;

  // Throws Error(kInvalidConfig) when a bound is violated.
  void validate() const;
};

// Missing keys keep their defaults; unknown keys are rejected.
EngineConfig engine_config_from_json(const nlohmann::json& j, EngineConfig base = {});
nlohmann::json to_json(const EngineConfig& config);

nlohmann::json turn_to_json(const Turn& turn);
Turn turn_from_json(const nlohmann::json& j);

// Transcript document: {session_id, level, turns:[{speaker, text, index, timestamp?}]}.
nlohmann::json transcript_to_json(const DialogueHistory& history, ProactivityLevel level);
struct Transcript {
  DialogueHistory history;
  ProactivityLevel level{1};
};
Transcript transcript_from_json(const nlohmann::json& j);

}  // namespace proactiva

#endif  // PROACTIVA_TYPES_H_
