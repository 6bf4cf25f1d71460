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

#include "proactiva/proactivity.h"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "proactiva/error.h"
#include "proactiva/text.h"

namespace proactiva {

namespace {

StrategySpec make_spec(int level, Assumption assumption, Autonomy autonomy, UserControl control,
                       std::string title, std::string text) {
  StrategySpec s;
  s.level = ProactivityLevel(level);
  s.assumption = assumption;
  s.autonomy = autonomy;
  s.user_control = control;
  s.title = std::move(title);
  s.strategy_text = std::move(text);
  s.assistant_initiates = s.level.assistant_initiates();
  return s;
}

constexpr std::string_view kRubric =
    R"(# Proactivity scoring rubric

Score one finished conversation between a driver and an in-vehicle
conversational assistant (IVCA). Give exactly one integer from 0 to 5.

0  The driver's task was not completed (the assistant refused, failed, or
   never addressed the request).

For completed tasks, decide who opened the conversation.

The assistant opened the conversation (assistant-initiated):
4  The assistant anticipated a need and proposed an action, but asked the
   driver to confirm or adjust before executing it.
   Example: "IVCA: Would you like me to set the air conditioning to your
   preferred temperature of 25 degrees Celsius? Driver: Yes."
5  The assistant anticipated a need and executed (or announced it is
   executing) the action on its own, with a short explanation. The driver
   may still stop it.
   Example: "IVCA: You're in the car. I'll adjust the air conditioning to
   your preferred temperature. Driver: No, thanks."

The driver opened the conversation:
1  The driver gave an explicit instruction and the assistant simply carried
   it out, without assumptions or confirmation questions.
   Example: "Driver: Please turn on the air conditioner. IVCA: Sure."
2  The driver described a state or problem; the assistant inferred a need
   and asked for confirmation before taking any action.
   Example: "Driver: I'm feeling hot. IVCA: Shall I activate the air
   conditioning for you?"
3  The driver described a state or problem; the assistant inferred a need,
   announced that it is acting, and asked only for minimal input.
   Example: "Driver: I'm feeling hot. IVCA: I will activate the air
   conditioning for you. How about 25 degrees Celsius?"

Levels 4 and 5 are only possible when the assistant speaks first. Between 2
and 3 (and between 4 and 5), the assistant's first move decides: a question
asked before any action means confirm-first (2 or 4); an action announced
before any question means act-first (3 or 5).

Reply format:
Score: <0-5>
Rationale: <one sentence>
)";

}  // namespace

StrategyCatalog::StrategyCatalog()
    : specs_{
          make_spec(1, Assumption::kNone, Autonomy::kNone, UserControl::kFullControl,
                    "No assumption, no autonomy",
                    "Proactivity level 1.\n"
                    "Assumption: make no assumptions about what the driver needs; passively "
                    "receive the driver's explicit instructions and execute them.\n"
                    "Autonomy: never take an action the driver did not ask for.\n"
                    "User control: the driver has full control over everything you do.\n"
                    "Example:\n"
                    "Driver: Please turn on the air conditioner.\n"
                    "IVCA: Sure."),
          make_spec(2, Assumption::kSome, Autonomy::kConfirmFirst,
                    UserControl::kConfirmationRequired, "Some assumption, confirm first",
                    "Proactivity level 2.\n"
                    "Assumption: make a preliminary judgment from the limited information in "
                    "the driver's words; point out the likely issue or suggest a possible "
                    "solution.\n"
                    "Autonomy: do not act on the assumption yourself. Ask, and wait for the "
                    "driver's confirmation before taking any proactive step.\n"
                    "User control: confirmation is required before every action.\n"
                    "Example:\n"
                    "Driver: I'm feeling hot.\n"
                    "IVCA: Shall I activate the air conditioning for you?\n"
                    "Driver: Go ahead."),
          make_spec(3, Assumption::kSome, Autonomy::kActWithMinimalInput,
                    UserControl::kMinimalInput, "Some assumption, act with minimal input",
                    "Proactivity level 3.\n"
                    "Assumption: as at level 2, infer the driver's likely need from limited "
                    "information.\n"
                    "Autonomy: announce the action you are taking and carry it out; ask only for "
                    "the minimal input you need (such as a setting value) and act on it.\n"
                    "User control: the driver only supplies minimal input during the "
                    "interaction.\n"
                    "Example:\n"
                    "Driver: I'm feeling hot.\n"
                    "IVCA: I will activate the air conditioning for you. How about 25 degrees "
                    "Celsius okay?\n"
                    "Driver: Sounds good. Thanks"),
          make_spec(4, Assumption::kStrong, Autonomy::kProposeThenConfirm,
                    UserControl::kConfirmBeforeExecute, "Strong assumption, propose then confirm",
                    "Proactivity level 4.\n"
                    "Assumption: anticipate needs from the driver's history, preferences and the "
                    "driving context. You may start the conversation yourself and offer "
                    "personalized suggestions.\n"
                    "Autonomy: propose the action, but do not execute it until the driver "
                    "confirms or adjusts the proposal.\n"
                    "User control: the driver confirms or adjusts every proposal before "
                    "execution.\n"
                    "Example:\n"
                    "IVCA: Would you like me to set the air conditioning to your preferred "
                    "temperature of 25 degrees Celsius?\n"
                    "Driver: Yes, that would be helpful.\n"
                    "IVCA: The temperature has been set."),
          make_spec(5, Assumption::kStrong, Autonomy::kActWithExplanation,
                    UserControl::kInterveneToStop, "Strong assumption, act with explanation",
                    "Proactivity level 5.\n"
                    "Assumption: as at level 4, anticipate needs from history, preferences and "
                    "context, and start the conversation yourself when useful.\n"
                    "Autonomy: execute the anticipated action automatically and briefly explain "
                    "what you are doing and why. Do not ask for permission first.\n"
                    "User control: the driver can intervene to stop the action.\n"
                    "Example:\n"
                    "IVCA: You're in the car. I'll adjust the air conditioning to your preferred "
                    "temperature of 25 degrees Celsius.\n"
                    "Driver: No, thanks."),
      } {}

const StrategySpec& StrategyCatalog::spec(ProactivityLevel level) const {
  return specs_[static_cast<std::size_t>(level.value() - 1)];
}

const StrategyCatalog& default_catalog() {
  static const StrategyCatalog catalog;
  return catalog;
}

const std::string& get_proactivity_strategy(const StrategyCatalog& catalog, int level) {
  return catalog.spec(ProactivityLevel(level)).strategy_text;
}

std::string_view rubric_text() { return kRubric; }

std::string_view judge_kind_name(JudgeKind kind) {
  return kind == JudgeKind::kKeyword ? "keyword" : "llm";
}

namespace rubric {

namespace {

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || c == '\'') {
      cur += static_cast<char>(std::tolower(uc));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string normalize_quotes(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    // U+2019 RIGHT SINGLE QUOTATION MARK
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
        static_cast<unsigned char>(s[i + 1]) == 0x80 &&
        static_cast<unsigned char>(s[i + 2]) == 0x99) {
      out += '\'';
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

bool has_phrase(const std::vector<std::string>& tokens, std::string_view phrase) {
  auto p = words(phrase);
  if (p.empty() || p.size() > tokens.size()) return false;
  for (std::size_t i = 0; i + p.size() <= tokens.size(); ++i) {
    if (std::equal(p.begin(), p.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) return true;
  }
  return false;
}

bool starts_with_phrase(const std::vector<std::string>& tokens, std::size_t at,
                        std::string_view phrase) {
  auto p = words(phrase);
  if (at + p.size() > tokens.size()) return false;
  return std::equal(p.begin(), p.end(), tokens.begin() + static_cast<std::ptrdiff_t>(at));
}

constexpr std::string_view kConfirmPhrases[] = {
    "shall i",        "should i",         "would you like me", "would you like",
    "do you want me", "do you want",      "do you need me",    "do you need",
    "may i",          "can i",            "want me to",        "are you interested",
    "is that okay",   "is it okay",       "okay with you",
};

constexpr std::string_view kActionPhrases[] = {
    "i will",      "i'll",        "i'm",        "i am",       "i've",       "i have",
    "has been",    "have been",   "is now",     "are now",    "done",       "let me",
    "i recommend", "i suggest",   "activating", "adjusting",  "turning on", "turning off",
    "opening",     "closing",     "setting",    "playing",    "starting",
};

constexpr std::string_view kLeadIns[] = {
    "hi",           "hey",       "hello",           "ok",          "okay",
    "please",       "kindly",    "could you",       "can you",     "would you",
    "will you",     "help me",   "i want to",       "i'd like to", "i would like to",
    "i need you to", "just",
};

constexpr std::string_view kCommandVerbs[] = {
    "turn",   "switch",  "open",   "close",    "activate", "deactivate", "enable",
    "disable", "adjust", "set",    "play",     "start",    "stop",       "pause",
    "resume", "navigate", "call",  "dial",     "increase", "decrease",   "raise",
    "lower",  "listen",  "put",    "tune",     "show",     "find",       "check",
    "lock",   "unlock",  "change", "roll",     "shut",     "read",       "send",
    "search", "plan",    "book",   "reduce",   "mute",     "unmute",     "skip",
    "route",  "dim",     "brighten", "heat",   "cool",     "fold",       "move",
};

}  // namespace

std::vector<std::string> split_sentences(std::string_view raw) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    cur += raw[i];
    const char c = raw[i];
    const bool terminator = c == '.' || c == '!' || c == '?';
    const bool at_break =
        i + 1 == raw.size() || std::isspace(static_cast<unsigned char>(raw[i + 1])) != 0;
    if (terminator && at_break) {
      auto t = text::trim(cur);
      if (!t.empty()) out.emplace_back(t);
      cur.clear();
    }
  }
  auto t = text::trim(cur);
  if (!t.empty()) out.emplace_back(t);
  return out;
}

MoveKind classify_sentence(std::string_view sentence) {
  auto s = normalize_quotes(text::trim(sentence));
  auto tokens = words(s);
  if (tokens.empty()) return MoveKind::kNone;
  const bool asks = !s.empty() && s.back() == '?';
  for (auto phrase : kConfirmPhrases) {
    if (starts_with_phrase(tokens, 0, phrase) || (asks && has_phrase(tokens, phrase))) {
      return MoveKind::kConfirmationQuestion;
    }
  }
  if (asks) return MoveKind::kQuestion;
  for (auto phrase : kActionPhrases) {
    if (has_phrase(tokens, phrase)) return MoveKind::kAction;
  }
  return MoveKind::kNone;
}

bool is_explicit_command(std::string_view utterance) {
  auto tokens = words(normalize_quotes(utterance));
  std::size_t at = 0;
  for (bool stripped = true; stripped && at < tokens.size();) {
    stripped = false;
    for (auto lead : kLeadIns) {
      if (starts_with_phrase(tokens, at, lead)) {
        at += words(lead).size();
        stripped = true;
        break;
      }
    }
  }
  if (at >= tokens.size()) return false;
  return std::find(std::begin(kCommandVerbs), std::end(kCommandVerbs), tokens[at]) !=
         std::end(kCommandVerbs);
}

bool is_refusal(std::string_view assistant_text) {
  auto tokens = words(normalize_quotes(assistant_text));
  const bool apologetic = has_phrase(tokens, "sorry") || has_phrase(tokens, "apologize");
  if (!apologetic) return false;
  for (auto p : {"can't", "cannot", "can not", "unable", "not able", "not possible",
                 "don't have", "do not have", "can't help"}) {
    if (has_phrase(tokens, p)) return true;
  }
  return false;
}

}  // namespace rubric

ProactivityScore keyword_rubric(const DialogueHistory& conversation, const TaskContext& task) {
  using rubric::MoveKind;
  if (conversation.count(Speaker::kAssistant) == 0) {
    throw Error(ErrorCode::kEmptyConversation, "no assistant turn to judge");
  }

  bool met = false;
  if (task.goal_met.has_value()) {
    met = *task.goal_met;
  } else {
    for (const auto& t : conversation.turns()) {
      if (t.speaker == Speaker::kAssistant && !rubric::is_refusal(t.text)) met = true;
    }
  }
  if (!met) return {0, "the task was not completed"};

  // First assistant move that is a question or an action, across all
  // assistant turns in order.
  MoveKind first_move = MoveKind::kNone;
  for (const auto& t : conversation.turns()) {
    if (t.speaker != Speaker::kAssistant) continue;
    for (const auto& sentence : rubric::split_sentences(t.text)) {
      auto kind = rubric::classify_sentence(sentence);
      if (kind != MoveKind::kNone) {
        first_move = kind;
        break;
      }
    }
    if (first_move != MoveKind::kNone) break;
  }
  const bool asked_first =
      first_move == MoveKind::kQuestion || first_move == MoveKind::kConfirmationQuestion;

  const Turn* opener = conversation.first_spoken();
  if (opener->speaker == Speaker::kAssistant) {
    if (asked_first) return {4, "assistant opened the conversation and asked before acting"};
    return {5, "assistant opened the conversation and acted with an explanation"};
  }

  if (rubric::is_explicit_command(opener->text) &&
      first_move != MoveKind::kConfirmationQuestion) {
    return {1, "driver gave an explicit instruction and the assistant executed it"};
  }
  if (asked_first) return {2, "assistant inferred a need and asked for confirmation first"};
  if (first_move == MoveKind::kAction) {
    return {3, "assistant inferred a need and announced the action with minimal input"};
  }
  return {1, "assistant responded without assumptions"};
}

ChatRequest LlmRubricJudge::build_request(const DialogueHistory& conversation,
                                          const TaskContext& task, double temperature) {
  ChatRequest request;
  request.messages.push_back({Role::kSystem, std::string(rubric_text())});
  std::string user = "Driver's goal: " + task.goal_description + "\n\nConversation:\n" +
                     render_history(conversation) + "\n\nScore this conversation.";
  request.messages.push_back({Role::kUser, std::move(user)});
  request.temperature = temperature;
  return request;
}

ProactivityScore LlmRubricJudge::parse_reply(std::string_view reply) {
  ProactivityScore score{-1, ""};
  for (const auto& line : text::split_lines(reply)) {
    auto t = text::trim(line);
    if (score.value < 0 && text::starts_with_ci(t, "score")) {
      for (char c : t.substr(5)) {
        if (c >= '0' && c <= '5') {
          score.value = c - '0';
          break;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) break;
      }
    } else if (text::starts_with_ci(t, "rationale:")) {
      score.rationale = std::string(text::trim(t.substr(10)));
    }
  }
  if (score.value < 0) {
    throw Error(ErrorCode::kMalformedResponse, "judge reply has no score: " + std::string(reply));
  }
  if (score.rationale.empty()) score.rationale = "llm rubric judge";
  return score;
}

ProactivityScore LlmRubricJudge::score(const DialogueHistory& conversation,
                                       const TaskContext& task) const {
  if (conversation.count(Speaker::kAssistant) == 0) {
    throw Error(ErrorCode::kEmptyConversation, "no assistant turn to judge");
  }
  auto score = parse_reply(backend_.complete(build_request(conversation, task, temperature_)).content);
  // Only an assistant-opened conversation can show levels 4 and 5.
  const Turn* opener = conversation.first_spoken();
  if (score.value >= 4 && opener->speaker != Speaker::kAssistant) {
    score.value = 3;
    score.rationale += " (capped: driver opened the conversation)";
  }
  return score;
}

}  // namespace proactiva
