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

#include "proactiva/react.h"

#include <cctype>

#include "proactiva/error.h"
#include "proactiva/knowledge_base.h"
#include "proactiva/text.h"

namespace proactiva {

using nlohmann::json;

namespace {

std::string_view action_kind_name(ActionKind kind) {
  switch (kind) {
    case ActionKind::kSearch: return "search";
    case ActionKind::kGetProactivityStrategy: return "get_proactivity_strategy";
    case ActionKind::kFinish: return "finish";
  }
  return "finish";
}

int parse_level_argument(std::string_view arg) {
  auto t = text::trim(arg);
  int value = 0;
  if (t.empty() || t.size() > 2) {
    throw Error(ErrorCode::kInvalidLevel, "strategy argument '" + std::string(arg) + "'");
  }
  for (char c : t) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw Error(ErrorCode::kInvalidLevel, "strategy argument '" + std::string(arg) + "'");
    }
    value = value * 10 + (c - '0');
  }
  return ProactivityLevel(value).value();
}

// Parses "name[arg]" (the text after "Action:").
Action parse_action_call(std::string_view call, std::string_view raw) {
  call = text::trim(call);
  auto open = call.find('[');
  auto close = call.rfind(']');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw UnparsableStep(std::string(raw));
  }
  auto name = text::to_lower(text::trim(call.substr(0, open)));
  auto arg = std::string(text::trim(call.substr(open + 1, close - open - 1)));
  if (name == "search") {
    if (arg.empty()) throw UnparsableStep(std::string(raw));
    return Action::search(std::move(arg));
  }
  if (name == "get_proactivity_strategy") return Action::strategy(parse_level_argument(arg));
  if (name == "finish") {
    if (arg.empty()) throw UnparsableStep(std::string(raw));
    return Action::finish(std::move(arg));
  }
  throw UnparsableStep(std::string(raw));
}

}  // namespace

json to_json(const ReActStep& step) {
  json j{{"thought", step.thought},
         {"action", action_kind_name(step.action.kind)},
         {"argument", step.action.argument}};
  if (step.observation) j["observation"] = *step.observation;
  return j;
}

json to_json(const ReActTrace& trace) {
  json steps = json::array();
  for (const auto& s : trace.steps) steps.push_back(to_json(s));
  return json{{"steps", steps},
              {"final_answer", trace.final_answer},
              {"reflect_attempts", trace.reflect_attempts},
              {"reflected_ok", trace.reflected_ok},
              {"truncated", trace.truncated}};
}

std::string render_action(const Action& action) {
  return std::string(action_kind_name(action.kind)) + "[" + action.argument + "]";
}

std::string render_step(const ParsedStep& step) {
  std::string out = "Thought: " + step.thought + "\n";
  if (step.action.kind == ActionKind::kFinish) {
    out += "Final Answer: " + step.action.argument;
  } else {
    out += "Action: " + render_action(step.action);
  }
  return out;
}

ParsedStep parse_step(std::string_view raw) {
  if (text::trim(raw).empty()) throw UnparsableStep(std::string(raw));
  auto lines = text::split_lines(raw);
  std::vector<std::string> thought;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = text::trim(lines[i]);
    if (text::starts_with_ci(line, "Final Answer:")) {
      std::string answer(text::trim(line.substr(13)));
      for (std::size_t j = i + 1; j < lines.size(); ++j) answer += "\n" + lines[j];
      answer = std::string(text::trim(answer));
      if (answer.empty()) throw UnparsableStep(std::string(raw));
      return ParsedStep{text::join(thought, "\n"), Action::finish(std::move(answer))};
    }
    if (text::starts_with_ci(line, "Action:")) {
      return ParsedStep{text::join(thought, "\n"), parse_action_call(line.substr(7), raw)};
    }
    if (text::starts_with_ci(line, "Thought:")) line = text::trim(line.substr(8));
    if (!line.empty()) thought.emplace_back(line);
  }
  throw UnparsableStep(std::string(raw));
}

ChatRequest build_react_prompt(const EngineConfig& config, const DialogueHistory& history,
                               std::string_view rewritten_question, std::string_view strategy_text,
                               std::span<const ReActStep> prior_steps, InputKind kind,
                               std::string_view correction) {
  std::string system =
      "You are an in-vehicle conversational assistant (IVCA) talking with a driver.\n"
      "Work in steps. In each step write a line starting with \"Thought:\" with your "
      "reasoning, followed by exactly one of:\n"
      "Action: search[<question>]  - look up the in-vehicle knowledge bases with a question\n"
      "Action: get_proactivity_strategy[<number>]  - read the interaction strategy for a "
      "proactivity level from 1 to 5\n"
      "Final Answer: <your reply to the driver>\n"
      "After an Action, stop writing; the action's result will be returned to you before "
      "your next step. Give the Final Answer when you know what to say. It must follow "
      "the proactivity strategy below.\n\n"
      "Proactivity strategy:\n";
  system += strategy_text;

  std::string user = "Conversation so far:\n";
  auto rendered = render_history(history);
  user += rendered.empty() ? "(none)" : rendered;
  user += "\n\n";
  if (kind == InputKind::kQuestion) {
    user += "Question: " + std::string(rewritten_question) + "\n";
  } else {
    user += "Event: " + std::string(rewritten_question) +
            "\nOpen the conversation with the driver.\n";
  }
  for (const auto& step : prior_steps) {
    user += "Thought: " + step.thought + "\n";
    user += "Action: " + render_action(step.action) + "\n";
    user += std::string(kObservationStop) + " " + step.observation.value_or("") + "\n";
  }
  if (!correction.empty()) user += std::string(correction) + "\n";
  user += "Thought:";

  ChatRequest request;
  request.messages.push_back({Role::kSystem, std::move(system)});
  request.messages.push_back({Role::kUser, std::move(user)});
  request.temperature = config.temperature;
  request.stop_sequences = {std::string(kObservationStop)};
  return request;
}

std::string execute_action(const Action& action, const ActionContext& context) {
  switch (action.kind) {
    case ActionKind::kGetProactivityStrategy:
      return get_proactivity_strategy(context.catalog, parse_level_argument(action.argument));
    case ActionKind::kSearch: {
      if (context.store.empty()) return std::string(kNoResults);
      auto hits = context.store.top_k(context.embedder.embed(action.argument),
                                      static_cast<std::size_t>(context.retrieval_k));
      std::vector<std::string> lines;
      for (const auto& hit : hits) {
        auto it = hit.payload_meta.find("scenario");
        std::string prefix = it == hit.payload_meta.end() ? "" : "[" + it->second + "] ";
        lines.push_back(prefix + hit.payload_text);
      }
      return text::join(lines, "\n");
    }
    case ActionKind::kFinish:
      break;
  }
  throw Error(ErrorCode::kPreconditionFailed, "Finish has no observation");
}

Verdict parse_verdict(std::string_view reply) {
  auto lines = text::split_lines(reply);
  std::size_t i = 0;
  while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
  if (i == lines.size()) return {};

  auto first = text::trim(lines[i]);
  while (!first.empty() && (first.front() == '*' || first.front() == '#')) first.remove_prefix(1);
  std::size_t word_end = 0;
  while (word_end < first.size() && std::isalpha(static_cast<unsigned char>(first[word_end]))) {
    ++word_end;
  }
  auto word = text::to_lower(first.substr(0, word_end));
  if (word == "yes") return {true, true, ""};
  if (word != "no") return {};

  auto rest = first.substr(word_end);
  while (!rest.empty() && (rest.front() == '*' || rest.front() == ':' || rest.front() == ',' ||
                           rest.front() == '.' || rest.front() == '-' || std::isspace(static_cast<unsigned char>(rest.front())))) {
    rest.remove_prefix(1);
  }
  std::string correction(rest);
  for (std::size_t j = i + 1; j < lines.size(); ++j) correction += "\n" + lines[j];
  auto c = text::trim(correction);
  for (std::string_view label : {"Corrected response:", "Correction:", "Final Answer:"}) {
    if (text::starts_with_ci(c, label)) c = text::trim(c.substr(label.size()));
  }
  return {false, true, std::string(c)};
}

ChatRequest build_reflect_prompt(std::string_view strategy_text, std::string_view context,
                                 std::string_view candidate, double temperature) {
  std::string user = "Proactivity strategy:\n" + std::string(strategy_text) + "\n\n";
  if (!context.empty()) user += "Conversation:\n" + std::string(context) + "\n\n";
  user += "Candidate response:\n" + std::string(candidate) + "\n\n";
  user +=
      "Does this response follow the strategy? Answer YES or NO on the first line. If NO, "
      "write a corrected response that follows the strategy on the following lines.";
  ChatRequest request;
  request.messages.push_back(
      {Role::kSystem,
       "You review replies of an in-vehicle assistant against its proactivity strategy."});
  request.messages.push_back({Role::kUser, std::move(user)});
  request.temperature = temperature;
  return request;
}

Engine::Engine(EngineConfig config, LlmBackend& backend, const Embedder& embedder,
               const VectorStore& store, const RewriteExampleIndex* examples,
               const StrategyCatalog& catalog)
    : config_(config), backend_(backend), embedder_(embedder), store_(store),
      examples_(examples), catalog_(catalog) {
  config_.validate();
}

ReActTrace Engine::run_react(const DialogueHistory& history, std::string_view question,
                             ProactivityLevel level, InputKind kind) const {
  const auto& strategy = catalog_.spec(level).strategy_text;
  const ActionContext context{store_, embedder_, catalog_, config_.retrieval_k};
  ReActTrace trace;

  for (int i = 0; i < config_.max_react_steps; ++i) {
    auto request = build_react_prompt(config_, history, question, strategy, trace.steps, kind);
    auto next = [&](const ChatRequest& r) {
      auto content = backend_.complete(r).content;
      truncate_at_stop(content, r.stop_sequences);
      trace.prompt_text = r.joined_content();
      return parse_step(content);
    };
    ParsedStep parsed;
    try {
      parsed = next(request);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnparsableStep && e.code() != ErrorCode::kInvalidLevel) throw;
      parsed = next(build_react_prompt(config_, history, question, strategy, trace.steps, kind,
                                       kMalformedNote));
    }

    if (parsed.action.kind == ActionKind::kFinish) {
      trace.final_answer = parsed.action.argument;
      trace.steps.push_back({std::move(parsed.thought), std::move(parsed.action), std::nullopt});
      return trace;
    }
    if (i + 1 == config_.max_react_steps) {
      std::string answer = parsed.thought.empty()
                               ? "Sorry, I couldn't complete that request."
                               : parsed.thought;
      trace.final_answer = answer;
      trace.truncated = true;
      trace.steps.push_back({std::move(parsed.thought), Action::finish(std::move(answer)),
                             std::nullopt});
      return trace;
    }
    auto observation = execute_action(parsed.action, context);
    trace.steps.push_back(
        {std::move(parsed.thought), std::move(parsed.action), std::move(observation)});
  }
  return trace;  // unreachable: max_react_steps >= 1
}

ReActTrace Engine::reflect(ReActTrace trace, std::string_view strategy_text,
                           std::string_view context) const {
  if (trace.final_answer.empty()) {
    throw Error(ErrorCode::kPreconditionFailed, "trace has no final answer to reflect on");
  }
  trace.reflect_attempts = 0;
  trace.reflected_ok = false;
  for (int attempt = 1; attempt <= config_.max_reflect_retries + 1; ++attempt) {
    auto request = build_reflect_prompt(strategy_text, context, trace.final_answer,
                                        config_.temperature);
    auto verdict = parse_verdict(backend_.complete(request).content);
    trace.reflect_attempts = attempt;
    if (verdict.follows) {
      trace.reflected_ok = true;
      break;
    }
    if (!verdict.correction.empty()) trace.final_answer = verdict.correction;
  }
  return trace;
}

RespondResult Engine::respond(ConversationState& state, const TurnInput& input,
                              std::optional<Timestamp> now) const {
  const auto& strategy = catalog_.spec(state.level).strategy_text;
  RespondResult result;
  DialogueHistory next = state.history;

  if (const auto* utterance = std::get_if<UserUtterance>(&input)) {
    if (text::trim(utterance->text).empty()) {
      throw Error(ErrorCode::kEmptyUtterance, "utterance is blank");
    }
    std::string question(text::trim(utterance->text));
    if (examples_ != nullptr) {
      result.rewrite = Rewriter(backend_, *examples_,
                                static_cast<std::size_t>(config_.rewrite_shot_count),
                                config_.temperature)
                           .rewrite(question);
      question = result.rewrite->rewritten;
    }
    auto trace = run_react(state.history, question, state.level, InputKind::kQuestion);
    next = append_turn(next, Speaker::kUser, utterance->text, now);
    result.trace = reflect(std::move(trace), strategy, render_history(next));
  } else {
    const auto& event = std::get<InitiationEvent>(input);
    if (!state.level.assistant_initiates()) {
      throw Error(ErrorCode::kPreconditionFailed,
                  "level " + std::to_string(state.level.value()) +
                      " does not let the assistant open the conversation");
    }
    if (state.history.first_spoken() != nullptr) {
      throw Error(ErrorCode::kPreconditionFailed, "conversation has already started");
    }
    if (text::trim(event.description).empty()) {
      throw Error(ErrorCode::kEmptyUtterance, "initiation event is blank");
    }
    auto trace = run_react(state.history, text::trim(event.description), state.level,
                           InputKind::kEvent);
    result.trace = reflect(std::move(trace), strategy,
                           "Event: " + std::string(text::trim(event.description)));
  }

  result.assistant_text = result.trace.final_answer;
  next = append_turn(next, Speaker::kAssistant, result.assistant_text, now);
  state.history = std::move(next);
  return result;
}

json audit_record(std::string_view session_id, ProactivityLevel level,
                  const RespondResult& result) {
  json j{{"session_id", session_id},
         {"level", level.value()},
         {"rewrite_result", result.rewrite ? to_json(*result.rewrite) : json(nullptr)}};
  auto trace = to_json(result.trace);
  j["steps"] = trace["steps"];
  j["final_answer"] = trace["final_answer"];
  j["reflect_attempts"] = trace["reflect_attempts"];
  j["reflected_ok"] = trace["reflected_ok"];
  j["truncated"] = trace["truncated"];
  return j;
}

AuditLog::AuditLog(const std::string& path) : out_(path, std::ios::app) {
  if (!out_) throw Error(ErrorCode::kIo, "cannot open audit log " + path);
}

void AuditLog::append(const json& record) {
  std::lock_guard lock(mu_);
  out_ << record.dump() << '\n';
  out_.flush();
}

}  // namespace proactiva
