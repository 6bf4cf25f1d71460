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

#include "proactiva/rewriter.h"

#include <fstream>

#include "proactiva/error.h"
#include "proactiva/text.h"

namespace proactiva {

using nlohmann::json;

json to_json(const RewriteResult& result) {
  return json{{"original", result.original},
              {"rewritten", result.rewritten},
              {"examples_used", result.examples_used},
              {"prompt_text", result.prompt_text}};
}

std::vector<RewritePair> parse_rewrite_bank(const json& j) {
  std::vector<RewritePair> bank;
  try {
    for (const auto& item : j) {
      RewritePair p{item.at("id").get<std::string>(), item.at("question").get<std::string>(),
                    item.at("rewrites").get<std::vector<std::string>>()};
      if (text::trim(p.question).empty()) {
        throw Error(ErrorCode::kSchemaViolation, "pair '" + p.id + "' has a blank question");
      }
      if (p.rewrites.empty()) {
        throw Error(ErrorCode::kSchemaViolation, "pair '" + p.id + "' has no rewrites");
      }
      bank.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("bad rewrite bank: ") + e.what());
  }
  return bank;
}

std::vector<RewritePair> load_rewrite_bank(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  try {
    return parse_rewrite_bank(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
}

RewriteExampleIndex::RewriteExampleIndex(std::vector<RewritePair> bank, const Embedder& embedder)
    : bank_(std::move(bank)), embedder_(embedder), store_(embedder.dim()) {
  if (bank_.empty()) throw Error(ErrorCode::kEmptyBank, "rewrite bank is empty");
  for (std::size_t i = 0; i < bank_.size(); ++i) {
    // Position-based ids keep the index valid even if bank ids repeat.
    store_.add(std::to_string(i), embedder_.embed(bank_[i].question), bank_[i].question);
  }
}

std::vector<RewritePair> RewriteExampleIndex::select(std::string_view question,
                                                     std::size_t k) const {
  if (k == 0) return {};
  std::vector<RewritePair> out;
  for (const auto& hit : store_.top_k(embedder_.embed(question), k)) {
    out.push_back(bank_[std::stoul(hit.id)]);
  }
  return out;
}

std::vector<RewritePair> select_examples(std::string_view question,
                                         const std::vector<RewritePair>& bank, std::size_t k,
                                         const Embedder& embedder) {
  return RewriteExampleIndex(bank, embedder).select(question, k);
}

std::vector<RewritePair> usable_examples(std::string_view question,
                                         const std::vector<RewritePair>& examples) {
  auto target = std::string(text::trim(question));
  std::vector<RewritePair> out;
  for (const auto& e : examples) {
    if (e.question.find(target) != std::string::npos) continue;
    if (e.rewrites.front().find(target) != std::string::npos) continue;
    out.push_back(e);
  }
  return out;
}

ChatRequest build_rewrite_prompt(std::string_view question,
                                 const std::vector<RewritePair>& examples, double temperature) {
  std::string user(kRewriteInstruction);
  user += "\n\n";
  for (const auto& e : usable_examples(question, examples)) {
    user += "Input: " + e.question + "\nOutput: " + e.rewrites.front() + "\n\n";
  }
  user += "Input: " + std::string(text::trim(question)) + "\nOutput:";

  ChatRequest request;
  request.messages.push_back(
      {Role::kSystem,
       "You rewrite a driver's casual words into one explicit request for an in-vehicle "
       "assistant. Reply with the rewritten request only, on a single line."});
  request.messages.push_back({Role::kUser, std::move(user)});
  request.temperature = temperature;
  return request;
}

std::string extract_rewrite(std::string_view completion, std::string_view original) {
  for (const auto& line : text::split_lines(completion)) {
    auto t = text::trim(line);
    if (text::starts_with_ci(t, "Output:")) t = text::trim(t.substr(7));
    if (!t.empty()) return std::string(t);
  }
  return std::string(text::trim(original));
}

RewriteResult Rewriter::rewrite(std::string_view question) const {
  if (text::trim(question).empty()) {
    throw Error(ErrorCode::kEmptyUtterance, "nothing to rewrite");
  }
  std::vector<RewritePair> examples;
  if (shot_count_ > 0) {
    // Rank the whole bank so that dropping conflicting pairs still leaves
    // shot_count examples when the bank allows it.
    for (auto& e : usable_examples(question, examples_.select(question, examples_.bank().size()))) {
      if (examples.size() == shot_count_) break;
      examples.push_back(std::move(e));
    }
  }
  auto request = build_rewrite_prompt(question, examples, temperature_);
  auto response = backend_.complete(request);

  RewriteResult result;
  result.original = std::string(text::trim(question));
  result.rewritten = extract_rewrite(response.content, question);
  for (const auto& e : examples) result.examples_used.push_back(e.id);
  result.prompt_text = request.joined_content();
  return result;
}

}  // namespace proactiva
