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

#ifndef PROACTIVA_REWRITER_H_
#define PROACTIVA_REWRITER_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "proactiva/embedding.h"
#include "proactiva/llm.h"

namespace proactiva {

// A casual utterance and the explicit task questions it may map to. Only the
// first rewrite is shown to the model; the rest are alternatives a judge may
// accept.
struct RewritePair {
  std::string id;
  std::string question;
  std::vector<std::string> rewrites;

  bool operator==(const RewritePair&) const = default;
};

struct RewriteResult {
  std::string original;
  std::string rewritten;
  std::vector<std::string> examples_used;
  std::string prompt_text;
};

nlohmann::json to_json(const RewriteResult& result);

// Bank file: [{"id": ..., "question": ..., "rewrites": [...]}, ...]
std::vector<RewritePair> parse_rewrite_bank(const nlohmann::json& j);
std::vector<RewritePair> load_rewrite_bank(const std::string& path);

inline constexpr std::string_view kRewriteInstruction =
    "Convert users' expressions into in-vehicle task-oriented questions.";

// Embedded bank questions, built once.
class RewriteExampleIndex {
 public:
  // Throws Error(kEmptyBank).
  RewriteExampleIndex(std::vector<RewritePair> bank, const Embedder& embedder);

  const std::vector<RewritePair>& bank() const { return bank_; }

  // Up to k pairs by descending similarity of their questions to `question`;
  // ties keep bank order.
  std::vector<RewritePair> select(std::string_view question, std::size_t k) const;

 private:
  std::vector<RewritePair> bank_;
  const Embedder& embedder_;
  VectorStore store_;
};

// Throws Error(kEmptyBank) for an empty bank.
std::vector<RewritePair> select_examples(std::string_view question,
                                         const std::vector<RewritePair>& bank, std::size_t k,
                                         const Embedder& embedder);

// Examples whose text contains the target question verbatim cannot be shown
// without repeating the target, so they are dropped.
std::vector<RewritePair> usable_examples(std::string_view question,
                                         const std::vector<RewritePair>& examples);

// System instruction, then one "Input: ...\nOutput: ..." block per usable
// example, then "Input: {question}\nOutput:".
ChatRequest build_rewrite_prompt(std::string_view question,
                                 const std::vector<RewritePair>& examples,
                                 double temperature = 0.0);

// First non-blank line of the completion, without an echoed "Output:" label.
// Blank completions fall back to `original`.
std::string extract_rewrite(std::string_view completion, std::string_view original);

class Rewriter {
 public:
  Rewriter(LlmBackend& backend, const RewriteExampleIndex& examples, std::size_t shot_count,
           double temperature = 0.0)
      : backend_(backend), examples_(examples), shot_count_(shot_count),
        temperature_(temperature) {}

  // Throws Error(kEmptyUtterance) for a blank question; backend errors propagate.
  RewriteResult rewrite(std::string_view question) const;

 private:
  LlmBackend& backend_;
  const RewriteExampleIndex& examples_;
  std::size_t shot_count_;
  double temperature_;
};

}  // namespace proactiva

#endif  // PROACTIVA_REWRITER_H_
