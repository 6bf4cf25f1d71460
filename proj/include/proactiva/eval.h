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

#ifndef PROACTIVA_EVAL_H_
#define PROACTIVA_EVAL_H_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "proactiva/proactivity.h"
#include "proactiva/user_simulator.h"

namespace proactiva {

struct AnnotationTriple {
  std::string dialogue_id;
  std::array<int, 3> scores{};
};

struct AggregatedLabel {
  std::string dialogue_id;
  std::optional<int> label;  // absent: all three annotators disagreed

  bool retained() const { return label.has_value(); }
};

// Majority of three; discarded when all three differ.
AggregatedLabel aggregate(const AnnotationTriple& triple);

std::size_t retained_count(std::span<const AggregatedLabel> labels);

// 100 * |retained labels == n| / |retained labels|, n in 0..5. Discarded
// labels count in neither numerator nor denominator.
// Throws Error(kNoRetainedLabels).
double attainment_rate(std::span<const AggregatedLabel> labels, int n);

// Share of retained dialogues whose task succeeded (label >= 1); defined as
// 100 - attainment_rate(labels, 0).
double success_rate(std::span<const AggregatedLabel> labels);

struct LevelStats {
  std::size_t n_dialogues = 0;  // retained
  std::size_t discarded = 0;
  double success_rate_pct = 0.0;
  std::array<double, 6> attainment_pct{};  // by achieved score 0..5

  bool operator==(const LevelStats&) const = default;
};

struct EvalReport {
  std::map<int, LevelStats> per_level;  // by strategy level; levels without retained dialogues are absent
  std::optional<double> overall_success_rate_pct;
  std::size_t discarded_count = 0;
  std::string judge_kind;
  std::map<std::string, std::string> run_metadata;

  bool operator==(const EvalReport&) const = default;
};

nlohmann::json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

// Strategy level x achieved score matrix with a success-rate column; the
// diagonal is bracketed.
std::string render_report_table(const EvalReport& report);

struct LabeledDialogue {
  ProactivityLevel level;
  AggregatedLabel label;
};

// Groups labels by strategy level and computes every rate.
EvalReport build_report(std::span<const LabeledDialogue> dialogues, std::string judge_kind,
                        std::map<std::string, std::string> run_metadata = {});

struct DialogueRecord {
  SimulatedUserGoal goal;
  DialogueOutcome outcome;
  std::vector<ProactivityScore> scores;  // one per judge
  AggregatedLabel label;
};

struct EvalConfig {
  std::vector<SimulatedUserGoal> goals;
  const Engine* engine = nullptr;
  LlmBackend* simulator_backend = nullptr;
  std::vector<const Judge*> judges;  // one, or three for majority aggregation
  int workers = 4;
  std::map<std::string, std::string> run_metadata;
};

struct EvalRun {
  EvalReport report;
  std::vector<DialogueRecord> dialogues;  // in goal order
};

// Throws Error(kInvalidConfig) before running anything when the goal list is
// empty or the judge count is not 1 or 3. Dialogues that fail score 0.
EvalRun run_evaluation(const EvalConfig& config);

// report.json, report.txt, transcripts/<goal>.json and traces/<goal>.jsonl.
void write_eval_outputs(const EvalRun& run, const std::string& out_dir);

}  // namespace proactiva

#endif  // PROACTIVA_EVAL_H_
