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

#include "proactiva/eval.h"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "proactiva/error.h"

namespace proactiva {

using nlohmann::json;

AggregatedLabel aggregate(const AnnotationTriple& t) {
  const auto& s = t.scores;
  AggregatedLabel out{t.dialogue_id, std::nullopt};
  if (s[0] == s[1] || s[0] == s[2]) {
    out.label = s[0];
  } else if (s[1] == s[2]) {
    out.label = s[1];
  }
  return out;
}

std::size_t retained_count(std::span<const AggregatedLabel> labels) {
  std::size_t n = 0;
  for (const auto& l : labels) n += l.retained() ? 1 : 0;
  return n;
}

double attainment_rate(std::span<const AggregatedLabel> labels, int n) {
  const auto retained = retained_count(labels);
  if (retained == 0) throw Error(ErrorCode::kNoRetainedLabels, "no retained dialogues");
  std::size_t hits = 0;
  for (const auto& l : labels) hits += (l.retained() && *l.label == n) ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(retained);
}

double success_rate(std::span<const AggregatedLabel> labels) {
  return 100.0 - attainment_rate(labels, 0);
}

EvalReport build_report(std::span<const LabeledDialogue> dialogues, std::string judge_kind,
                        std::map<std::string, std::string> run_metadata) {
  EvalReport report;
  report.judge_kind = std::move(judge_kind);
  report.run_metadata = std::move(run_metadata);

  std::map<int, std::vector<AggregatedLabel>> by_level;
  std::vector<AggregatedLabel> all;
  for (const auto& d : dialogues) {
    by_level[d.level.value()].push_back(d.label);
    all.push_back(d.label);
    if (!d.label.retained()) ++report.discarded_count;
  }
  for (const auto& [level, labels] : by_level) {
    const auto retained = retained_count(labels);
    if (retained == 0) continue;
    LevelStats stats;
    stats.n_dialogues = retained;
    stats.discarded = labels.size() - retained;
    for (int n = 0; n <= 5; ++n) {
      stats.attainment_pct[static_cast<std::size_t>(n)] = attainment_rate(labels, n);
    }
    stats.success_rate_pct = success_rate(labels);
    report.per_level.emplace(level, stats);
  }
  if (retained_count(all) > 0) report.overall_success_rate_pct = success_rate(all);
  return report;
}

json to_json(const EvalReport& report) {
  json levels = json::object();
  for (const auto& [level, s] : report.per_level) {
    levels[std::to_string(level)] = {{"n_dialogues", s.n_dialogues},
                                     {"discarded", s.discarded},
                                     {"success_rate_pct", s.success_rate_pct},
                                     {"attainment_pct", s.attainment_pct}};
  }
  return json{{"per_level", levels},
              {"overall_success_rate_pct", report.overall_success_rate_pct
                                               ? json(*report.overall_success_rate_pct)
                                               : json(nullptr)},
              {"discarded_count", report.discarded_count},
              {"judge_kind", report.judge_kind},
              {"run_metadata", report.run_metadata}};
}

EvalReport report_from_json(const json& j) {
  EvalReport report;
  try {
    for (const auto& [key, s] : j.at("per_level").items()) {
      LevelStats stats;
      stats.n_dialogues = s.at("n_dialogues").get<std::size_t>();
      stats.discarded = s.at("discarded").get<std::size_t>();
      stats.success_rate_pct = s.at("success_rate_pct").get<double>();
      stats.attainment_pct = s.at("attainment_pct").get<std::array<double, 6>>();
      report.per_level.emplace(ProactivityLevel(std::stoi(key)).value(), stats);
    }
    const auto& overall = j.at("overall_success_rate_pct");
    if (!overall.is_null()) report.overall_success_rate_pct = overall.get<double>();
    report.discarded_count = j.at("discarded_count").get<std::size_t>();
    report.judge_kind = j.at("judge_kind").get<std::string>();
    report.run_metadata = j.at("run_metadata").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("bad report: ") + e.what());
  }
  return report;
}

std::string render_report_table(const EvalReport& report) {
  std::string out = "Proactivity attainment rate (%) by strategy level (judge: " +
                    report.judge_kind + ")\n";
  char buf[64];
  out += "Strategy";
  for (int score = 0; score <= 5; ++score) {
    std::snprintf(buf, sizeof(buf), " | %8s", ("Score " + std::to_string(score)).c_str());
    out += buf;
  }
  out += " | Success |     N\n";
  for (int level = 1; level <= 5; ++level) {
    std::snprintf(buf, sizeof(buf), "%8d", level);
    out += buf;
    auto it = report.per_level.find(level);
    if (it == report.per_level.end()) {
      for (int score = 0; score <= 5; ++score) out += " |        -";
      out += " |       - |     0\n";
      continue;
    }
    const auto& s = it->second;
    for (int score = 0; score <= 5; ++score) {
      const double v = s.attainment_pct[static_cast<std::size_t>(score)];
      if (score == level) {
        std::snprintf(buf, sizeof(buf), " | [%6.2f]", v);
      } else {
        std::snprintf(buf, sizeof(buf), " |   %6.2f", v);
      }
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), " | %7.2f | %5zu\n", s.success_rate_pct, s.n_dialogues);
    out += buf;
  }
  if (report.overall_success_rate_pct) {
    std::snprintf(buf, sizeof(buf), "%.2f", *report.overall_success_rate_pct);
    out += std::string("Overall success rate: ") + buf + "%\n";
  } else {
    out += "Overall success rate: -\n";
  }
  out += "Discarded dialogues: " + std::to_string(report.discarded_count) + "\n";
  return out;
}

namespace {

DialogueRecord evaluate_one(const EvalConfig& config, const SimulatedUserGoal& goal) {
  DialogueRecord record{goal, run_dialogue(*config.engine, *config.simulator_backend, goal), {},
                        {goal.id, std::nullopt}};
  const TaskContext task{goal.goal_description, std::nullopt};
  for (const auto* judge : config.judges) {
    if (record.outcome.terminated == Termination::kError) {
      record.scores.push_back({0, "dialogue failed: " + record.outcome.error});
      continue;
    }
    try {
      record.scores.push_back(judge->score(record.outcome.conversation, task));
    } catch (const Error& e) {
      record.scores.push_back({0, std::string("judge failed: ") + e.what()});
    }
  }
  if (record.scores.size() == 1) {
    record.label.label = record.scores.front().value;
  } else {
    record.label = aggregate(AnnotationTriple{
        goal.id, {record.scores[0].value, record.scores[1].value, record.scores[2].value}});
  }
  return record;
}

}  // namespace

EvalRun run_evaluation(const EvalConfig& config) {
  if (config.goals.empty()) throw Error(ErrorCode::kInvalidConfig, "no evaluation goals");
  if (config.judges.size() != 1 && config.judges.size() != 3) {
    throw Error(ErrorCode::kInvalidConfig, "use one judge or three judges");
  }
  if (config.engine == nullptr || config.simulator_backend == nullptr) {
    throw Error(ErrorCode::kInvalidConfig, "engine and simulator backend are required");
  }
  if (config.workers < 1) throw Error(ErrorCode::kInvalidConfig, "workers must be >= 1");
  for (const auto& g : config.goals) g.validate();

  std::vector<std::optional<DialogueRecord>> slots(config.goals.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (auto i = next++; i < config.goals.size(); i = next++) {
      slots[i] = evaluate_one(config, config.goals[i]);
    }
  };
  const auto n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(config.workers), config.goals.size());
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();

  EvalRun run;
  std::vector<LabeledDialogue> labeled;
  for (auto& slot : slots) {
    labeled.push_back({slot->goal.level, slot->label});
    run.dialogues.push_back(std::move(*slot));
  }
  const auto kind = config.judges.size() == 1
                        ? std::string(judge_kind_name(config.judges.front()->kind()))
                        : std::string(judge_kind_name(config.judges.front()->kind())) + "x3";
  run.report = build_report(labeled, kind, config.run_metadata);
  return run;
}

void write_eval_outputs(const EvalRun& run, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "transcripts");
  fs::create_directories(fs::path(out_dir) / "traces");
  auto write = [](const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    out << content;
  };
  write(fs::path(out_dir) / "report.json", to_json(run.report).dump(2) + "\n");
  write(fs::path(out_dir) / "report.txt", render_report_table(run.report));
  for (const auto& d : run.dialogues) {
    auto transcript = transcript_to_json(d.outcome.conversation, d.goal.level);
    transcript["terminated"] = termination_name(d.outcome.terminated);
    if (!d.outcome.error.empty()) transcript["error"] = d.outcome.error;
    json scores = json::array();
    for (const auto& s : d.scores) scores.push_back({{"value", s.value}, {"rationale", s.rationale}});
    transcript["scores"] = scores;
    transcript["label"] = d.label.label ? json(*d.label.label) : json(nullptr);
    write(fs::path(out_dir) / "transcripts" / (d.goal.id + ".json"), transcript.dump(2) + "\n");

    std::string traces;
    for (const auto& r : d.outcome.responses) {
      traces += audit_record(d.goal.id, d.goal.level, r).dump() + "\n";
    }
    write(fs::path(out_dir) / "traces" / (d.goal.id + ".jsonl"), traces);
  }
}

}  // namespace proactiva
