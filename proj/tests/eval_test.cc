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

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>

#include "proactiva/eval.h"
#include "proactiva/knowledge_base.h"
#include "test_support.h"

namespace proactiva {
namespace {

AggregatedLabel label(std::optional<int> v) { return {"d", v}; }

std::vector<AggregatedLabel> labels_of(std::initializer_list<int> values) {
  std::vector<AggregatedLabel> out;
  for (int v : values) out.push_back(label(v));
  return out;
}

TEST(Aggregate, MajorityOrDiscard) {
  EXPECT_EQ(aggregate({"a", {2, 2, 3}}).label, 2);
  EXPECT_EQ(aggregate({"a", {3, 2, 2}}).label, 2);
  EXPECT_EQ(aggregate({"a", {2, 3, 2}}).label, 2);
  EXPECT_EQ(aggregate({"a", {4, 4, 4}}).label, 4);
  EXPECT_FALSE(aggregate({"a", {1, 2, 3}}).retained());
  EXPECT_EQ(aggregate({"xyz", {0, 0, 5}}).dialogue_id, "xyz");
}

TEST(Aggregate, ExhaustiveAgainstCountingOracle) {
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; b <= 5; ++b)
      for (int c = 0; c <= 5; ++c) {
        std::map<int, int> counts;
        ++counts[a];
        ++counts[b];
        ++counts[c];
        std::optional<int> expected;
        for (auto [v, n] : counts) {
          if (n >= 2) expected = v;
        }
        ASSERT_EQ(aggregate({"x", {a, b, c}}).label, expected) << a << b << c;
      }
}

TEST(Rates, HandComputed) {
  auto l = labels_of({2, 2, 2, 3});
  EXPECT_DOUBLE_EQ(attainment_rate(l, 2), 75.0);
  EXPECT_DOUBLE_EQ(attainment_rate(l, 3), 25.0);
  EXPECT_DOUBLE_EQ(attainment_rate(l, 5), 0.0);
  auto z = labels_of({0, 0, 2, 2});
  EXPECT_DOUBLE_EQ(success_rate(z), 50.0);
  l.push_back(label(std::nullopt));
  EXPECT_DOUBLE_EQ(attainment_rate(l, 2), 75.0);  // discarded labels don't count
  EXPECT_EQ(retained_count(l), 4u);
  std::vector<AggregatedLabel> none{label(std::nullopt)};
  EXPECT_ERROR_CODE(attainment_rate(none, 1), ErrorCode::kNoRetainedLabels);
  EXPECT_ERROR_CODE(success_rate({}), ErrorCode::kNoRetainedLabels);
}

TEST(Rates, LargeAnnotatedSet) {
  std::mt19937 rng(1302);
  std::uniform_int_distribution<int> score(0, 5);
  std::vector<AnnotationTriple> triples;
  // 27 triples with three distinct scores, the rest with a majority.
  for (int i = 0; i < 1302; ++i) {
    int a = score(rng), b = score(rng), c = score(rng);
    if (i < 27) {
      b = (a + 1) % 6;
      c = (a + 2 + (i % 4)) % 6;
    } else if (a != b && a != c && b != c) {
      c = a;
    }
    triples.push_back({"d" + std::to_string(i), {a, b, c}});
  }
  std::vector<AggregatedLabel> labels;
  for (const auto& t : triples) labels.push_back(aggregate(t));
  EXPECT_EQ(retained_count(labels), 1275u);
  double sum = 0;
  for (int n = 0; n <= 5; ++n) sum += attainment_rate(labels, n);
  EXPECT_NEAR(sum, 100.0, 1e-9);
  EXPECT_NEAR(success_rate(labels), 100.0 - attainment_rate(labels, 0), 1e-12);
}

TEST(Report, BuildAndRender) {
  std::vector<LabeledDialogue> d;
  for (int i = 0; i < 4; ++i) d.push_back({ProactivityLevel(2), label(i < 3 ? 2 : 3)});
  d.push_back({ProactivityLevel(2), label(std::nullopt)});
  d.push_back({ProactivityLevel(5), label(0)});
  d.push_back({ProactivityLevel(4), label(std::nullopt)});
  auto r = build_report(d, "keyword", {{"backend", "scripted"}});
  ASSERT_EQ(r.per_level.size(), 2u);
  EXPECT_FALSE(r.per_level.contains(4));
  EXPECT_EQ(r.per_level.at(2).n_dialogues, 4u);
  EXPECT_EQ(r.per_level.at(2).discarded, 1u);
  EXPECT_DOUBLE_EQ(r.per_level.at(2).attainment_pct[2], 75.0);
  EXPECT_DOUBLE_EQ(r.per_level.at(5).success_rate_pct, 0.0);
  EXPECT_EQ(r.discarded_count, 2u);
  ASSERT_TRUE(r.overall_success_rate_pct.has_value());
  EXPECT_DOUBLE_EQ(*r.overall_success_rate_pct, 80.0);

  auto table = render_report_table(r);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 9);
  EXPECT_NE(table.find("[ 75.00]"), std::string::npos);
  EXPECT_NE(table.find("Discarded dialogues: 2"), std::string::npos);
  EXPECT_NE(table.find("Overall success rate: 80.00%"), std::string::npos);

  EXPECT_EQ(report_from_json(to_json(r)), r);
  EXPECT_ERROR_CODE(report_from_json(nlohmann::json::object()), ErrorCode::kParseError);

  auto empty = build_report({}, "keyword");
  EXPECT_FALSE(empty.overall_success_rate_pct.has_value());
  EXPECT_NE(render_report_table(empty).find("Overall success rate: -"), std::string::npos);
}

class EvalTest : public ::testing::Test {
 protected:
  void SetUp() override {
    assistant.add_match({"Does this response follow the strategy?"}, {}, {"YES"}, true);
    // Two openings get an act-first reply, the rest a confirmation question.
    assistant.add_match({"Thought:", "Question: wrong"}, {},
                        {"Thought: t\nFinal Answer: I will fix it for you."}, true);
    assistant.add_match({"Thought:"}, {}, {"Thought: t\nFinal Answer: Shall I fix it for you?"}, true);
    driver.add_match({"Your reply as the driver:"}, {}, {"Yes please. [DONE]"}, true);
  }

  std::vector<SimulatedUserGoal> level_two_goals(int wrong) {
    std::vector<SimulatedUserGoal> goals;
    for (int i = 0; i < 10; ++i) {
      SimulatedUserGoal g;
      g.id = "g" + std::to_string(i);
      g.level = ProactivityLevel(2);
      g.opening_utterance = (i < wrong ? "wrong " : "fine ") + std::to_string(i);
      g.goal_description = "get help";
      goals.push_back(g);
    }
    return goals;
  }

  EvalConfig config(std::vector<SimulatedUserGoal> goals) {
    EvalConfig c;
    c.goals = std::move(goals);
    c.engine = &engine;
    c.simulator_backend = &driver;
    c.judges = {&judge};
    return c;
  }

  DeterministicEmbedder embedder;
  VectorStore store{embedder.dim()};
  ScriptedBackend assistant;
  ScriptedBackend driver;
  Engine engine{EngineConfig{}, assistant, embedder, store, nullptr};
  KeywordJudge judge;
};

TEST_F(EvalTest, AllOnTarget) {
  auto run = run_evaluation(config(level_two_goals(0)));
  ASSERT_EQ(run.dialogues.size(), 10u);
  EXPECT_DOUBLE_EQ(run.report.per_level.at(2).attainment_pct[2], 100.0);
  EXPECT_EQ(run.report.judge_kind, "keyword");
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(run.dialogues[i].goal.id, "g" + std::to_string(i));
}

TEST_F(EvalTest, TwoOffTarget) {
  auto run = run_evaluation(config(level_two_goals(2)));
  const auto& s = run.report.per_level.at(2);
  EXPECT_DOUBLE_EQ(s.attainment_pct[2], 80.0);
  EXPECT_DOUBLE_EQ(s.attainment_pct[3], 20.0);
  EXPECT_DOUBLE_EQ(s.success_rate_pct, 100.0);
}

TEST_F(EvalTest, ThreeJudgesAggregate) {
  auto c = config(level_two_goals(0));
  c.judges = {&judge, &judge, &judge};
  auto run = run_evaluation(c);
  EXPECT_EQ(run.report.judge_kind, "keywordx3");
  EXPECT_EQ(run.dialogues[0].scores.size(), 3u);
}

TEST_F(EvalTest, ConfigErrors) {
  EXPECT_ERROR_CODE(run_evaluation(config({})), ErrorCode::kInvalidConfig);
  auto c = config(level_two_goals(0));
  c.judges = {&judge, &judge};
  EXPECT_ERROR_CODE(run_evaluation(c), ErrorCode::kInvalidConfig);
  c = config(level_two_goals(0));
  c.workers = 0;
  EXPECT_ERROR_CODE(run_evaluation(c), ErrorCode::kInvalidConfig);
  c = config(level_two_goals(0));
  c.engine = nullptr;
  EXPECT_ERROR_CODE(run_evaluation(c), ErrorCode::kInvalidConfig);
}

TEST_F(EvalTest, FailedDialogueScoresZero) {
  ScriptedBackend silent;
  auto c = config(level_two_goals(0));
  c.simulator_backend = &silent;
  auto run = run_evaluation(c);
  EXPECT_EQ(run.dialogues[0].outcome.terminated, Termination::kError);
  EXPECT_DOUBLE_EQ(run.report.per_level.at(2).success_rate_pct, 0.0);
}

std::map<std::string, std::string> read_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      files[std::filesystem::relative(e.path(), root).string()] = testing::read_file(e.path());
    }
  }
  return files;
}

TEST(ShippedGoals, KeywordRunIsDiagonalAndReproducible) {
  DeterministicEmbedder embedder;
  auto store = index_knowledge(load_knowledge_dir(testing::fixture_path("corpus")), embedder);
  RewriteExampleIndex examples(load_rewrite_bank(testing::fixture_path("rewrites.json")), embedder);
  auto goals = load_goals(testing::fixture_path("goals/goals.json"));
  KeywordJudge judge;
  testing::TempDir dir;
  std::vector<std::map<std::string, std::string>> trees;
  for (int workers : {4, 1}) {
    auto backend = ScriptedBackend::from_file(testing::fixture_path("goals/script.json"));
    Engine engine(EngineConfig{}, *backend, embedder, store, &examples);
    EvalConfig c{goals, &engine, backend.get(), {&judge}, workers, {{"backend", "scripted"}}};
    auto run = run_evaluation(c);
    for (int l = 1; l <= 5; ++l) {
      ASSERT_TRUE(run.report.per_level.contains(l));
      EXPECT_DOUBLE_EQ(run.report.per_level.at(l).attainment_pct[static_cast<std::size_t>(l)], 100.0)
          << "level " << l;
      EXPECT_EQ(run.report.per_level.at(l).n_dialogues, 10u);
    }
    EXPECT_EQ(run.report.discarded_count, 0u);
    auto out = dir.path() / ("w" + std::to_string(workers));
    write_eval_outputs(run, out.string());
    trees.push_back(read_tree(out));
  }
  EXPECT_EQ(trees[0].size(), 2u + 2u * goals.size());
  EXPECT_EQ(trees[0], trees[1]);
}

}  // namespace
}  // namespace proactiva
