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

#include <set>

#include "proactiva/proactivity.h"
#include "exemplars.h"
#include "test_support.h"

namespace proactiva {
namespace {

using testing::parse_exchange;

TEST(Strategy, LevelTexts) {
  const auto& c = default_catalog();
  const auto& l1 = get_proactivity_strategy(c, 1);
  EXPECT_NE(l1.find("make no assumptions"), std::string::npos);
  EXPECT_NE(l1.find("passively receive"), std::string::npos);
  EXPECT_NE(get_proactivity_strategy(c, 2).find("confirmation"), std::string::npos);
  EXPECT_NE(get_proactivity_strategy(c, 3).find("minimal input"), std::string::npos);
  EXPECT_NE(get_proactivity_strategy(c, 5).find("intervene to stop"), std::string::npos);
  EXPECT_ERROR_CODE(get_proactivity_strategy(c, 0), ErrorCode::kInvalidLevel);
  EXPECT_ERROR_CODE(get_proactivity_strategy(c, 6), ErrorCode::kInvalidLevel);
  std::set<std::string> distinct;
  for (int l = 1; l <= 5; ++l) {
    const auto& t = get_proactivity_strategy(c, l);
    EXPECT_TRUE(t.starts_with("Proactivity level " + std::to_string(l) + ".\n"));
    distinct.insert(t);
  }
  EXPECT_EQ(distinct.size(), 5u);
}

TEST(Strategy, DimensionsIncreaseWithLevel) {
  const auto& specs = default_catalog().specs();
  const Assumption a[] = {Assumption::kNone, Assumption::kSome, Assumption::kSome,
                          Assumption::kStrong, Assumption::kStrong};
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(specs[i].level.value(), i + 1);
    EXPECT_EQ(specs[i].assumption, a[i]);
    EXPECT_EQ(static_cast<int>(specs[i].autonomy), i);
    EXPECT_EQ(static_cast<int>(specs[i].user_control), i);
    EXPECT_EQ(specs[i].assistant_initiates, i >= 3);
    EXPECT_FALSE(specs[i].title.empty());
  }
}

TEST(KeywordJudge, Exemplars) {
  KeywordJudge judge;
  for (const auto& ex : testing::kExemplars) {
    auto h = parse_exchange(ex.exchange);
    EXPECT_EQ(judge.score(h, {}).value, ex.level) << ex.exchange;
    EXPECT_EQ(judge.score(h, {"", true}).value, ex.level) << ex.exchange;
  }
  EXPECT_EQ(judge.kind(), JudgeKind::kKeyword);
}

TEST(KeywordJudge, RefusalIsZero) {
  auto h = parse_exchange("Driver: I'm feeling hot. IVCA: Sorry, I can't help with that.");
  EXPECT_EQ(keyword_rubric(h, {}).value, 0);
  auto done = parse_exchange("Driver: I'm feeling hot. IVCA: Shall I turn on the AC?");
  EXPECT_EQ(keyword_rubric(done, {"", false}).value, 0);
}

TEST(KeywordJudge, FirstMoveDecidesBetweenTwoAndThree) {
  auto ask_first = parse_exchange(
      "Driver: I'm feeling hot. IVCA: Shall I open the window? I will then lower the fan.");
  auto act_first = parse_exchange(
      "Driver: I'm feeling hot. IVCA: I will open the window. Shall I also lower the fan?");
  EXPECT_EQ(keyword_rubric(ask_first, {}).value, 2);
  EXPECT_EQ(keyword_rubric(act_first, {}).value, 3);
}

TEST(KeywordJudge, FourAndFiveOnlyWhenAssistantOpens) {
  for (const auto& ex : testing::kExemplars) {
    auto h = parse_exchange(ex.exchange);
    const int v = keyword_rubric(h, {}).value;
    const bool assistant_first = h.first_spoken()->speaker == Speaker::kAssistant;
    if (v >= 4) EXPECT_TRUE(assistant_first) << ex.exchange;
    if (assistant_first) EXPECT_GE(v, 4) << ex.exchange;
  }
}

TEST(KeywordJudge, EmptyConversation) {
  DialogueHistory none("x");
  EXPECT_ERROR_CODE(keyword_rubric(none, {}), ErrorCode::kEmptyConversation);
  auto user_only = parse_exchange("Driver: hello");
  EXPECT_ERROR_CODE(keyword_rubric(user_only, {}), ErrorCode::kEmptyConversation);
}

TEST(RubricHelpers, Classification) {
  using rubric::MoveKind;
  EXPECT_EQ(rubric::classify_sentence("Shall I open it?"), MoveKind::kConfirmationQuestion);
  EXPECT_EQ(rubric::classify_sentence("What temperature?"), MoveKind::kQuestion);
  EXPECT_EQ(rubric::classify_sentence("I\xE2\x80\x99ll open it."), MoveKind::kAction);
  EXPECT_EQ(rubric::classify_sentence("Sure."), MoveKind::kNone);
  EXPECT_TRUE(rubric::is_explicit_command("Hey, could you please turn on the AC"));
  EXPECT_FALSE(rubric::is_explicit_command("I'm feeling hot"));
  EXPECT_FALSE(rubric::is_explicit_command("please"));
  EXPECT_TRUE(rubric::is_refusal("I'm sorry, I cannot do that."));
  EXPECT_FALSE(rubric::is_refusal("Sorry for the wait, the AC is on."));
  EXPECT_EQ(rubric::split_sentences("Hi. 2.5 degrees? Ok"),
            (std::vector<std::string>{"Hi.", "2.5 degrees?", "Ok"}));
}

TEST(LlmJudge, ParseReply) {
  auto s = LlmRubricJudge::parse_reply("Score: 4\nRationale: proposed first.");
  EXPECT_EQ(s.value, 4);
  EXPECT_EQ(s.rationale, "proposed first.");
  EXPECT_EQ(LlmRubricJudge::parse_reply("score - 0").value, 0);
  EXPECT_ERROR_CODE(LlmRubricJudge::parse_reply("Score: 9"), ErrorCode::kMalformedResponse);
  EXPECT_ERROR_CODE(LlmRubricJudge::parse_reply("five"), ErrorCode::kMalformedResponse);
}

TEST(LlmJudge, RequestAndCap) {
  ScriptedBackend b;
  b.enqueue_text("Score: 5\nRationale: acted.");
  b.enqueue_text("Score: 5\nRationale: acted.");
  LlmRubricJudge judge(b);
  auto user_opened = parse_exchange("Driver: I'm feeling hot. IVCA: I will cool the cabin.");
  auto s = judge.score(user_opened, {"Get cooler", std::nullopt});
  EXPECT_EQ(s.value, 3);
  auto ivca_opened = parse_exchange("IVCA: I'll cool the cabin. Driver: ok");
  EXPECT_EQ(judge.score(ivca_opened, {"Get cooler", std::nullopt}).value, 5);

  auto req = b.call_log().at(0);
  ASSERT_EQ(req.messages.size(), 2u);
  EXPECT_EQ(req.messages[0].role, Role::kSystem);
  EXPECT_EQ(req.messages[0].content, rubric_text());
  EXPECT_TRUE(req.messages[1].content.starts_with("Driver's goal: Get cooler\n\nConversation:\n"));
  EXPECT_TRUE(req.messages[1].content.ends_with("Score this conversation."));
  EXPECT_ERROR_CODE(judge.score(DialogueHistory("x"), {}), ErrorCode::kEmptyConversation);
}

TEST(Rubric, DocsCopyMatches) {
  EXPECT_EQ(testing::read_file(std::string(PROACTIVA_DOCS_DIR) + "/rubric.md"), rubric_text());
}

}  // namespace
}  // namespace proactiva
