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

#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <thread>

#include "httplib.h"
#include "proactiva/knowledge_base.h"
#include "proactiva/service.h"
#include "proactiva/text.h"
#include "test_support.h"

namespace proactiva {
namespace {

using nlohmann::json;

Timestamp fixed_time() { return parse_timestamp("2026-03-01T08:30:00.000Z"); }

class ServiceTest : public ::testing::Test {
 protected:
  DeterministicEmbedder embedder;
  VectorStore store = index_knowledge(load_knowledge_dir(testing::fixture_path("corpus")), embedder);
  RewriteExampleIndex examples{load_rewrite_bank(testing::fixture_path("rewrites.json")), embedder};
  std::unique_ptr<ScriptedBackend> backend =
      ScriptedBackend::from_file(testing::fixture_path("goals/script.json"));
  Engine engine{EngineConfig{}, *backend, embedder, store, &examples};
  testing::TempDir run_dir;
  SessionService service{engine, run_dir.str(), fixed_time};
};

TEST_F(ServiceTest, CreateSession) {
  auto s = service.create_session(2);
  EXPECT_EQ(s.session_id, "session-000001");
  EXPECT_EQ(s.level.value(), 2);
  EXPECT_TRUE(s.history.empty());
  EXPECT_EQ(s.status, SessionStatus::kActive);
  EXPECT_EQ(service.create_session(1).session_id, "session-000002");
  EXPECT_ERROR_CODE(service.create_session(7), ErrorCode::kInvalidLevel);
  EXPECT_ERROR_CODE(service.create_session(0), ErrorCode::kInvalidLevel);
  EXPECT_ERROR_CODE(service.create_session(2, "morning commute"), ErrorCode::kPreconditionFailed);
}

TEST_F(ServiceTest, InitiatingLevelOpensConversation) {
  auto s = service.create_session(4, "morning commute");
  ASSERT_EQ(s.history.size(), 1u);
  EXPECT_EQ(s.history.turns()[0].speaker, Speaker::kAssistant);
  EXPECT_EQ(keyword_rubric(s.history, {}).value, 4);
  EXPECT_EQ(service.get_session(s.session_id).history, s.history);
  auto log = testing::read_file(run_dir.path() / "sessions" / (s.session_id + ".jsonl"));
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 1);
}

TEST_F(ServiceTest, PostMessageAndLookup) {
  auto s = service.create_session(2);
  auto r = service.post_message(s.session_id, "I'm feeling hot");
  EXPECT_EQ(r.assistant_text, "Shall I activate the air conditioning for you?");
  EXPECT_EQ(r.turn_indices, (std::vector<std::size_t>{0, 1}));
  auto now = service.get_session(s.session_id);
  ASSERT_EQ(now.history.size(), 2u);
  EXPECT_EQ(now.history.turns()[0].timestamp, fixed_time());
  EXPECT_ERROR_CODE(service.post_message("session-999999", "hi"), ErrorCode::kSessionNotFound);
  EXPECT_ERROR_CODE(service.get_session("nope"), ErrorCode::kSessionNotFound);
  EXPECT_ERROR_CODE(service.post_message(s.session_id, "  "), ErrorCode::kEmptyUtterance);
  EXPECT_EQ(service.get_session(s.session_id).history.size(), 2u);
}

TEST_F(ServiceTest, CloseIsIdempotentAndTranscriptRoundTrips) {
  auto s = service.create_session(2);
  service.post_message(s.session_id, "I'm feeling hot");
  service.post_message(s.session_id, "Go ahead.");
  auto path = service.close_session(s.session_id);
  EXPECT_EQ(service.close_session(s.session_id), path);
  EXPECT_TRUE(std::filesystem::exists(path));
  auto t = transcript_from_json(json::parse(testing::read_file(path)));
  auto live = service.get_session(s.session_id);
  EXPECT_EQ(t.history.size(), 4u);
  EXPECT_EQ(t.history, live.history);
  EXPECT_EQ(t.level.value(), 2);
  EXPECT_EQ(live.status, SessionStatus::kClosed);
  EXPECT_ERROR_CODE(service.post_message(s.session_id, "more"), ErrorCode::kSessionClosed);

  auto log = text::split_lines(testing::read_file(run_dir.path() / "sessions" / (s.session_id + ".jsonl")));
  std::size_t lines = 0;
  for (const auto& l : log) lines += !l.empty();
  EXPECT_EQ(lines, 4u);
}

TEST(HttpStatus, Mapping) {
  EXPECT_EQ(http_status_for(Error(ErrorCode::kInvalidLevel, "")), 400);
  EXPECT_EQ(http_status_for(Error(ErrorCode::kEmptyUtterance, "")), 400);
  EXPECT_EQ(http_status_for(Error(ErrorCode::kSessionNotFound, "")), 404);
  EXPECT_EQ(http_status_for(Error(ErrorCode::kSessionClosed, "")), 409);
  EXPECT_EQ(http_status_for(Error(ErrorCode::kBusy, "")), 409);
  EXPECT_EQ(http_status_for(BackendUnavailable("x", true)), 502);
  EXPECT_EQ(http_status_for(Error(ErrorCode::kIo, "")), 500);
  EXPECT_EQ(http_status_for(std::runtime_error("x")), 500);
}

class ApiHarness {
 public:
  explicit ApiHarness(SessionService& service) : server_(service) {
    port_ = server_.bind_any_port();
    thread_ = std::thread([this] { server_.listen(); });
    server_.wait_until_ready();
  }
  ~ApiHarness() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(10, 0);
    return c;
  }

 private:
  ApiServer server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(ServiceTest, HttpEndpoints) {
  ApiHarness api(service);
  auto c = api.client();

  auto created = c.Post("/api/sessions", R"({"level": 2})", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  EXPECT_EQ(created->get_header_value("Access-Control-Allow-Origin"), "*");
  auto id = json::parse(created->body)["session_id"].get<std::string>();

  auto msg = c.Post("/api/sessions/" + id + "/messages", R"({"text": "I'm feeling hot"})",
                    "application/json");
  ASSERT_TRUE(msg);
  EXPECT_EQ(msg->status, 200);
  auto body = json::parse(msg->body);
  EXPECT_EQ(body["assistant_text"], "Shall I activate the air conditioning for you?");
  EXPECT_EQ(body["turn_indices"], json::array({0, 1}));

  auto got = c.Get("/api/sessions/" + id);
  ASSERT_TRUE(got);
  EXPECT_EQ(got->status, 200);
  auto view = json::parse(got->body);
  EXPECT_EQ(view["status"], "Active");
  EXPECT_EQ(view["turns"].size(), 2u);

  auto closed = c.Post("/api/sessions/" + id + "/close", "", "application/json");
  ASSERT_TRUE(closed);
  EXPECT_EQ(closed->status, 200);
  EXPECT_TRUE(json::parse(closed->body).contains("transcript_path"));
  auto after = c.Post("/api/sessions/" + id + "/messages", R"({"text": "hi"})", "application/json");
  EXPECT_EQ(after->status, 409);
  EXPECT_EQ(json::parse(after->body)["error"], "SessionClosed");

  auto levels = c.Get("/api/levels");
  ASSERT_TRUE(levels);
  auto lj = json::parse(levels->body);
  ASSERT_EQ(lj.size(), 5u);
  EXPECT_EQ(lj[3]["assistant_initiates"], true);
  EXPECT_EQ(lj[0]["strategy_text"], get_proactivity_strategy(default_catalog(), 1));
}

TEST_F(ServiceTest, HttpErrors) {
  ApiHarness api(service);
  auto c = api.client();
  auto bad_level = c.Post("/api/sessions", R"({"level": 7})", "application/json");
  EXPECT_EQ(bad_level->status, 400);
  EXPECT_EQ(json::parse(bad_level->body)["error"], "InvalidLevel");
  EXPECT_EQ(c.Post("/api/sessions", "not json", "application/json")->status, 400);
  EXPECT_EQ(c.Post("/api/sessions", R"({"level": 2, "scenario": "morning commute"})",
                   "application/json")->status, 400);
  EXPECT_EQ(c.Get("/api/sessions/session-424242")->status, 404);
  EXPECT_EQ(c.Post("/api/sessions/nope/messages", R"({"text": "hi"})", "application/json")->status, 404);

  auto opened = c.Post("/api/sessions", R"({"level": 4, "scenario": "morning commute"})",
                       "application/json");
  ASSERT_EQ(opened->status, 201);
  auto oj = json::parse(opened->body);
  EXPECT_EQ(oj["opening_turn"]["speaker"], "Assistant");
  auto options = c.Options("/api/sessions");
  ASSERT_TRUE(options);
  EXPECT_EQ(options->status, 204);
}

// Holds the first ReAct call until released.
class GateBackend : public LlmBackend {
 public:
  ChatResponse complete(const ChatRequest& request) override {
    if (request.joined_content().find("Does this response follow") != std::string::npos) {
      return ChatResponse::text("YES");
    }
    std::unique_lock lock(mu_);
    entered_ = true;
    cv_.notify_all();
    cv_.wait(lock, [this] { return released_; });
    return ChatResponse::text("Thought: t\nFinal Answer: Shall I open the window?");
  }
  void wait_entered() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return entered_; });
  }
  void release() {
    std::lock_guard lock(mu_);
    released_ = true;
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  bool entered_ = false;
  bool released_ = false;
};

TEST(ServiceConcurrency, SecondMessageWhileAnsweringIsBusy) {
  DeterministicEmbedder embedder;
  VectorStore store(embedder.dim());
  GateBackend gate;
  Engine engine(EngineConfig{}, gate, embedder, store, nullptr);
  testing::TempDir dir;
  SessionService service(engine, dir.str());
  ApiHarness api(service);
  auto id = service.create_session(2).session_id;

  auto first = std::async(std::launch::async, [&] {
    return api.client().Post("/api/sessions/" + id + "/messages", R"({"text": "stuffy"})",
                             "application/json");
  });
  gate.wait_entered();
  auto second = api.client().Post("/api/sessions/" + id + "/messages", R"({"text": "hello?"})",
                                  "application/json");
  ASSERT_TRUE(second);
  EXPECT_EQ(second->status, 409);
  EXPECT_EQ(json::parse(second->body)["error"], "Busy");
  // Reads don't wait for the turn.
  auto view = api.client().Get("/api/sessions/" + id);
  EXPECT_EQ(view->status, 200);
  EXPECT_EQ(json::parse(view->body)["turns"].size(), 0u);
  gate.release();
  auto r = first.get();
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(service.get_session(id).history.size(), 2u);
}

class FailingBackend : public LlmBackend {
 public:
  ChatResponse complete(const ChatRequest&) override {
    throw BackendUnavailable("upstream returned HTTP 401", false);
  }
};

TEST(ServiceSecrets, NoCredentialInResponsesOrFiles) {
  const std::string secret = "sk-test-do-not-leak-7c1f";
  ::setenv("PROACTIVA_API_KEY", secret.c_str(), 1);
  DeterministicEmbedder embedder;
  VectorStore store(embedder.dim());
  FailingBackend failing;
  Engine engine(EngineConfig{}, failing, embedder, store, nullptr);
  testing::TempDir dir;
  SessionService service(engine, dir.str());
  std::string seen;
  {
    ApiHarness api(service);
    auto c = api.client();
    auto created = c.Post("/api/sessions", R"({"level": 2})", "application/json");
    seen += created->body;
    auto id = json::parse(created->body)["session_id"].get<std::string>();
    auto failed = c.Post("/api/sessions/" + id + "/messages", R"({"text": "hi"})", "application/json");
    EXPECT_EQ(failed->status, 502);
    seen += failed->body;
    seen += c.Get("/api/sessions/" + id)->body;
    seen += c.Get("/api/levels")->body;
    seen += c.Post("/api/sessions/" + id + "/close", "", "application/json")->body;
    for (const auto& [k, v] : failed->headers) seen += k + v;
  }
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir.path())) {
    if (e.is_regular_file()) seen += testing::read_file(e.path());
  }
  ::unsetenv("PROACTIVA_API_KEY");
  EXPECT_EQ(seen.find(secret), std::string::npos);
  EXPECT_EQ(seen.find("Bearer"), std::string::npos);
}

}  // namespace
}  // namespace proactiva
