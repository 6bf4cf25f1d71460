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

#include <atomic>
#include <cstdlib>

#include "proactiva/http_backend.h"
#include "stub_server.h"
#include "test_support.h"

namespace proactiva {
namespace {

using testing::completion_body;
using testing::StubServer;

HttpBackendOptions options_for(const StubServer& stub, const std::string& key = "sk-test") {
  HttpBackendOptions o;
  o.base_url = stub.base_url();
  o.api_key = key;
  o.model = "stub-model";
  o.timeout = std::chrono::seconds(5);
  return o;
}

ChatRequest react_like_request() {
  ChatRequest r;
  r.messages = {{Role::kSystem, "manual"}, {Role::kUser, "Question: q\nThought:"}};
  r.temperature = 0.0;
  r.stop_sequences = {"Observation:"};
  r.max_output_tokens = 64;
  return r;
}

TEST(HttpBackend, SendsChatCompletionsRequest) {
  StubServer stub([](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion_body("Final Answer: Sure."), "application/json");
  });
  HttpBackend backend(options_for(stub));
  auto response = backend.complete(react_like_request());
  EXPECT_EQ(response.content, "Final Answer: Sure.");
  EXPECT_EQ(response.finish_reason, FinishReason::kStop);
  ASSERT_TRUE(response.usage.has_value());
  EXPECT_EQ(response.usage->prompt_tokens, 11);

  auto seen = stub.requests();
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_EQ(seen[0].path, "/v1/chat/completions");
  EXPECT_EQ(seen[0].get_header_value("Authorization"), "Bearer sk-test");
  auto body = nlohmann::json::parse(seen[0].body);
  EXPECT_EQ(body["model"], "stub-model");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["stop"], nlohmann::json::array({"Observation:"}));
  EXPECT_EQ(body["max_tokens"], 64);
  ASSERT_EQ(body["messages"].size(), 2u);
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][1]["role"], "user");
  EXPECT_EQ(body["messages"][1]["content"], "Question: q\nThought:");
}

TEST(HttpBackend, TruncatesWhenServerIgnoresStop) {
  StubServer stub([](const httplib::Request&, httplib::Response& res) {
    res.set_content(
        completion_body("Thought: look it up\nAction: search[pop music]\nObservation: invented"),
        "application/json");
  });
  HttpBackend backend(options_for(stub));
  auto response = backend.complete(react_like_request());
  EXPECT_EQ(response.content.find("Observation:"), std::string::npos);
  EXPECT_EQ(response.content, "Thought: look it up\nAction: search[pop music]\n");
  EXPECT_EQ(response.finish_reason, FinishReason::kStopSequence);
}

TEST(HttpBackend, OmitsOptionalFields) {
  StubServer stub([](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion_body("hi"), "application/json");
  });
  HttpBackend backend(options_for(stub, ""));
  ChatRequest r;
  r.messages = {{Role::kUser, "hello"}};
  backend.complete(r);
  auto seen = stub.requests();
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_FALSE(seen[0].has_header("Authorization"));
  auto body = nlohmann::json::parse(seen[0].body);
  EXPECT_FALSE(body.contains("stop"));
  EXPECT_FALSE(body.contains("max_tokens"));
}

TEST(HttpBackend, RateLimitIsRetrySafe) {
  std::atomic<int> calls{0};
  StubServer stub([&](const httplib::Request&, httplib::Response& res) {
    if (++calls <= 2) {
      res.status = 429;
      return;
    }
    res.set_content(completion_body("ok"), "application/json");
  });
  auto inner = std::make_shared<HttpBackend>(options_for(stub));
  RetryingBackend backend(inner, 3, RetryPolicy{std::chrono::milliseconds(1), 2.0});
  EXPECT_EQ(backend.complete(react_like_request()).content, "ok");
  EXPECT_EQ(calls.load(), 3);
}

TEST(HttpBackend, AuthFailureIsNotRetried) {
  std::atomic<int> calls{0};
  StubServer stub([&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 401;
  });
  auto inner = std::make_shared<HttpBackend>(options_for(stub));
  RetryingBackend backend(inner, 3, RetryPolicy{std::chrono::milliseconds(1), 2.0});
  try {
    backend.complete(react_like_request());
    ADD_FAILURE() << "expected BackendUnavailable";
  } catch (const BackendUnavailable& e) {
    EXPECT_FALSE(e.retry_safe());
    EXPECT_EQ(std::string(e.what()).find("sk-test"), std::string::npos);
  }
  EXPECT_EQ(calls.load(), 1);
}

TEST(HttpBackend, ServerErrorIsRetrySafe) {
  StubServer stub([](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  HttpBackend backend(options_for(stub));
  try {
    backend.complete(react_like_request());
    ADD_FAILURE() << "expected BackendUnavailable";
  } catch (const BackendUnavailable& e) {
    EXPECT_TRUE(e.retry_safe());
  }
}

TEST(HttpBackend, UnreachableServerIsRetrySafe) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }  // closed again: nothing listens there now
  HttpBackendOptions o;
  o.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  o.timeout = std::chrono::seconds(2);
  HttpBackend backend(o);
  try {
    backend.complete(react_like_request());
    ADD_FAILURE() << "expected BackendUnavailable";
  } catch (const BackendUnavailable& e) {
    EXPECT_TRUE(e.retry_safe());
  }
}

TEST(HttpBackend, MalformedBodies) {
  EXPECT_ERROR_CODE(parse_chat_completion("not json", {}), ErrorCode::kMalformedResponse);
  EXPECT_ERROR_CODE(parse_chat_completion(R"({"choices": []})", {}),
                    ErrorCode::kMalformedResponse);
  EXPECT_ERROR_CODE(parse_chat_completion(R"({"choices": [{"text": "x"}]})", {}),
                    ErrorCode::kMalformedResponse);
  auto length = parse_chat_completion(completion_body("abc", "length"), {});
  EXPECT_EQ(length.finish_reason, FinishReason::kLength);
}

TEST(HttpBackend, SplitUrl) {
  auto a = split_url("https://api.example.com/v1/");
  EXPECT_EQ(a.origin, "https://api.example.com");
  EXPECT_EQ(a.path_prefix, "/v1");
  auto b = split_url("http://localhost:8000");
  EXPECT_EQ(b.origin, "http://localhost:8000");
  EXPECT_EQ(b.path_prefix, "");
  EXPECT_ERROR_CODE(split_url("localhost:8000"), ErrorCode::kInvalidConfig);
}

TEST(HttpBackendOptions, ReadsEnvironment) {
  ::setenv(kApiBaseEnv, "http://127.0.0.1:9/base", 1);
  ::setenv(kApiKeyEnv, "sk-env", 1);
  ::setenv(kModelEnv, "model-x", 1);
  auto o = HttpBackendOptions::from_env();
  ::unsetenv(kApiBaseEnv);
  ::unsetenv(kApiKeyEnv);
  ::unsetenv(kModelEnv);
  EXPECT_EQ(o.base_url, "http://127.0.0.1:9/base");
  EXPECT_EQ(o.api_key, "sk-env");
  EXPECT_EQ(o.model, "model-x");
  auto d = HttpBackendOptions::from_env();
  EXPECT_EQ(d.model, "gpt-3.5-turbo");
  EXPECT_TRUE(d.api_key.empty());
}

}  // namespace
}  // namespace proactiva
