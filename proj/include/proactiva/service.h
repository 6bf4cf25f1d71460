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

#ifndef PROACTIVA_SERVICE_H_
#define PROACTIVA_SERVICE_H_

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "proactiva/react.h"
#include "proactiva/types.h"

namespace httplib {
class Server;
}

namespace proactiva {

enum class SessionStatus { kActive, kClosed };

struct Session {
  std::string session_id;
  ProactivityLevel level{1};  // fixed at creation
  DialogueHistory history;
  Timestamp created_at;
  SessionStatus status = SessionStatus::kActive;
  std::optional<std::string> transcript_path;
};

nlohmann::json session_view(const Session& session);
nlohmann::json level_summaries(const StrategyCatalog& catalog);

struct PostResult {
  std::string assistant_text;
  std::vector<std::size_t> turn_indices;
};

// Session registry behind the HTTP API. Turns within one session are
// serialized: a second message while one is in flight fails with Busy
// instead of queuing. Committed turns are appended to
// {run_dir}/sessions/{id}.jsonl; closing writes {run_dir}/transcripts/{id}.json.
class SessionService {
 public:
  using Clock = std::function<Timestamp()>;

  SessionService(const Engine& engine, std::string run_dir, Clock clock = {});

  // Throws Error(kInvalidLevel); a scenario is only accepted at levels 4-5
  // and produces the assistant's opening turn.
  Session create_session(int level, std::optional<std::string> scenario = std::nullopt);

  // Throws Error(kSessionNotFound / kSessionClosed / kBusy) or engine errors;
  // nothing is committed on error.
  PostResult post_message(const std::string& session_id, std::string_view text);

  // Idempotent; returns the transcript path.
  std::string close_session(const std::string& session_id);

  Session get_session(const std::string& session_id) const;

  const Engine& engine() const { return engine_; }

 private:
  struct Slot {
    std::mutex turn_mu;           // held for the duration of one turn
    mutable std::mutex state_mu;  // guards `session`
    Session session;
  };

  std::shared_ptr<Slot> find(const std::string& session_id) const;
  void append_turn_log(const Session& session, std::size_t from_index) const;

  const Engine& engine_;
  std::string run_dir_;
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::size_t next_id_ = 1;
};

// HTTP front end (JSON bodies):
//   POST /api/sessions                {level, scenario?}
//   POST /api/sessions/{id}/messages  {text}          409 when Busy
//   GET  /api/sessions/{id}
//   POST /api/sessions/{id}/close
//   GET  /api/levels
class ApiServer {
 public:
  explicit ApiServer(SessionService& service, std::string static_dir = "");
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Binds to an ephemeral port and returns it; call listen() afterwards.
  int bind_any_port(const std::string& host = "127.0.0.1");
  bool bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  void install_routes();

  SessionService& service_;
  std::unique_ptr<httplib::Server> server_;
};

int http_status_for(const std::exception& e);

}  // namespace proactiva

#endif  // PROACTIVA_SERVICE_H_
