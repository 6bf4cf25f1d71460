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

#include "proactiva/service.h"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "httplib.h"
#include "proactiva/error.h"
#include "proactiva/text.h"

namespace proactiva {

using nlohmann::json;
namespace fs = std::filesystem;

json session_view(const Session& s) {
  auto j = transcript_to_json(s.history, s.level);
  j["created_at"] = format_timestamp(s.created_at);
  j["status"] = s.status == SessionStatus::kActive ? "Active" : "Closed";
  if (s.transcript_path) j["transcript_path"] = *s.transcript_path;
  return j;
}

json level_summaries(const StrategyCatalog& catalog) {
  json out = json::array();
  for (const auto& spec : catalog.specs()) {
    out.push_back({{"level", spec.level.value()},
                   {"title", spec.title},
                   {"assumption", assumption_name(spec.assumption)},
                   {"autonomy", autonomy_name(spec.autonomy)},
                   {"user_control", user_control_name(spec.user_control)},
                   {"assistant_initiates", spec.assistant_initiates},
                   {"strategy_text", spec.strategy_text}});
  }
  return out;
}

SessionService::SessionService(const Engine& engine, std::string run_dir, Clock clock)
    : engine_(engine), run_dir_(std::move(run_dir)), clock_(std::move(clock)) {
  if (!clock_) {
    clock_ = [] {
      return std::chrono::time_point_cast<std::chrono::milliseconds>(
          std::chrono::system_clock::now());
    };
  }
  fs::create_directories(fs::path(run_dir_) / "sessions");
  fs::create_directories(fs::path(run_dir_) / "transcripts");
}

std::shared_ptr<SessionService::Slot> SessionService::find(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw Error(ErrorCode::kSessionNotFound, "no session '" + session_id + "'");
  }
  return it->second;
}

void SessionService::append_turn_log(const Session& session, std::size_t from_index) const {
  std::ofstream out(fs::path(run_dir_) / "sessions" / (session.session_id + ".jsonl"),
                    std::ios::app);
  if (!out) throw Error(ErrorCode::kIo, "cannot append to turn log of " + session.session_id);
  for (std::size_t i = from_index; i < session.history.size(); ++i) {
    out << turn_to_json(session.history.turns()[i]).dump() << '\n';
  }
}

Session SessionService::create_session(int level_value, std::optional<std::string> scenario) {
  const ProactivityLevel level(level_value);
  if (scenario && text::trim(*scenario).empty()) scenario.reset();
  if (scenario && !level.assistant_initiates()) {
    throw Error(ErrorCode::kPreconditionFailed,
                "opening scenarios need level 4 or 5, got " + std::to_string(level_value));
  }

  std::string id;
  {
    std::lock_guard lock(mu_);
    std::ostringstream name;
    name << "session-" << std::setw(6) << std::setfill('0') << next_id_++;
    id = name.str();
  }
  auto slot = std::make_shared<Slot>();
  slot->session = Session{id, level, DialogueHistory(id), clock_(), SessionStatus::kActive, {}};
  if (scenario) {
    ConversationState state{level, slot->session.history};
    engine_.respond(state, InitiationEvent{*scenario}, clock_());
    slot->session.history = std::move(state.history);
  }
  append_turn_log(slot->session, 0);
  {
    std::lock_guard lock(mu_);
    sessions_.emplace(id, slot);
  }
  return slot->session;
}

PostResult SessionService::post_message(const std::string& session_id, std::string_view text) {
  auto slot = find(session_id);
  std::unique_lock turn(slot->turn_mu, std::try_to_lock);
  if (!turn.owns_lock()) {
    throw Error(ErrorCode::kBusy, "session '" + session_id + "' is still answering");
  }
  ConversationState state{ProactivityLevel(1), {}};
  {
    std::lock_guard lock(slot->state_mu);
    if (slot->session.status == SessionStatus::kClosed) {
      throw Error(ErrorCode::kSessionClosed, "session '" + session_id + "' is closed");
    }
    state = ConversationState{slot->session.level, slot->session.history};
  }
  const auto before = state.history.size();
  auto result = engine_.respond(state, UserUtterance{std::string(text)}, clock_());

  PostResult out{result.assistant_text, {}};
  for (auto i = before; i < state.history.size(); ++i) out.turn_indices.push_back(i);
  {
    std::lock_guard lock(slot->state_mu);
    slot->session.history = std::move(state.history);
    append_turn_log(slot->session, before);
  }
  return out;
}

std::string SessionService::close_session(const std::string& session_id) {
  auto slot = find(session_id);
  std::lock_guard turn(slot->turn_mu);
  std::lock_guard lock(slot->state_mu);
  if (slot->session.status == SessionStatus::kClosed) return *slot->session.transcript_path;

  auto path = (fs::path(run_dir_) / "transcripts" / (session_id + ".json")).string();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << transcript_to_json(slot->session.history, slot->session.level).dump(2) << '\n';
  out.close();
  slot->session.status = SessionStatus::kClosed;
  slot->session.transcript_path = path;
  return path;
}

Session SessionService::get_session(const std::string& session_id) const {
  auto slot = find(session_id);
  std::lock_guard lock(slot->state_mu);
  return slot->session;
}

int http_status_for(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  if (err == nullptr) return 500;
  switch (err->code()) {
    case ErrorCode::kInvalidLevel:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kEmptyUtterance:
    case ErrorCode::kPreconditionFailed:
    case ErrorCode::kParseError:
      return 400;
    case ErrorCode::kSessionNotFound:
      return 404;
    case ErrorCode::kSessionClosed:
    case ErrorCode::kBusy:
      return 409;
    case ErrorCode::kBackendUnavailable:
    case ErrorCode::kMalformedResponse:
    case ErrorCode::kScriptExhausted:
      return 502;
    default:
      return 500;
  }
}

ApiServer::ApiServer(SessionService& service, std::string static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  install_routes();
  if (!static_dir.empty()) server_->set_mount_point("/", static_dir);
}

ApiServer::~ApiServer() { stop(); }

void ApiServer::install_routes() {
  auto& srv = *server_;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.status = 204;
  });

  auto reply = [](httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  };
  auto guarded = [reply](auto handler) {
    return [reply, handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const json::exception& e) {
        reply(res, 400, {{"error", "BadRequest"}, {"message", e.what()}});
      } catch (const Error& e) {
        reply(res, http_status_for(e),
              {{"error", std::string(error_code_name(e.code()))}, {"message", e.what()}});
      } catch (const std::exception& e) {
        reply(res, 500, {{"error", "Internal"}, {"message", e.what()}});
      }
    };
  };

  srv.Post("/api/sessions", guarded([this, reply](const httplib::Request& req,
                                                  httplib::Response& res) {
    auto body = req.body.empty() ? json::object() : json::parse(req.body);
    std::optional<std::string> scenario;
    if (body.contains("scenario") && !body["scenario"].is_null()) {
      scenario = body["scenario"].get<std::string>();
    }
    auto session = service_.create_session(body.at("level").get<int>(), scenario);
    json out{{"session_id", session.session_id}, {"level", session.level.value()}};
    if (!session.history.empty()) out["opening_turn"] = turn_to_json(session.history.turns().front());
    reply(res, 201, out);
  }));

  srv.Post("/api/sessions/:id/messages",
           guarded([this, reply](const httplib::Request& req, httplib::Response& res) {
             auto body = json::parse(req.body);
             auto result = service_.post_message(req.path_params.at("id"),
                                                 body.at("text").get<std::string>());
             reply(res, 200,
                   {{"assistant_text", result.assistant_text},
                    {"turn_indices", result.turn_indices}});
           }));

  srv.Get("/api/sessions/:id",
          guarded([this, reply](const httplib::Request& req, httplib::Response& res) {
            reply(res, 200, session_view(service_.get_session(req.path_params.at("id"))));
          }));

  srv.Post("/api/sessions/:id/close",
           guarded([this, reply](const httplib::Request& req, httplib::Response& res) {
             reply(res, 200,
                   {{"transcript_path", service_.close_session(req.path_params.at("id"))}});
           }));

  srv.Get("/api/levels", guarded([this, reply](const httplib::Request&, httplib::Response& res) {
            reply(res, 200, level_summaries(service_.engine().catalog()));
          }));
}

int ApiServer::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool ApiServer::bind(const std::string& host, int port) { return server_->bind_to_port(host, port); }

bool ApiServer::listen() { return server_->listen_after_bind(); }

void ApiServer::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

void ApiServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace proactiva
