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

#include "proactiva/cli.h"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "proactiva/embedding.h"
#include "proactiva/error.h"
#include "proactiva/eval.h"
#include "proactiva/http_backend.h"
#include "proactiva/knowledge_base.h"
#include "proactiva/llm.h"
#include "proactiva/proactivity.h"
#include "proactiva/react.h"
#include "proactiva/rewriter.h"
#include "proactiva/service.h"
#include "proactiva/text.h"
#include "proactiva/user_simulator.h"

#ifndef PROACTIVA_FIXTURES_DIR
#define PROACTIVA_FIXTURES_DIR "fixtures"
#endif

namespace proactiva {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kRemoteEmbeddingModel = "text-embedding-ada-002";
constexpr std::size_t kRemoteEmbeddingDim = 1536;

std::string fixture(const std::string& rel) {
  return (fs::path(PROACTIVA_FIXTURES_DIR) / rel).string();
}

struct CommonOptions {
  std::string config_path;
  std::string backend = "scripted";
  std::string script;
  std::string corpus;
  std::string rewrites;
  std::string store;
  std::string embedder = "deterministic";
};

void add_common(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--config", o.config_path, "JSON file overriding engine defaults")
      ->check(CLI::ExistingFile);
  cmd.add_option("--backend", o.backend, "LLM backend")
      ->check(CLI::IsMember({"scripted", "http"}));
  cmd.add_option("--script", o.script, "response script for the scripted backend")
      ->check(CLI::ExistingFile);
  cmd.add_option("--corpus", o.corpus, "directory of knowledge-base files")
      ->check(CLI::ExistingDirectory);
  cmd.add_option("--rewrites", o.rewrites, "rewrite example bank")->check(CLI::ExistingFile);
  cmd.add_option("--store", o.store, "prebuilt vector store (skips indexing)")
      ->check(CLI::ExistingFile);
  cmd.add_option("--embedder", o.embedder, "embedding model")
      ->check(CLI::IsMember({"deterministic", "remote"}));
}

// Everything a subcommand needs, wired once. Not movable: the engine holds
// references into it.
struct Context {
  EngineConfig config;
  std::shared_ptr<LlmBackend> backend;
  std::unique_ptr<Embedder> embedder;
  std::unique_ptr<VectorStore> store;
  std::unique_ptr<RewriteExampleIndex> examples;
  std::unique_ptr<Engine> engine;

  Context() = default;
  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;
};

EngineConfig load_config(const CommonOptions& o) {
  if (o.config_path.empty()) return {};
  std::ifstream in(o.config_path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + o.config_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidConfig, o.config_path + ": " + e.what());
  }
  return engine_config_from_json(j);
}

std::unique_ptr<Embedder> make_embedder(const CommonOptions& o) {
  if (o.embedder == "remote") {
    return std::make_unique<RemoteEmbedder>(HttpBackendOptions::from_env(),
                                            kRemoteEmbeddingModel, kRemoteEmbeddingDim);
  }
  return std::make_unique<DeterministicEmbedder>();
}

std::shared_ptr<LlmBackend> make_backend(const CommonOptions& o,
                                         const std::string& fallback_script) {
  if (o.backend == "http") {
    return std::make_shared<RetryingBackend>(
        std::make_shared<HttpBackend>(HttpBackendOptions::from_env()), 3);
  }
  const auto path = !o.script.empty() ? o.script : fallback_script;
  if (path.empty() || !fs::exists(path)) {
    throw Error(ErrorCode::kInvalidConfig, "scripted backend needs --script <file>");
  }
  return std::shared_ptr<LlmBackend>(ScriptedBackend::from_file(path));
}

std::unique_ptr<Context> build_context(const CommonOptions& o,
                                       const std::string& fallback_script = fixture("goals/script.json")) {
  auto ctx = std::make_unique<Context>();
  ctx->config = load_config(o);
  ctx->backend = make_backend(o, fallback_script);
  ctx->embedder = make_embedder(o);
  if (!o.store.empty()) {
    ctx->store = std::make_unique<VectorStore>(VectorStore::load(o.store));
  } else {
    const auto dir = o.corpus.empty() ? fixture("corpus") : o.corpus;
    ctx->store = std::make_unique<VectorStore>(index_knowledge(load_knowledge_dir(dir), *ctx->embedder));
  }
  const auto bank = o.rewrites.empty() ? fixture("rewrites.json") : o.rewrites;
  if (fs::exists(bank)) {
    ctx->examples = std::make_unique<RewriteExampleIndex>(load_rewrite_bank(bank), *ctx->embedder);
  }
  ctx->engine = std::make_unique<Engine>(ctx->config, *ctx->backend, *ctx->embedder, *ctx->store,
                                         ctx->examples.get());
  return ctx;
}

void print_history(std::ostream& out, const DialogueHistory& history) {
  const auto rendered = render_history(history);
  if (!rendered.empty()) out << rendered << '\n';
}

// A goals argument may name a JSON file or a directory holding goals.json
// (and optionally script.json for the scripted backend).
struct GoalSource {
  std::vector<SimulatedUserGoal> goals;
  std::string script;
};

GoalSource load_goal_source(const std::string& path) {
  GoalSource src;
  if (fs::is_directory(path)) {
    src.goals = load_goals((fs::path(path) / "goals.json").string());
    auto script = fs::path(path) / "script.json";
    if (fs::exists(script)) src.script = script.string();
  } else {
    src.goals = load_goals(path);
    auto script = fs::path(path).parent_path() / "script.json";
    if (fs::exists(script)) src.script = script.string();
  }
  return src;
}

int run_ingest(const std::string& dir, const std::string& out_path, const CommonOptions& o,
               std::ostream& out) {
  auto embedder = make_embedder(o);
  auto kbs = load_knowledge_dir(dir);
  auto store = index_knowledge(kbs, *embedder);
  store.save(out_path);
  out << "indexed " << store.size() << " entries from " << kbs.size() << " knowledge bases -> "
      << out_path << '\n';
  return 0;
}

int run_chat(std::optional<int> level, const std::string& scenario, bool show_trace,
             const std::string& save, const CommonOptions& o, std::istream& in,
             std::ostream& out) {
  auto ctx = build_context(o);
  ConversationState state{level ? ProactivityLevel(*level) : ctx->config.level,
                          DialogueHistory("chat")};
  auto emit = [&](const RespondResult& r) {
    if (show_trace) out << r.trace.prompt_text << '\n' << to_json(r.trace).dump(2) << '\n';
    out << kAssistantLabel << ": " << r.assistant_text << '\n';
  };
  if (!scenario.empty()) emit(ctx->engine->respond(state, InitiationEvent{scenario}));
  std::string line;
  while (true) {
    out << kDriverLabel << "> " << std::flush;
    if (!std::getline(in, line)) break;
    if (text::trim(line).empty()) continue;
    if (text::trim(line) == "/quit") break;
    emit(ctx->engine->respond(state, UserUtterance{line}));
  }
  out << '\n';
  if (!save.empty()) {
    std::ofstream f(save);
    f << transcript_to_json(state.history, state.level).dump(2) << '\n';
  }
  return 0;
}

int run_simulate(const std::string& goals_path, const std::string& goal_id,
                 const std::string& save, const CommonOptions& o, std::ostream& out) {
  auto src = load_goal_source(goals_path);
  auto ctx = build_context(o, src.script);
  const SimulatedUserGoal* goal = nullptr;
  for (const auto& g : src.goals) {
    if (goal_id.empty() || g.id == goal_id) {
      goal = &g;
      break;
    }
  }
  if (goal == nullptr) throw Error(ErrorCode::kInvalidConfig, "no goal '" + goal_id + "'");
  auto outcome = run_dialogue(*ctx->engine, *ctx->backend, *goal);
  print_history(out, outcome.conversation);
  out << "terminated: " << termination_name(outcome.terminated) << " after "
      << outcome.turn_count << " turns\n";
  if (!save.empty()) {
    std::ofstream f(save);
    f << transcript_to_json(outcome.conversation, goal->level).dump(2) << '\n';
  }
  if (outcome.terminated == Termination::kError) {
    throw Error(ErrorCode::kPreconditionFailed, "dialogue failed: " + outcome.error);
  }
  return 0;
}

int run_eval(const std::string& goals_path, const std::string& level_filter,
             const std::string& judge, int judge_count, int workers, const std::string& out_dir,
             const CommonOptions& o, std::ostream& out) {
  auto src = load_goal_source(goals_path);
  if (level_filter != "all") {
    const ProactivityLevel level(std::stoi(level_filter));
    std::erase_if(src.goals, [&](const auto& g) { return g.level != level; });
  }
  auto ctx = build_context(o, src.script);

  KeywordJudge keyword;
  std::vector<std::unique_ptr<LlmRubricJudge>> llm_judges;
  EvalConfig cfg;
  cfg.goals = std::move(src.goals);
  cfg.engine = ctx->engine.get();
  cfg.simulator_backend = ctx->backend.get();
  cfg.workers = workers;
  for (int i = 0; i < judge_count; ++i) {
    if (judge == "llm") {
      llm_judges.push_back(std::make_unique<LlmRubricJudge>(*ctx->backend));
      cfg.judges.push_back(llm_judges.back().get());
    } else {
      cfg.judges.push_back(&keyword);
    }
  }
  cfg.run_metadata = {{"backend", o.backend},
                      {"embedder", o.embedder},
                      {"level_strategy", level_filter},
                      {"config", to_json(ctx->config).dump()}};
  auto run = run_evaluation(cfg);
  out << render_report_table(run.report);
  if (!out_dir.empty()) {
    write_eval_outputs(run, out_dir);
    out << "wrote " << out_dir << '\n';
  }
  return 0;
}

ApiServer* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

int run_serve(const std::string& host, int port, const std::string& static_dir,
              const std::string& run_dir, const CommonOptions& o, std::ostream& out) {
  auto ctx = build_context(o);
  SessionService service(*ctx->engine, run_dir);
  ApiServer server(service, static_dir);
  if (!server.bind(host, port)) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  out << "listening on http://" << host << ":" << port << std::endl;
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.listen();
  g_server = nullptr;
  return 0;
}

int run_dump_prompts(int level_value, const std::string& question, const CommonOptions& o,
                     std::ostream& out) {
  auto config = load_config(o);
  const ProactivityLevel level(level_value);
  config.level = level;
  const auto& strategy = default_catalog().spec(level).strategy_text;
  out << "=== Strategy (level " << level_value << ")\n" << strategy << "\n\n";

  DialogueHistory history("sample");
  auto kind = InputKind::kQuestion;
  std::string input = question;
  if (level.assistant_initiates() && question.empty()) {
    kind = InputKind::kEvent;
    input = "The driver has just started the morning commute.";
  } else if (input.empty()) {
    input = "I'm feeling hot";
  }
  auto request = build_react_prompt(config, history, input, strategy, {}, kind);
  out << "=== ReAct prompt\n";
  for (const auto& m : request.messages) {
    out << "[" << role_name(m.role) << "]\n" << m.content << "\n\n";
  }
  out << "(stop: ";
  for (const auto& s : request.stop_sequences) out << '"' << s << '"';
  out << ")\n\n";
  auto reflect = build_reflect_prompt(strategy, "", "<candidate answer>", config.temperature);
  out << "=== Reflect prompt\n";
  for (const auto& m : reflect.messages) {
    out << "[" << role_name(m.role) << "]\n" << m.content << "\n\n";
  }
  return 0;
}

}  // namespace

int dispatch(int argc, char** argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Proactive in-vehicle assistant engine", "proactiva"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* ingest = app.add_subcommand("ingest", "index a knowledge-base directory");
  std::string ingest_dir, ingest_out = "store.json";
  ingest->add_option("dir", ingest_dir, "knowledge-base directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  ingest->add_option("--out", ingest_out, "output store file");
  add_common(*ingest, common);

  auto* chat = app.add_subcommand("chat", "terminal conversation with the engine");
  int chat_level = 1;
  std::string chat_scenario, chat_save;
  bool chat_trace = false;
  chat->add_option("--level", chat_level, "proactivity level (default: from --config)")->check(CLI::Range(1, 5));
  chat->add_option("--scenario", chat_scenario, "opening event (levels 4-5)");
  chat->add_option("--save", chat_save, "write the transcript here on exit");
  chat->add_flag("--trace", chat_trace, "print prompts and reasoning traces");
  add_common(*chat, common);

  auto* simulate = app.add_subcommand("simulate", "run one simulated dialogue");
  std::string sim_goals = fixture("goals"), sim_goal, sim_save;
  simulate->add_option("--goals", sim_goals, "goal file or directory");
  simulate->add_option("--goal", sim_goal, "goal id (default: first)");
  simulate->add_option("--save", sim_save, "write the transcript here");
  add_common(*simulate, common);

  auto* eval = app.add_subcommand("eval", "batch evaluation over simulated dialogues");
  std::string eval_goals, eval_level = "all", eval_judge = "keyword", eval_out;
  int eval_judges = 1, eval_workers = 4;
  eval->add_option("--goals", eval_goals, "goal file or directory")->required();
  eval->add_option("--level-strategy", eval_level, "1..5 or all")
      ->check(CLI::IsMember({"1", "2", "3", "4", "5", "all"}));
  eval->add_option("--judge", eval_judge)->check(CLI::IsMember({"keyword", "llm"}));
  eval->add_option("--judges", eval_judges, "judge count (1, or 3 for majority)")
      ->check(CLI::IsMember({1, 3}));
  eval->add_option("--workers", eval_workers)->check(CLI::Range(1, 64));
  eval->add_option("--out", eval_out, "output directory");
  add_common(*eval, common);

  auto* serve = app.add_subcommand("serve", "HTTP API for live sessions");
  std::string serve_host = "127.0.0.1", serve_static, serve_run_dir = "runs";
  int serve_port = 8080;
  serve->add_option("--host", serve_host);
  serve->add_option("--port", serve_port)->check(CLI::Range(1, 65535));
  serve->add_option("--static", serve_static, "directory served at /")
      ->check(CLI::ExistingDirectory);
  serve->add_option("--run-dir", serve_run_dir, "where session logs and transcripts go");
  add_common(*serve, common);

  auto* dump = app.add_subcommand("dump-prompts", "print the strategy and assembled prompts");
  int dump_level = 1;
  std::string dump_question;
  dump->add_option("--level", dump_level)->required()->check(CLI::Range(1, 5));
  dump->add_option("--question", dump_question, "sample driver input");
  add_common(*dump, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    if (e.get_exit_code() == 0) return 0;
    err << app.help();
    return 2;
  }

  try {
    if (*ingest) return run_ingest(ingest_dir, ingest_out, common, out);
    if (*chat) {
      auto level = chat->count("--level") > 0 ? std::optional<int>(chat_level) : std::nullopt;
      return run_chat(level, chat_scenario, chat_trace, chat_save, common, in, out);
    }
    if (*simulate) return run_simulate(sim_goals, sim_goal, sim_save, common, out);
    if (*eval) {
      return run_eval(eval_goals, eval_level, eval_judge, eval_judges, eval_workers, eval_out,
                      common, out);
    }
    if (*serve) {
      return run_serve(serve_host, serve_port, serve_static, serve_run_dir, common, out);
    }
    if (*dump) return run_dump_prompts(dump_level, dump_question, common, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int dispatch(int argc, char** argv) { return dispatch(argc, argv, std::cin, std::cout, std::cerr); }

}  // namespace proactiva
