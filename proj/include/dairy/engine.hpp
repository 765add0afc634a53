#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dairy/config.hpp"
#include "dairy/core.hpp"
#include "dairy/docstore.hpp"
#include "dairy/gateway.hpp"
#include "dairy/knowledge.hpp"
#include "dairy/lactation.hpp"
#include "dairy/router.hpp"
#include "dairy/sql_agent.hpp"

namespace dairy {

// Backend for a registry entry, or the configured live endpoint when `model` is empty and no
// default model is set. Throws ConfigError for an unknown name.
std::shared_ptr<ChatBackend> make_backend(const SystemConfig& config, const std::string& model = "");

// Copy of `config` whose wire model name and endpoint come from the registry entry `model`.
SystemConfig config_for_model(const SystemConfig& config, const std::string& model);

struct TurnResult {
  ConversationTurn turn;
  double total_seconds = 0.0;

  json to_json() const;  // {turn_id, session, question, route, answer, trace, timing}
};

// Serialization that never throws on invalid UTF-8 in model output.
std::string dump_json(const json& j, int indent = -1);

// Finished turns: one JSON line per turn in <dir>/<YYYY-MM-DD>.jsonl plus an in-memory index.
// An empty directory keeps turns in memory only.
class TraceStore {
 public:
  explicit TraceStore(std::filesystem::path dir);

  void append(const ConversationTurn& turn);
  std::optional<ConversationTurn> find(const std::string& turn_id) const;
  std::size_t size() const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::map<std::string, ConversationTurn> index_;
};

class RequestError : public Error {
 public:
  explicit RequestError(const std::string& what) : Error("request", what) {}
};

// The end-to-end pipeline: supervisor, routed team, trace capture, sessions.
class Engine {
 public:
  Engine(SystemConfig config, std::shared_ptr<ChatBackend> backend);
  ~Engine();

  // Supervised when `direct` is empty. Team failures become error answers; only invalid
  // requests throw (ValidationError, RequestError).
  TurnResult handle_turn(const UserQuery& query, std::optional<RouteLabel> direct = std::nullopt);

  std::vector<ConversationTurn> session_turns(const std::string& session_id) const;
  std::optional<ConversationTurn> find_turn(const std::string& turn_id) const { return traces_.find(turn_id); }

  const SystemConfig& config() const { return config_; }
  ModelGateway& gateway() { return *gateway_; }
  std::string model_description() const { return gateway_->describe(); }

 private:
  struct Session {
    std::mutex turn_mu;
    std::vector<ConversationTurn> turns;
  };
  struct Stores;

  Session& session(const std::string& id);
  AgentAnswer run_team(RouteLabel label, const UserQuery& query, Trace& trace, const std::string& parent);
  std::string next_turn_id();

  SystemConfig config_;
  std::shared_ptr<ModelGateway> gateway_;
  Router router_;
  std::unique_ptr<Stores> stores_;
  TraceStore traces_;

  mutable std::mutex sessions_mu_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
  std::mutex id_mu_;
  std::uint64_t id_counter_ = 0;
  std::uint64_t id_salt_ = 0;
};

}  // namespace dairy
