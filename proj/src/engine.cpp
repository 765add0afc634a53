#include "dairy/engine.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "dairy/text.hpp"

namespace dairy {

std::shared_ptr<ChatBackend> make_backend(const SystemConfig& config, const std::string& model) {
  const std::string name = model.empty() ? config.default_model : model;
  if (name.empty()) {
    HttpEndpoint ep;
    ep.base_url = config.model_endpoint;
    ep.path = config.chat_path;
    ep.timeout_s = config.timeout_s;
    return std::make_shared<HttpChatBackend>(ep);
  }
  const ModelEntry* m = config.find_model(name);
  if (!m) throw ConfigError("unknown model \"" + name + "\" (not in the models registry)");
  if (m->backend == "mock") return std::make_shared<MockChatBackend>(MockScript::load(m->mock_script));
  HttpEndpoint ep;
  ep.base_url = m->endpoint.empty() ? config.model_endpoint : m->endpoint;
  ep.path = config.chat_path;
  ep.timeout_s = config.timeout_s;
  return std::make_shared<HttpChatBackend>(ep);
}

SystemConfig config_for_model(const SystemConfig& config, const std::string& model) {
  SystemConfig c = config;
  const std::string name = model.empty() ? config.default_model : model;
  if (name.empty()) return c;
  const ModelEntry* m = config.find_model(name);
  if (!m) throw ConfigError("unknown model \"" + name + "\" (not in the models registry)");
  c.model_name = m->model_name;
  if (m->backend == "http" && !m->endpoint.empty()) c.model_endpoint = m->endpoint;
  return c;
}

std::string dump_json(const json& j, int indent) { return j.dump(indent, ' ', false, json::error_handler_t::replace); }

json TurnResult::to_json() const {
  json j;
  j["turn_id"] = turn.turn_id;
  j["session"] = turn.query.session_id;
  j["question"] = turn.query.text;
  j["received_at"] = format_timestamp(turn.query.received_at);
  j["route"] = std::string(dairy::to_string(turn.route));
  j["answer"] = turn.answer ? json(*turn.answer) : json(nullptr);
  j["trace"] = turn.spans;
  json per_span = json::object();
  for (const auto& s : turn.spans) per_span[s.span_id] = s.duration;
  j["timing"] = {{"total_seconds", total_seconds}, {"spans", per_span}};
  return j;
}

// ---- trace store ----

TraceStore::TraceStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (dir_.empty() || !std::filesystem::is_directory(dir_)) return;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.path().extension() != ".jsonl") continue;
    std::ifstream in(entry.path());
    std::string line;
    while (std::getline(in, line)) {
      if (text::trim(line).empty()) continue;
      try {
        auto t = json::parse(line).get<ConversationTurn>();
        index_[t.turn_id] = std::move(t);
      } catch (const std::exception&) {
        // a torn trailing line from an interrupted write; the rest of the file is still usable
      }
    }
  }
}

void TraceStore::append(const ConversationTurn& turn) {
  std::lock_guard lk(mu_);
  if (!dir_.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    const auto day = format_timestamp(turn.query.received_at).substr(0, 10);
    std::ofstream out(dir_ / (day + ".jsonl"), std::ios::app);
    if (out) out << dump_json(json(turn)) << '\n';
  }
  index_[turn.turn_id] = turn;
}

std::optional<ConversationTurn> TraceStore::find(const std::string& turn_id) const {
  std::lock_guard lk(mu_);
  auto it = index_.find(turn_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t TraceStore::size() const {
  std::lock_guard lk(mu_);
  return index_.size();
}

// ---- stores ----

namespace {

class UnavailableWebProvider final : public WebSearchProvider {
 public:
  explicit UnavailableWebProvider(std::string why) : why_(std::move(why)) {}
  std::vector<WebResult> search(std::string_view) override { throw SearchError(why_); }

 private:
  std::string why_;
};

}  // namespace

// Data sources load on first use so that one missing store only fails its own team.
struct Engine::Stores {
  std::mutex mu;
  std::unique_ptr<SqlStore> sql;
  std::unique_ptr<DocumentStore> docs;
  std::unique_ptr<LiteratureIndex> index;
  std::unique_ptr<WebSearchProvider> web;
  std::unique_ptr<ParameterTable> params;

  const SqlStore& sql_store(const SystemConfig& c) {
    std::lock_guard lk(mu);
    if (!sql) {
      if (!std::filesystem::exists(c.sql_store) && std::filesystem::exists(c.sql_csv)) ingest_csv(c.sql_csv, c.sql_store);
      sql = std::make_unique<SqlStore>(c.sql_store);
    }
    return *sql;
  }

  const DocumentStore& doc_store(const SystemConfig& c) {
    std::lock_guard lk(mu);
    if (!docs) docs = std::make_unique<DocumentStore>(DocumentStore::load(c.nosql_documents));
    return *docs;
  }

  // Never throws: an unreadable corpus yields an empty index, whose retrieval step fails.
  const LiteratureIndex& literature(const SystemConfig& c) {
    std::lock_guard lk(mu);
    if (!index) {
      std::shared_ptr<Embedder> emb;
      if (c.embedder == "remote") {
        emb = std::make_shared<RemoteEmbedder>(c.embedding_endpoint, c.embedding_model);
      } else {
        emb = std::make_shared<HashingEmbedder>();
      }
      auto idx = std::make_unique<LiteratureIndex>(emb);
      try {
        idx->ingest(c.corpus);
      } catch (const Error&) {
        idx = std::make_unique<LiteratureIndex>(emb);
      }
      index = std::move(idx);
    }
    return *index;
  }

  WebSearchProvider& web_provider(const SystemConfig& c) {
    std::lock_guard lk(mu);
    if (!web) {
      try {
        if (c.web_provider == "http") {
          web = std::make_unique<HttpWebProvider>(c.web_url_template, c.timeout_s);
        } else {
          web = std::make_unique<FixtureWebProvider>(c.web_fixture);
        }
      } catch (const Error& e) {
        web = std::make_unique<UnavailableWebProvider>(e.what());
      }
    }
    return *web;
  }

  const ParameterTable& milkbot(const SystemConfig& c) {
    std::lock_guard lk(mu);
    if (!params) params = std::make_unique<ParameterTable>(ParameterTable::load(c.milkbot_params));
    return *params;
  }
};

// ---- engine ----

namespace {

GatewayOptions gateway_options(const SystemConfig& c) {
  GatewayOptions o;
  o.delimiters.open = c.reasoning_open;
  o.delimiters.close = c.reasoning_close;
  o.pool_size = c.gateway_pool_size;
  return o;
}

AgentAnswer error_answer(RouteLabel route, const std::string& stage, const std::string& detail) {
  AgentAnswer a;
  a.route = route;
  a.body = "Sorry, something went wrong while answering. (" + stage + " failed: " + detail + ")";
  a.error = AnswerError{stage, detail};
  return a;
}

std::string team_stage(RouteLabel label) {
  switch (label) {
    case RouteLabel::Text: return "text_subagent";
    case RouteLabel::Sql: return "sql_subagent";
    case RouteLabel::NoSql: return "nosql_subagent";
    case RouteLabel::Model: return "model_subagent";
    default: return "clarify_subagent";
  }
}

}  // namespace

Engine::Engine(SystemConfig config, std::shared_ptr<ChatBackend> backend)
    : config_(std::move(config)),
      gateway_(std::make_shared<ModelGateway>(std::move(backend), gateway_options(config_))),
      router_(*gateway_, config_),
      stores_(std::make_unique<Stores>()),
      traces_(config_.trace_dir) {
  std::random_device rd;
  id_salt_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

Engine::~Engine() = default;

std::string Engine::next_turn_id() {
  std::uint64_t n;
  {
    std::lock_guard lk(id_mu_);
    n = ++id_counter_;
  }
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(utc_now().time_since_epoch()).count();
  char buf[64];
  std::snprintf(buf, sizeof buf, "t%llx-%06llx-%llu", static_cast<unsigned long long>(ms),
                static_cast<unsigned long long>(id_salt_ & 0xffffff), static_cast<unsigned long long>(n));
  return buf;
}

Engine::Session& Engine::session(const std::string& id) {
  std::lock_guard lk(sessions_mu_);
  auto& slot = sessions_[id];
  if (!slot) slot = std::make_unique<Session>();
  return *slot;
}

std::vector<ConversationTurn> Engine::session_turns(const std::string& session_id) const {
  std::lock_guard lk(sessions_mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return {};
  std::lock_guard tl(it->second->turn_mu);
  return it->second->turns;
}

AgentAnswer Engine::run_team(RouteLabel label, const UserQuery& query, Trace& trace, const std::string& parent) {
  switch (label) {
    case RouteLabel::Text: {
      TextTeam team(*gateway_, config_, stores_->literature(config_), stores_->web_provider(config_));
      return team.run(query, trace, parent);
    }
    case RouteLabel::Sql: {
      const SqlStore* store = nullptr;
      try {
        store = &stores_->sql_store(config_);
      } catch (const Error& e) {
        ScopedSpan span(trace, "execute_query", parent);
        span.fail(e.what());
        return error_answer(label, "execute_query", e.what());
      }
      return SqlTeam(*gateway_, config_, *store).run(query, trace, parent);
    }
    case RouteLabel::NoSql: {
      const DocumentStore* store = nullptr;
      try {
        store = &stores_->doc_store(config_);
      } catch (const Error& e) {
        ScopedSpan span(trace, "execute_dsl_code", parent);
        span.fail(e.what());
        return error_answer(label, "execute_dsl_code", e.what());
      }
      return NoSqlTeam(*gateway_, config_, *store).run(query, trace, parent);
    }
    case RouteLabel::Model: {
      const ParameterTable* params = nullptr;
      try {
        params = &stores_->milkbot(config_);
      } catch (const Error& e) {
        ScopedSpan span(trace, "generate_visuals", parent);
        span.fail(e.what());
        return error_answer(label, "generate_visuals", e.what());
      }
      return ModelTeam(*gateway_, config_, *params).run(query, trace, parent);
    }
    case RouteLabel::Clarify:
    case RouteLabel::Unknown: {
      ScopedSpan span(trace, "customer service", parent);
      return clarify_response();
    }
  }
  return clarify_response();
}

TurnResult Engine::handle_turn(const UserQuery& query, std::optional<RouteLabel> direct) {
  if (direct && *direct == RouteLabel::Unknown) throw RequestError("UNKNOWN is not a routable subagent");
  ConversationTurn turn = new_turn(query);
  turn.turn_id = next_turn_id();
  if (turn.query.received_at == Timestamp{}) turn.query.received_at = utc_now();

  Session& sess = session(query.session_id);
  std::lock_guard turn_lock(sess.turn_mu);

  const auto t0 = std::chrono::steady_clock::now();
  Trace trace;
  AgentAnswer answer;
  RouteLabel label = RouteLabel::Clarify;
  {
    ScopedSpan root(trace, "supervisor");
    root.payload()["mode"] = direct ? "direct" : "supervised";
    std::string team_parent = root.id();
    bool routed = true;
    if (direct) {
      label = *direct;
      root.payload()["route"] = std::string(to_string(label));
    } else {
      try {
        const auto d = router_.classify(turn.query);
        label = d.label == RouteLabel::Unknown ? RouteLabel::Clarify : d.label;
        root.payload()["model_output"] = d.raw_model_output;
        root.payload()["route"] = std::string(to_string(label));
        root.payload()["fallback_applied"] = d.fallback_applied;
      } catch (const Error& e) {
        root.fail(e.what());
        label = RouteLabel::Clarify;
        answer = error_answer(label, "supervisor", e.what());
        routed = false;
      }
    }
    if (routed) {
      try {
        if (!direct && label != RouteLabel::Clarify) {
          ScopedSpan hop(trace, "route_from_supervisor", root.id());
          hop.payload()["subagent"] = std::string(subagent_name(label));
          answer = run_team(label, turn.query, trace, hop.id());
        } else {
          answer = run_team(label, turn.query, trace, team_parent);
        }
      } catch (const std::exception& e) {
        const auto* err = dynamic_cast<const Error*>(&e);
        root.fail(e.what());
        answer = error_answer(label, err ? err->stage() : team_stage(label), e.what());
      }
    }
    answer.route = label;
    if (answer.error) root.payload()["error_stage"] = answer.error->stage;
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  turn.route = label;
  turn.spans = trace.take();
  double total = elapsed;
  for (const auto& s : turn.spans) total = std::max(total, s.duration);
  answer.elapsed = total;
  turn.answer = std::move(answer);

  traces_.append(turn);
  sess.turns.push_back(turn);
  return TurnResult{std::move(turn), total};
}

}  // namespace dairy
