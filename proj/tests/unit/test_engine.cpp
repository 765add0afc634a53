#include <gtest/gtest.h>

#include <future>
#include <set>
#include <thread>

#include "dairy/engine.hpp"
#include "dairy/eval.hpp"
#include "support/helpers.hpp"

using namespace dairy;

namespace {

const TraceSpan* find_span(const ConversationTurn& t, const std::string& name) {
  for (const auto& s : t.spans) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<std::string> span_names(const ConversationTurn& t) {
  std::vector<std::string> out;
  for (const auto& s : t.spans) out.push_back(s.name);
  return out;
}

}  // namespace

TEST(EngineTest, SupervisedSqlTurnNestsTeamUnderRouteHop) {
  support::TempDir tmp;
  Engine engine(support::fixture_config(tmp.path()), support::benchmark_mock());
  const auto r = engine.handle_turn(UserQuery::make("Show me animal IDs in my farm with milk yield above 43 kg", "s1"));
  EXPECT_EQ(r.turn.route, RouteLabel::Sql);
  ASSERT_TRUE(r.turn.answer.has_value());
  EXPECT_FALSE(r.turn.answer->error.has_value());
  EXPECT_EQ(span_names(r.turn), (std::vector<std::string>{"supervisor", "route_from_supervisor", "generate_sql",
                                                          "validate_sql", "execute_query", "phrase_result"}));
  const auto* root = find_span(r.turn, "supervisor");
  const auto* hop = find_span(r.turn, "route_from_supervisor");
  ASSERT_TRUE(root && hop);
  EXPECT_FALSE(root->parent_id.has_value());
  EXPECT_EQ(hop->parent_id, root->span_id);
  EXPECT_EQ(hop->payload["subagent"], "sql_subagent");
  EXPECT_EQ(root->payload["mode"], "supervised");
  EXPECT_EQ(root->payload["route"], "SQL");
  for (const auto& s : r.turn.spans) {
    if (s.name != "supervisor" && s.name != "route_from_supervisor") EXPECT_EQ(s.parent_id, hop->span_id) << s.name;
  }
  EXPECT_NE(r.turn.answer->body.find("Showing the first 20 of 49 total records."), std::string::npos);
  EXPECT_FALSE(r.turn.turn_id.empty());
  EXPECT_GE(r.total_seconds, 0.0);
}

TEST(EngineTest, DirectModeSkipsSupervisorCall) {
  support::TempDir tmp;
  auto mock = support::benchmark_mock();
  Engine engine(support::fixture_config(tmp.path()), mock);
  const auto r =
      engine.handle_turn(UserQuery::make("Show me animal IDs in my farm with milk yield above 43 kg", "s1"), RouteLabel::Sql);
  EXPECT_EQ(r.turn.route, RouteLabel::Sql);
  EXPECT_FALSE(find_span(r.turn, "route_from_supervisor"));
  EXPECT_EQ(find_span(r.turn, "supervisor")->payload["mode"], "direct");
  // generate_sql and phrase_result only
  EXPECT_EQ(engine.gateway().calls(), 2u);
}

TEST(EngineTest, ClarifyTurnHasExactlyTwoSpans) {
  support::TempDir tmp;
  Engine engine(support::fixture_config(tmp.path()), support::benchmark_mock());
  const auto r = engine.handle_turn(UserQuery::make("Why is your system always wrong?", "s1"));
  EXPECT_EQ(r.turn.route, RouteLabel::Clarify);
  EXPECT_EQ(span_names(r.turn), (std::vector<std::string>{"supervisor", "customer service"}));
  EXPECT_EQ(r.turn.answer->body, clarify_template());
  EXPECT_FALSE(r.turn.answer->error.has_value());
}

TEST(EngineTest, EveryRoutedBenchmarkTurnHasAtLeastThreeSpans) {
  support::TempDir tmp;
  Engine engine(support::fixture_config(tmp.path()), support::benchmark_mock());
  for (const auto& item : eval::load_items(support::data_path("eval/phase2.json"))) {
    const auto r = engine.handle_turn(UserQuery::make(item.question, "bench"));
    if (r.turn.route == RouteLabel::Clarify) {
      EXPECT_EQ(r.turn.spans.size(), 2u) << item.item_id;
    } else {
      EXPECT_GE(r.turn.spans.size(), 3u) << item.item_id;
    }
  }
}

TEST(EngineTest, TimeoutFaultNamesFailingStage) {
  support::TempDir tmp;
  const std::string q = "Show me animal IDs in my farm with milk yield above 43 kg";
  Engine engine(support::fixture_config(tmp.path()), support::benchmark_mock_with({{q, "generate_sql", "", "timeout"}}));
  const auto r = engine.handle_turn(UserQuery::make(q, "s1"));
  ASSERT_TRUE(r.turn.answer->error.has_value());
  EXPECT_EQ(r.turn.answer->error->stage, "generate_sql");
  EXPECT_TRUE(find_span(r.turn, "generate_sql")->failed);
  EXPECT_FALSE(find_span(r.turn, "execute_query"));
  EXPECT_EQ(find_span(r.turn, "supervisor")->payload["error_stage"], "generate_sql");
}

TEST(EngineTest, SupervisorFaultFallsBackToClarifyWithError) {
  support::TempDir tmp;
  const std::string q = "Who founded Cargill";
  Engine engine(support::fixture_config(tmp.path()), support::benchmark_mock_with({{q, "supervisor", "", "transport"}}));
  const auto r = engine.handle_turn(UserQuery::make(q, "s1"));
  EXPECT_EQ(r.turn.route, RouteLabel::Clarify);
  ASSERT_TRUE(r.turn.answer->error.has_value());
  EXPECT_EQ(r.turn.answer->error->stage, "supervisor");
  EXPECT_TRUE(find_span(r.turn, "supervisor")->failed);
}

TEST(EngineTest, MissingStoreOnlyFailsItsOwnTeam) {
  support::TempDir tmp;
  auto cfg = support::fixture_config(tmp.path());
  cfg.nosql_documents = tmp / "missing.json";
  Engine engine(cfg, support::benchmark_mock());
  const auto bad = engine.handle_turn(UserQuery::make("Which herds are represented in my mmmooogle data?", "s1"));
  ASSERT_TRUE(bad.turn.answer->error.has_value());
  EXPECT_EQ(bad.turn.answer->error->stage, "execute_dsl_code");
  const auto good = engine.handle_turn(UserQuery::make("How many cows are there in my farm database right now?", "s1"));
  EXPECT_FALSE(good.turn.answer->error.has_value());
}

TEST(EngineTest, UnknownDirectRouteIsRequestError) {
  support::TempDir tmp;
  Engine engine(support::fixture_config(tmp.path()), support::benchmark_mock());
  EXPECT_THROW(engine.handle_turn(UserQuery::make("anything", "s1"), RouteLabel::Unknown), RequestError);
  EXPECT_THROW(engine.handle_turn(UserQuery::make("   ", "s1")), ValidationError);
}

TEST(EngineTest, SessionsKeepTurnOrder) {
  support::TempDir tmp;
  Engine engine(support::fixture_config(tmp.path()), support::benchmark_mock());
  const auto a = engine.handle_turn(UserQuery::make("Who founded Cargill", "farm-a"));
  const auto b = engine.handle_turn(UserQuery::make("Why is your system always wrong?", "farm-a"));
  engine.handle_turn(UserQuery::make("Who founded Cargill", "farm-b"));
  const auto turns = engine.session_turns("farm-a");
  ASSERT_EQ(turns.size(), 2u);
  EXPECT_EQ(turns[0].turn_id, a.turn.turn_id);
  EXPECT_EQ(turns[1].turn_id, b.turn.turn_id);
  EXPECT_NE(a.turn.turn_id, b.turn.turn_id);
  EXPECT_TRUE(engine.session_turns("nobody").empty());
  EXPECT_EQ(engine.find_turn(a.turn.turn_id)->query.text, "Who founded Cargill");
}

TEST(EngineProperty, ConcurrentSessionsMatchSerialAnswers) {
  const auto exemplars = json::parse(support::read_file(support::data_path("eval/exemplars.json")));
  std::vector<std::string> questions;
  for (const auto& e : exemplars) questions.push_back(e.at("question").get<std::string>());

  support::TempDir tmp;
  auto cfg = support::fixture_config(tmp.path());
  std::vector<AgentAnswer> serial;
  {
    Engine engine(cfg, support::benchmark_mock());
    for (const auto& q : questions) serial.push_back(*engine.handle_turn(UserQuery::make(q, "serial")).turn.answer);
  }
  cfg.gateway_pool_size = 4;
  Engine engine(cfg, support::benchmark_mock());
  for (int round = 0; round < 3; ++round) {
    std::vector<std::future<AgentAnswer>> futures;
    for (std::size_t i = 0; i < questions.size(); ++i) {
      futures.push_back(std::async(std::launch::async, [&, i] {
        return *engine.handle_turn(UserQuery::make(questions[i], "s" + std::to_string(i))).turn.answer;
      }));
    }
    for (std::size_t i = 0; i < questions.size(); ++i) {
      auto got = futures[i].get();
      got.elapsed = serial[i].elapsed;
      EXPECT_EQ(got, serial[i]) << questions[i];
    }
  }
}

TEST(TraceStoreTest, PersistsAndReloadsTurns) {
  support::TempDir tmp;
  const auto cfg = support::fixture_config(tmp.path(), true);
  std::string id;
  json original;
  {
    Engine engine(cfg, support::benchmark_mock());
    const auto r = engine.handle_turn(UserQuery::make("Compare parity 1 milk yield btw US and EU cows", "s1"));
    id = r.turn.turn_id;
    original = json(r.turn);
  }
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(cfg.trace_dir)) files += e.path().extension() == ".jsonl";
  EXPECT_EQ(files, 1u);
  // a torn write at the end of the file must not hide the earlier turn
  for (const auto& e : std::filesystem::directory_iterator(cfg.trace_dir)) {
    std::ofstream(e.path(), std::ios::app) << "{\"turn_id\": \"partial";
  }
  TraceStore reloaded(cfg.trace_dir);
  EXPECT_EQ(reloaded.size(), 1u);
  const auto t = reloaded.find(id);
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(json(*t), original);
  EXPECT_FALSE(reloaded.find("nope").has_value());
}

TEST(TraceStoreTest, EmptyDirectoryKeepsTurnsInMemory) {
  support::TempDir tmp;
  TraceStore store{std::filesystem::path()};
  auto turn = new_turn(UserQuery::make("q", "s"));
  turn.turn_id = "t-1";
  store.append(turn);
  EXPECT_EQ(store.size(), 1u);
  EXPECT_TRUE(std::filesystem::is_empty(tmp.path()));
}

TEST(TurnResultTest, JsonShape) {
  support::TempDir tmp;
  Engine engine(support::fixture_config(tmp.path()), support::benchmark_mock());
  const auto r = engine.handle_turn(UserQuery::make("Who founded Cargill", "s1"));
  const auto j = r.to_json();
  for (const char* k : {"turn_id", "session", "question", "route", "answer", "trace", "timing"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_EQ(j["route"], "TEXT");
  EXPECT_EQ(j["trace"].size(), r.turn.spans.size());
  EXPECT_EQ(j["timing"]["spans"].size(), r.turn.spans.size());
  EXPECT_DOUBLE_EQ(j["timing"]["total_seconds"].get<double>(), r.total_seconds);
}

TEST(DumpJsonTest, InvalidUtf8IsReplaced) {
  const std::string bad = std::string("caf") + static_cast<char>(0xC3);
  EXPECT_NO_THROW(dump_json(json{{"x", bad}}));
  EXPECT_NE(dump_json(json{{"x", bad}}).find("caf"), std::string::npos);
}

TEST(ModelRegistryTest, ConfigForModelAndBackends) {
  auto cfg = SystemConfig::load(support::source_dir() / "config" / "dairy.json");
  const auto local = config_for_model(cfg, "local");
  EXPECT_EQ(local.model_name, "local-model");
  EXPECT_EQ(local.model_endpoint, "http://127.0.0.1:8080");
  EXPECT_THROW(config_for_model(cfg, "nope"), ConfigError);
  EXPECT_THROW(make_backend(cfg, "nope"), ConfigError);
  EXPECT_NE(make_backend(cfg, "mock")->describe().find("mock"), std::string::npos);
  EXPECT_NE(make_backend(cfg, "local")->describe().find("127.0.0.1:8080"), std::string::npos);
  cfg.default_model.clear();
  EXPECT_EQ(config_for_model(cfg, "").model_name, cfg.model_name);
}
