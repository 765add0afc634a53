#include <gtest/gtest.h>

#include <random>

#include "dairy/router.hpp"
#include "support/helpers.hpp"

using namespace dairy;

TEST(ParseRouteTest, ExactLabels) {
  EXPECT_EQ(parse_route_decision("text_subagent").label, RouteLabel::Text);
  EXPECT_EQ(parse_route_decision("sql_subagent").label, RouteLabel::Sql);
  EXPECT_EQ(parse_route_decision("nosql_subagent").label, RouteLabel::NoSql);
  EXPECT_EQ(parse_route_decision("model_subagent").label, RouteLabel::Model);
  EXPECT_EQ(parse_route_decision("clarify_subagent").label, RouteLabel::Clarify);
  EXPECT_EQ(parse_route_decision("  SQL_Subagent \n").label, RouteLabel::Sql);
  EXPECT_FALSE(parse_route_decision("sql_subagent").fallback_applied);
}

TEST(ParseRouteTest, SubstringPriority) {
  EXPECT_EQ(parse_route_decision("I would use the nosql_subagent here").label, RouteLabel::NoSql);
  EXPECT_EQ(parse_route_decision("sql_subagent or text_subagent").label, RouteLabel::Sql);
  EXPECT_EQ(parse_route_decision("text_subagent, maybe model_subagent").label, RouteLabel::Model);
  EXPECT_EQ(parse_route_decision("This is unclear, so clarify_subagent, not sql_subagent.").label,
            RouteLabel::Clarify);
}

TEST(ParseRouteTest, FallbackToClarify) {
  for (const char* out : {"", "SQL", "the database one", "sql subagent", "route: 2"}) {
    const auto d = parse_route_decision(out);
    EXPECT_EQ(d.label, RouteLabel::Clarify) << out;
    EXPECT_TRUE(d.fallback_applied) << out;
    EXPECT_EQ(d.raw_model_output, out);
  }
}

TEST(ParseRouteProperty, TotalAndDeterministic) {
  std::mt19937_64 rng(9);
  const std::vector<std::string> parts = {"sql", "_subagent", "text", "no", "model", " ", "clarify", "x", "\n"};
  std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 1), len(0, 10);
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    for (auto n = len(rng); n > 0; --n) s += parts[pick(rng)];
    const auto a = parse_route_decision(s);
    const auto b = parse_route_decision(s);
    ASSERT_NE(a.label, RouteLabel::Unknown);
    ASSERT_EQ(a.label, b.label);
    ASSERT_EQ(a.fallback_applied, b.fallback_applied);
  }
}

TEST(RouterTest, ExemplarQuestionsRouteAsScripted) {
  support::TempDir tmp;
  const auto cfg = support::fixture_config(tmp.path());
  ModelGateway gw(support::benchmark_mock());
  Router router(gw, cfg);
  const auto exemplars = json::parse(support::read_file(support::data_path("eval/exemplars.json")));
  ASSERT_EQ(exemplars.size(), 6u);
  for (const auto& e : exemplars) {
    const auto d = router.classify(UserQuery::make(e["question"].get<std::string>(), "s"));
    EXPECT_EQ(to_string(d.label), e["expected_route"].get<std::string>()) << e["question"];
  }
  EXPECT_EQ(gw.calls(), 6u);
}

TEST(RouterTest, GatewayErrorsPropagate) {
  support::TempDir tmp;
  const auto cfg = support::fixture_config(tmp.path());
  ModelGateway gw(std::make_shared<MockChatBackend>(
      MockScript::from_json(json::array({{{"match", "Question"}, {"response", ""}, {"fault", "timeout"}}}))));
  Router router(gw, cfg);
  EXPECT_THROW(router.classify(UserQuery::make("how many cows", "s")), GatewayError);
}

TEST(ClarifyTest, FixedTemplate) {
  const auto a = clarify_response();
  EXPECT_EQ(a.route, RouteLabel::Clarify);
  EXPECT_EQ(a.body, clarify_template());
  EXPECT_TRUE(a.citations.empty());
  EXPECT_EQ(clarify_template().rfind("Not sure what your intention is.", 0), 0u);
}
