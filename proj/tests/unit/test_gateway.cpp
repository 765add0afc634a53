#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <thread>

#include <httplib.h>

#include "dairy/gateway.hpp"

using namespace dairy;

namespace {

ChatRequest user_request(const std::string& prompt, const std::string& purpose = "") {
  return make_request(purpose, "sys", prompt, "m", 0.0, 64);
}

GatewayError::Kind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const GatewayError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no GatewayError";
  return GatewayError::Kind::Scripting;
}

}  // namespace

TEST(StripReasoningTest, Examples) {
  EXPECT_EQ(strip_reasoning("<think>route it to sql</think>sql_subagent"), "sql_subagent");
  EXPECT_EQ(strip_reasoning("a<think>x</think>b<think>y</think>c"), "abc");
  EXPECT_EQ(strip_reasoning("plain answer\n"), "plain answer");
  EXPECT_EQ(strip_reasoning("answer <think>never closed"), "answer");
  EXPECT_EQ(strip_reasoning("<thi<think>.</think>nk>hidden</think>shown"), "shown");
  EXPECT_EQ(strip_reasoning("[r]x[/r]y", {"[r]", "[/r]"}), "y");
  EXPECT_EQ(strip_reasoning(""), "");
}

TEST(StripReasoningProperty, IdempotentAndDelimiterFree) {
  std::mt19937_64 rng(3);
  const std::vector<std::string> parts = {"<think>", "</think>", "a", "b c", "\n", "<thi", "nk>", "</", "SELECT 1"};
  std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 1), len(0, 12);
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    for (auto n = len(rng); n > 0; --n) s += parts[pick(rng)];
    const auto once = strip_reasoning(s);
    ASSERT_EQ(strip_reasoning(once), once) << s;
    ASSERT_EQ(once.find("<think>"), std::string::npos) << s;
  }
}

TEST(ExtractCodeBlockTest, Examples) {
  EXPECT_EQ(extract_code_block("Here:\n```sql\nSELECT 1\n```\nDone", "sql"), "SELECT 1");
  EXPECT_EQ(extract_code_block("```sqlite\nSELECT 2\n```", "sql"), "SELECT 2");
  EXPECT_EQ(extract_code_block("```\nSELECT 3\n```", "sql"), "SELECT 3");
  EXPECT_EQ(extract_code_block("```python\nx = 1\n```\n```sql\nSELECT 4\n```", "sql"), "SELECT 4");
  EXPECT_EQ(extract_code_block("SELECT 5 FROM t", "sql"), "SELECT 5 FROM t");
  EXPECT_EQ(extract_code_block("with a as (select 1) select * from a", "sql"), "with a as (select 1) select * from a");
  EXPECT_EQ(extract_code_block("```SELECT 6```", "sql"), "SELECT 6");
  EXPECT_EQ(extract_code_block("```python\nres = df.count()\n```", "dsl"), "res = df.count()");
  EXPECT_EQ(extract_code_block("res = df.limit(1)", "dsl"), "res = df.limit(1)");
  EXPECT_EQ(extract_code_block("{\"region\": [\"US\"]}", "json"), "{\"region\": [\"US\"]}");
  EXPECT_THROW(extract_code_block("I cannot write SQL for that.", "sql"), ExtractionError);
  EXPECT_THROW(extract_code_block("", "sql"), ExtractionError);
  try {
    extract_code_block("no code", "dsl");
  } catch (const ExtractionError& e) {
    EXPECT_EQ(e.clean_text(), "no code");
  }
}

TEST(ExtractCodeBlockProperty, ResultNeverContainsFence) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> parts = {"```", "```sql\n", "\n", "SELECT 1", " text ", "```python\n", "res = df"};
  std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 1), len(0, 8);
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    for (auto n = len(rng); n > 0; --n) s += parts[pick(rng)];
    for (const char* tag : {"sql", "dsl", "json"}) {
      try {
        const auto code = extract_code_block(s, tag);
        ASSERT_EQ(code.find("```"), std::string::npos) << s;
        ASSERT_FALSE(code.empty());
      } catch (const ExtractionError&) {
      }
    }
  }
}

TEST(ChatRequestTest, Validation) {
  ChatRequest r;
  EXPECT_THROW(r.validate(), ValidationError);
  r = user_request("hi");
  EXPECT_NO_THROW(r.validate());
  r.temperature = -1;
  EXPECT_THROW(r.validate(), ValidationError);
  r = user_request("hi");
  r.max_tokens = 0;
  EXPECT_THROW(r.validate(), ValidationError);
  ChatRequest a;
  a.messages = {{ChatMessage::Role::Assistant, "x"}};
  EXPECT_THROW(a.validate(), ValidationError);
  const auto wire = user_request("hi").to_wire();
  EXPECT_EQ(wire["messages"].size(), 2u);
  EXPECT_EQ(wire["messages"][1]["role"], "user");
  EXPECT_FALSE(wire.contains("purpose"));
}

TEST(MockBackendTest, SequenceConsumesInOrder) {
  auto s = MockScript::from_json({{"mode", "sequence"},
                                  {"entries", json::array({{{"response", "one"}}, {{"response", "two"}}})}});
  MockChatBackend m(s);
  EXPECT_EQ(m.send(user_request("a")), "one");
  EXPECT_EQ(m.send(user_request("b")), "two");
  EXPECT_EQ(m.consumed(), 2u);
  EXPECT_EQ(kind_of([&] { m.send(user_request("c")); }), GatewayError::Kind::Scripting);
}

TEST(MockBackendTest, LongestSubstringWins) {
  MockChatBackend m(MockScript::from_json(json::array({{{"match", "cows"}, {"response", "short"}},
                                                       {{"match", "parity 3 cows"}, {"response", "long"}}})));
  EXPECT_EQ(m.send(user_request("Question: how many parity 3 cows")), "long");
  EXPECT_EQ(m.send(user_request("Question: all cows")), "short");
}

TEST(MockBackendTest, PurposeRestrictsEntries) {
  MockChatBackend m(MockScript::from_json(json::array(
      {{{"match", "cows"}, {"purpose", "supervisor"}, {"response", "sql_subagent"}},
       {{"match", "cows"}, {"purpose", "generate_sql"}, {"response", "SELECT COUNT(*) FROM milk_data_table"}}})));
  EXPECT_EQ(m.send(user_request("cows", "supervisor")), "sql_subagent");
  EXPECT_EQ(m.send(user_request("cows", "generate_sql")), "SELECT COUNT(*) FROM milk_data_table");
  EXPECT_EQ(kind_of([&] { m.send(user_request("cows", "phrase_result")); }), GatewayError::Kind::Scripting);
}

TEST(MockBackendTest, AmbiguousAndUnmatchedAreErrors) {
  MockChatBackend m(MockScript::from_json(
      json::array({{{"match", "herd"}, {"response", "x"}}, {{"match", "herd"}, {"response", "y"}}})));
  try {
    m.send(user_request("my herd"));
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_NE(std::string(e.what()).find("ambiguous"), std::string::npos);
  }
  try {
    m.send(user_request("nothing here"));
    FAIL();
  } catch (const GatewayError& e) {
    EXPECT_NE(std::string(e.what()).find("no mock entry matches"), std::string::npos);
  }
}

TEST(MockBackendTest, FaultsRaiseTypedErrors) {
  MockChatBackend m(MockScript::from_json(json::array({{{"match", "slow"}, {"response", ""}, {"fault", "timeout"}},
                                                       {{"match", "down"}, {"response", ""}, {"fault", "transport"}}})));
  EXPECT_EQ(kind_of([&] { m.send(user_request("slow")); }), GatewayError::Kind::Timeout);
  EXPECT_EQ(kind_of([&] { m.send(user_request("down")); }), GatewayError::Kind::Transport);
  EXPECT_THROW(MockScript::from_json(json::array({{{"match", "x"}, {"response", ""}, {"fault", "boom"}}})),
               ConfigError);
  EXPECT_THROW(MockScript::from_json({{"mode", "random"}, {"entries", json::array()}}), ConfigError);
  EXPECT_THROW(MockScript::load("/nonexistent/mock.json"), ConfigError);
}

TEST(ModelGatewayTest, StripsReasoningAndCounts) {
  MockChatBackend* raw = nullptr;
  auto backend = std::make_shared<MockChatBackend>(
      MockScript::from_json(json::array({{{"match", "q"}, {"response", "<think>hmm</think> text_subagent"}}})));
  raw = backend.get();
  ModelGateway g(backend);
  const auto r = g.complete(user_request("q"));
  EXPECT_EQ(r.raw_text, "<think>hmm</think> text_subagent");
  EXPECT_EQ(r.clean_text, "text_subagent");
  EXPECT_GE(r.latency, 0.0);
  EXPECT_EQ(g.calls(), 1u);
  EXPECT_EQ(raw->consumed(), 1u);
  EXPECT_EQ(g.describe(), "mock");
  EXPECT_THROW(ModelGateway(nullptr), ConfigError);
}

namespace {

// Records the order in which calls reach the backend and how many overlap.
class ProbeBackend final : public ChatBackend {
 public:
  std::string send(const ChatRequest& req) override {
    const int now = ++in_flight_;
    int prev = max_in_flight_.load();
    while (now > prev && !max_in_flight_.compare_exchange_weak(prev, now)) {
    }
    {
      std::lock_guard lk(mu_);
      order_.push_back(req.last_user()->content);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --in_flight_;
    return "ok";
  }
  std::string describe() const override { return "probe"; }

  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
  std::mutex mu_;
  std::vector<std::string> order_;
};

}  // namespace

TEST(ModelGatewayTest, PoolBoundsConcurrency) {
  auto probe = std::make_shared<ProbeBackend>();
  ModelGateway g(probe, {{}, 2});
  std::vector<std::thread> ts;
  for (int i = 0; i < 8; ++i) ts.emplace_back([&, i] { g.complete(user_request("c" + std::to_string(i))); });
  for (auto& t : ts) t.join();
  EXPECT_LE(probe->max_in_flight_.load(), 2);
  EXPECT_EQ(g.calls(), 8u);
}

TEST(ModelGatewayTest, SerialPoolKeepsArrivalOrder) {
  auto probe = std::make_shared<ProbeBackend>();
  ModelGateway g(probe);
  // staggered starts fix the arrival order
  std::vector<std::thread> ts;
  for (int i = 0; i < 5; ++i) {
    ts.emplace_back([&, i] { g.complete(user_request("c" + std::to_string(i))); });
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  for (auto& t : ts) t.join();
  EXPECT_EQ(probe->max_in_flight_.load(), 1);
  EXPECT_EQ(probe->order_, (std::vector<std::string>{"c0", "c1", "c2", "c3", "c4"}));
}

namespace {

struct FakeServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  FakeServer() { port = server.bind_to_any_port("127.0.0.1"); }
  void start() {
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
  HttpEndpoint endpoint(double timeout = 5.0) const {
    HttpEndpoint e;
    e.base_url = "http://127.0.0.1:" + std::to_string(port);
    e.timeout_s = timeout;
    return e;
  }
};

}  // namespace

TEST(HttpBackendTest, ChatCompletionsRoundTrip) {
  FakeServer fake;
  json seen;
  fake.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = json::parse(req.body);
    res.set_content(json{{"choices", {{{"message", {{"role", "assistant"}, {"content", "<think>x</think>sql_subagent"}}}}}}}
                        .dump(),
                    "application/json");
  });
  fake.start();
  auto backend = std::make_shared<HttpChatBackend>(fake.endpoint());
  ModelGateway g(backend);
  const auto r = g.complete(user_request("Question: how many cows"));
  EXPECT_EQ(r.clean_text, "sql_subagent");
  EXPECT_EQ(seen["model"], "m");
  EXPECT_EQ(seen["temperature"], 0.0);
  EXPECT_EQ(seen["messages"][1]["content"], "Question: how many cows");
}

TEST(HttpBackendTest, ErrorKinds) {
  FakeServer fake;
  fake.server.Post("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
    if (req.body.find("fail500") != std::string::npos) {
      res.status = 500;
    } else if (req.body.find("slow") != std::string::npos) {
      std::this_thread::sleep_for(std::chrono::milliseconds(1500));
      res.set_content("{}", "application/json");
    } else {
      res.set_content("{\"unexpected\": true}", "application/json");
    }
  });
  fake.start();
  HttpChatBackend fast(fake.endpoint(5.0));
  EXPECT_EQ(kind_of([&] { fast.send(user_request("fail500")); }), GatewayError::Kind::Protocol);
  EXPECT_EQ(kind_of([&] { fast.send(user_request("bad body")); }), GatewayError::Kind::Protocol);
  HttpChatBackend impatient(fake.endpoint(0.3));
  EXPECT_EQ(kind_of([&] { impatient.send(user_request("slow")); }), GatewayError::Kind::Timeout);
}

TEST(HttpBackendTest, UnreachableIsTransport) {
  // nothing listens on port 1
  HttpEndpoint e;
  e.base_url = "http://127.0.0.1:1";
  e.timeout_s = 2;
  HttpChatBackend b(e);
  EXPECT_EQ(kind_of([&] { b.send(user_request("x")); }), GatewayError::Kind::Transport);
}
