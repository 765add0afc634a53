// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <thread>

#include "dairy/dsl.hpp"
#include "dairy/engine.hpp"
#include "dairy/eval.hpp"
#include "dairy/fixtures.hpp"
#include "dairy/lactation.hpp"
#include "dairy/service.hpp"
#include "support/chat_fuzz.hpp"
#include "support/dsl_oracle.hpp"
#include "support/helpers.hpp"
#include "support/milkbot_oracle.hpp"
#include "support/retrieval_oracle.hpp"
#include "support/sql_corpus.hpp"

using namespace dairy;

namespace {

constexpr double kReplayBudgetSeconds = 30.0;
constexpr double kLinearityTol = 1e-12;
constexpr double kOracleTol = 1e-9;
constexpr std::size_t kDslPrograms = 1000;
constexpr std::size_t kDslFuzzInputs = 10000;
constexpr std::size_t kChatFuzzPayloads = 1000;
constexpr std::size_t kExemplarCitations = 5;
constexpr std::size_t kEventTypes = 14;

const std::string kGuardTemplate =
    "Not sure what your intention is. Could you clarify if you are looking for general dairy knowledge and practices, "
    "details from your own farm's records, or predictions about herd performance or industry trends? Please also note "
    "that this chatbot is not designed to provide unethical or harmful responses.";

struct Outcome {
  enum class Status { Pass, Fail, Skip } status = Status::Pass;
  std::string detail;
};

Outcome pass(std::string d = "") { return {Outcome::Status::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Status::Fail, std::move(d)}; }
Outcome skip(std::string d) { return {Outcome::Status::Skip, std::move(d)}; }

class Gate {
 public:
  void check(const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = o.status == Outcome::Status::Pass ? "PASS" : o.status == Outcome::Status::Fail ? "FAIL" : "SKIP";
    std::cout << tag << "  " << name << "  (" << text_fixed(secs) << " s)";
    if (!o.detail.empty()) std::cout << "  " << o.detail;
    std::cout << std::endl;
    failures_ += o.status == Outcome::Status::Fail;
  }
  int failures() const { return failures_; }

 private:
  static std::string text_fixed(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
  }
  int failures_ = 0;
};

std::vector<std::string> span_names(const ConversationTurn& t) {
  std::vector<std::string> out;
  for (const auto& s : t.spans) out.push_back(s.name);
  return out;
}

bool has_span(const ConversationTurn& t, const std::string& name) {
  for (const auto& s : t.spans) {
    if (s.name == name) return true;
  }
  return false;
}

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

// Passes every call through except call number `fail_at`, which times out.
class TimeoutOnCall final : public ChatBackend {
 public:
  TimeoutOnCall(std::shared_ptr<ChatBackend> inner, std::size_t fail_at) : inner_(std::move(inner)), fail_at_(fail_at) {}
  std::string send(const ChatRequest& req) override {
    if (++calls_ == fail_at_) throw GatewayError(GatewayError::Kind::Timeout, "injected timeout on " + req.purpose);
    return inner_->send(req);
  }
  std::string describe() const override { return "timeout-on-call-" + std::to_string(fail_at_); }
  std::size_t calls() const { return calls_; }

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::size_t fail_at_;
  std::size_t calls_ = 0;
};

Outcome replay() {
  support::TempDir tmp;
  const auto items = eval::load_items(support::data_path("eval/phase2.json"));
  if (items.size() != 30) return fail("fixture has " + std::to_string(items.size()) + " items");
  const auto t0 = std::chrono::steady_clock::now();
  Engine engine(support::fixture_config(tmp.path()), support::benchmark_mock());
  const auto report = eval::run_phase(engine, items, 2, "mock");
  const auto table = eval::render_report(report, eval::Format::TableText);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::size_t routed = 0, errors = 0;
  for (const auto& it : report.items) {
    routed += it.route_correct;
    errors += it.error.has_value();
  }
  if (routed != 30) return fail("routing " + std::to_string(routed) + "/30");
  if (errors != 0) return fail(std::to_string(errors) + " items ended in an error");
  if (report.overall_correct() != 30) return fail("correct " + std::to_string(report.overall_correct()) + "/30");
  const std::string correctness_head =
      "| Model | Literature Retrieval | Web Search | SQL Database | NoSQL Database | Model Interaction | Inappropriate "
      "Query | Overall |";
  const std::string time_head =
      "| Model | Literature Retrieval | Web Search | SQL Database | NoSQL Database | Model Interaction | Inappropriate "
      "Query |\n";
  if (table.find(correctness_head) == std::string::npos) return fail("correctness table header missing");
  if (table.find("| mock | 5/5 | 5/5 | 5/5 | 5/5 | 5/5 | 5/5 | 30/30 |") == std::string::npos) {
    return fail("correctness row missing");
  }
  const auto time_at = table.find("Execution time (seconds per task category)\n" + time_head);
  if (time_at == std::string::npos) return fail("seconds table missing");
  if (wall >= kReplayBudgetSeconds) return fail("wall clock " + std::to_string(wall) + " s");
  return pass("routing 30/30, correct 30/30, wall " + std::to_string(wall) + " s");
}

Outcome exemplars() {
  support::TempDir tmp;
  Engine engine(support::fixture_config(tmp.path()), support::benchmark_mock());
  const auto ex = json::parse(support::read_file(support::data_path("eval/exemplars.json")));
  std::map<std::string, TurnResult> turns;
  for (const auto& e : ex) {
    turns.emplace(e.at("id").get<std::string>(),
                  engine.handle_turn(UserQuery::make(e.at("question").get<std::string>(), "exemplars")));
  }
  std::vector<std::string> problems;
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };
  for (const auto& id : {"literature", "web", "sql", "nosql", "model", "guard"}) {
    if (!turns.count(id)) return fail(std::string("exemplar missing: ") + id);
    const auto& a = *turns.at(id).turn.answer;
    need(!a.error, std::string(id) + " has an error");
  }

  const auto& lit = *turns.at("literature").turn.answer;
  need(turns.at("literature").turn.route == RouteLabel::Text, "literature not routed to TEXT");
  need(lit.citations.size() == kExemplarCitations, "literature has " + std::to_string(lit.citations.size()) + " citations");

  const auto& web_turn = turns.at("web").turn;
  const auto& web = *web_turn.answer;
  need(has_span(web_turn, "web_search") && has_span(web_turn, "generate_web_answer"), "web answer did not fall back");
  bool url_citation = false;
  for (const auto& c : web.citations) url_citation = url_citation || c.doi_or_url.rfind("https://", 0) == 0;
  need(url_citation, "web answer has no URL citation");
  need(web.body.find("Brooke L. Rollins") != std::string::npos, "web answer lacks Brooke L. Rollins");

  const auto& sql = *turns.at("sql").turn.answer;
  need(sql.body.find("Showing the first 20 of 49 total records.") != std::string::npos, "sql truncation line missing");
  if (!sql.attachments.empty()) {
    const auto t = sql.attachments[0].payload.get<ResultTable>();
    need(t.rows.size() == 20 && t.total_row_count == 49, "sql table is not 20 of 49");
  } else {
    problems.push_back("sql has no table");
  }

  const auto& nosql = *turns.at("nosql").turn.answer;
  if (!nosql.attachments.empty()) {
    const auto t = nosql.attachments[0].payload.get<ResultTable>();
    std::set<std::string> got;
    for (const auto& r : t.rows) got.insert(cell_to_string(r.at(0)));
    const std::set<std::string> want(fixtures::event_types().begin(), fixtures::event_types().end());
    need(t.total_row_count == kEventTypes && got == want && want.size() == kEventTypes,
         "nosql returned " + std::to_string(t.total_row_count) + " event types");
  } else {
    problems.push_back("nosql has no table");
  }

  const auto& model = *turns.at("model").turn.answer;
  need(model.body.find("Milk yield plot generated") != std::string::npos, "model body lacks plot line");
  std::size_t svgs = 0;
  for (const auto& a : model.attachments) {
    if (a.kind != Attachment::Kind::Svg) continue;
    ++svgs;
    need(count_of(a.payload.get<std::string>(), "<polyline") == 2, "plot does not have two series");
  }
  need(svgs == 1, "model has " + std::to_string(svgs) + " plots");

  const auto& guard_turn = turns.at("guard").turn;
  need(guard_turn.route == RouteLabel::Clarify, "guard not routed to CLARIFY");
  need(guard_turn.answer->body == kGuardTemplate, "guard body differs from the template");
  need(span_names(guard_turn) == std::vector<std::string>{"supervisor", "customer service"}, "guard trace shape");

  if (!problems.empty()) {
    std::string d;
    for (const auto& p : problems) d += (d.empty() ? "" : "; ") + p;
    return fail(d);
  }
  return pass("6/6 exemplars");
}

Outcome sql_safety() {
  std::size_t adversarial_accepted = 0, benign_accepted = 0;
  for (auto stmt : support::kAdversarialSql) {
    try {
      validate_sql(stmt);
      ++adversarial_accepted;
    } catch (const SqlValidationError&) {
    }
  }
  support::TempDir tmp;
  const auto cfg = support::fixture_config(tmp.path());
  ingest_csv(cfg.sql_csv, cfg.sql_store);
  {
    SqlStore store(cfg.sql_store);
    for (auto stmt : support::kBenignSql) {
      try {
        store.execute(validate_sql(stmt), cfg.row_display_cap);
        ++benign_accepted;
      } catch (const Error&) {
      }
    }
  }
  const auto before = file_checksum(cfg.sql_store);
  {
    Engine engine(cfg, support::benchmark_mock());
    eval::run_phase(engine, eval::load_items(support::data_path("eval/phase2.json")), 2, "mock");
  }
  const auto after = file_checksum(cfg.sql_store);
  const std::string d = "adversarial " + std::to_string(adversarial_accepted) + "/" +
                        std::to_string(support::kAdversarialSql.size()) + " accepted, benign " +
                        std::to_string(benign_accepted) + "/" + std::to_string(support::kBenignSql.size()) +
                        ", checksum " + before + (before == after ? " unchanged" : " -> " + after);
  if (support::kAdversarialSql.size() != 50 || support::kBenignSql.size() != 20) return fail("corpus size: " + d);
  if (adversarial_accepted != 0 || benign_accepted != 20 || before != after) return fail(d);
  return pass(d);
}

Outcome dsl_oracle() {
  namespace oracle = support::dsl_oracle;
  oracle::Generator gen(2024);
  for (std::size_t i = 0; i < kDslPrograms; ++i) {
    const auto df = gen.table();
    const auto p = gen.program(df);
    if (df.rows.size() > 100) return fail("generator produced a table over 100 rows");
    const auto cmp = oracle::compare(dsl::parse(dsl::to_source(p)), df);
    if (!cmp.equal) return fail("program " + std::to_string(i) + ": " + cmp.detail + " | " + dsl::to_source(p));
  }

  oracle::Generator fuzz_gen(99);
  std::mt19937_64 rng(4242);
  const std::string alphabet = "df.=()\"',&<>!01259-aelstcoungrbyvmdix _\n\t\\";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::size_t rejected = 0;
  for (std::size_t i = 0; i < kDslFuzzInputs; ++i) {
    std::string src;
    if (i % 3 == 0) {
      for (int n = fuzz_gen.pick(0, 60); n > 0; --n) src += alphabet[pick(rng)];
    } else {
      src = dsl::to_source(fuzz_gen.program(fuzz_gen.table()));
      for (int m = fuzz_gen.pick(1, 4); m > 0 && !src.empty(); --m) {
        const auto at = static_cast<std::size_t>(fuzz_gen.pick(0, static_cast<int>(src.size()) - 1));
        switch (fuzz_gen.pick(0, 2)) {
          case 0: src.erase(at, 1); break;
          case 1: src.insert(at, 1, alphabet[pick(rng)]); break;
          default: src[at] = alphabet[pick(rng)]; break;
        }
      }
    }
    try {
      dsl::parse(src);
    } catch (const dsl::SyntaxError& e) {
      ++rejected;
      if (e.position() > src.size()) return fail("error position past end of input: " + src);
    } catch (const std::exception& e) {
      return fail(std::string("non-positioned error ") + e.what() + " on: " + src);
    }
  }
  return pass(std::to_string(kDslPrograms) + " programs equal, " + std::to_string(kDslFuzzInputs) + " fuzz inputs (" +
              std::to_string(rejected) + " rejected with positions)");
}

LactationParams random_params(std::mt19937_64& rng) {
  LactationParams p;
  p.a = std::uniform_real_distribution<double>(10, 80)(rng);
  p.b = std::uniform_real_distribution<double>(5, 60)(rng);
  p.c = std::uniform_real_distribution<double>(-30, 30)(rng);
  p.d = std::uniform_real_distribution<double>(1e-4, 1e-2)(rng);
  p.label = "random";
  return p;
}

Outcome milkbot() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> lambda(0.1, 10);
  double worst_linear = 0;
  for (int i = 0; i < 100; ++i) {
    const auto p = random_params(rng);
    auto q = p;
    const double l = lambda(rng);
    q.a = l * p.a;
    for (int t = 1; t <= 305; ++t) worst_linear = std::max(worst_linear, std::fabs(predict_yield(q, t) - l * predict_yield(p, t)));
  }
  if (worst_linear > kLinearityTol) return fail("scale linearity error " + std::to_string(worst_linear));

  std::mt19937_64 drng(3);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_params(drng);
    const double t0 = std::max(0.0, std::ceil(peak_dim(p)));
    double prev = predict_yield(p, t0);
    for (double t = t0 + 1; t <= t0 + 600; t += 1) {
      const double y = predict_yield(p, t);
      if (!(y < prev)) return fail("no decay at t=" + std::to_string(t));
      prev = y;
    }
  }

  const auto table = ParameterTable::load(support::data_path("milkbot_params.json"));
  for (const char* region : {"US", "EU"}) {
    for (std::int64_t parity = 1; parity <= 3; ++parity) {
      for (std::int64_t t = 1; t <= 305; ++t) {
        const auto x = ParamExtraction::from_json({{"region", {region}}, {"parity", {parity}}, {"dim_range", {t, t}}});
        if (expected_production(x, table)[0] != predict_yield(table.at(region, parity), static_cast<double>(t))) {
          return fail(std::string("single-day identity broken for ") + region + " parity " + std::to_string(parity) +
                      " DIM " + std::to_string(t));
        }
      }
    }
  }

  std::mt19937_64 orng(1);
  std::uniform_real_distribution<double> t_dist(0, 400);
  double worst_oracle = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_params(orng);
    const double t = t_dist(orng);
    worst_oracle = std::max(worst_oracle, std::fabs(predict_yield(p, t) - support::milkbot_reference(p.a, p.b, p.c, p.d, t)));
  }
  if (worst_oracle > kOracleTol) return fail("oracle error " + std::to_string(worst_oracle));
  std::ostringstream d;
  d << "linearity max " << worst_linear << ", oracle max " << worst_oracle;
  return pass(d.str());
}

Outcome retrieval() {
  namespace oracle = support::retrieval_oracle;
  const auto docs = fixtures::generate_corpus({77, 200});
  if (docs.size() != 200) return fail("corpus has " + std::to_string(docs.size()) + " docs");
  auto emb = std::make_shared<HashingEmbedder>();
  LiteratureIndex idx(emb);
  idx.ingest_lines(oracle::jsonl(docs));
  for (const auto& q : oracle::random_queries(docs, 100, 123)) {
    const auto want = oracle::brute_force_ranking(docs, *emb, q);
    for (std::size_t k : {std::size_t{1}, std::size_t{5}, std::size_t{200}}) {
      if (auto why = oracle::ranking_mismatch(idx.retrieve_topk(q, k), want)) return fail("'" + q + "': " + *why);
    }
  }
  LiteratureIndex fixture(std::make_shared<HashingEmbedder>());
  fixture.ingest(support::data_path("fixtures/abstracts.jsonl"));
  if (fixture.size() != 50) return fail("fixture corpus has " + std::to_string(fixture.size()) + " docs");
  std::size_t self = 0;
  for (const auto& d : fixture.docs()) self += fixture.retrieve_topk(embedding_text(d), 1).at(0).doc_id == d.doc_id;
  if (self != 50) return fail("self-retrieval " + std::to_string(self) + "/50");
  return pass("100 queries x k in {1,5,200} match argsort, self top-1 50/50");
}

Outcome robustness() {
  support::TempDir tmp;
  {
    Engine engine(support::fixture_config(tmp.path()), support::benchmark_mock());
    Service service(engine);
    const int port = service.bind("127.0.0.1", 0);
    std::thread t([&] { service.run(); });
    service.wait_until_ready();
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(std::chrono::seconds(10));
    std::size_t bad = 0;
    std::string first_bad;
    for (const auto& body : support::chat_fuzz_payloads(kChatFuzzPayloads, 777)) {
      auto res = c.Post("/chat", body, "application/json");
      const bool ok = res && ((res->status >= 200 && res->status < 300) || (res->status >= 400 && res->status < 500));
      if (!ok) {
        ++bad;
        if (first_bad.empty()) first_bad = res ? std::to_string(res->status) : httplib::to_string(res.error());
      }
    }
    service.stop();
    t.join();
    if (bad) return fail(std::to_string(bad) + " fuzz payloads got neither 2xx nor 4xx (first: " + first_bad + ")");
  }

  // a timeout on each successive gateway call of every benchmark question
  const auto items = eval::load_items(support::data_path("eval/phase2.json"));
  std::size_t injected = 0, error_answers = 0;
  for (const auto& item : items) {
    for (std::size_t n = 1;; ++n) {
      auto backend = std::make_shared<TimeoutOnCall>(support::benchmark_mock(), n);
      Engine engine(support::fixture_config(tmp.path()), backend);
      const auto r = engine.handle_turn(UserQuery::make(item.question, "faults"));
      if (backend->calls() < n) break;
      ++injected;
      const auto& a = *r.turn.answer;
      bool failed_span = false;
      for (const auto& s : r.turn.spans) failed_span = failed_span || s.failed;
      if (!failed_span) return fail(item.item_id + " call " + std::to_string(n) + ": no span recorded the timeout");
      if (a.error) {
        ++error_answers;
        if (a.error->stage.empty() || !has_span(r.turn, a.error->stage)) {
          return fail(item.item_id + " call " + std::to_string(n) + ": stage '" + a.error->stage + "' is not a span");
        }
      }
    }
  }
  if (error_answers == 0) return fail("no injected timeout produced an error answer");
  return pass(std::to_string(kChatFuzzPayloads) + " payloads 2xx/4xx; " + std::to_string(injected) +
              " injected timeouts, " + std::to_string(error_answers) + " error answers with named stages");
}

Outcome live_smoke() {
  const char* endpoint = std::getenv("DAIRY_LIVE_ENDPOINT");
  if (!endpoint || !*endpoint) return skip("set DAIRY_LIVE_ENDPOINT to a chat-completion server to run");
  support::TempDir tmp;
  auto cfg = support::fixture_config(tmp.path());
  cfg.model_endpoint = endpoint;
  if (const char* m = std::getenv("DAIRY_LIVE_MODEL"); m && *m) cfg.model_name = m;
  cfg.default_model.clear();
  Engine engine(cfg, make_backend(cfg));
  const auto report = eval::run_phase(engine, eval::load_items(support::data_path("eval/phase1.json")), 1, cfg.model_name);
  const auto text = eval::render_report(report, eval::Format::TableText);
  std::cout << text;
  if (report.items.size() != 5 || text.find("Gate: ") == std::string::npos) return fail("no gate report");
  std::size_t gate = 0;
  for (const auto& it : report.items) gate += it.gate_pass();
  return pass("gate " + std::to_string(gate) + "/5 (informational)");
}

}  // namespace

int main() {
  Gate gate;
  gate.check("end-to-end scripted replay", replay);
  gate.check("exemplar suite", exemplars);
  gate.check("SQL safety", sql_safety);
  gate.check("DSL oracle equivalence", dsl_oracle);
  gate.check("MilkBot numerics", milkbot);
  gate.check("retrieval oracle", retrieval);
  gate.check("robustness", robustness);
  gate.check("live smoke (manual/optional)", live_smoke);
  std::cout << (gate.failures() ? "FAILED: " + std::to_string(gate.failures()) + " criterion(s)" : std::string("ALL PASS"))
            << std::endl;
  return gate.failures() ? 1 : 0;
}
