#include "dairy/eval.hpp"

#include <chrono>
#include <fstream>
#include <regex>
#include <sstream>

#include "dairy/csv.hpp"
#include "dairy/text.hpp"

namespace dairy::eval {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Literature: return "literature";
    case Category::Web: return "web";
    case Category::Sql: return "sql";
    case Category::NoSql: return "nosql";
    case Category::Model: return "model";
    case Category::Guard: return "guard";
  }
  return "guard";
}

std::string_view column_title(Category c) {
  switch (c) {
    case Category::Literature: return "Literature Retrieval";
    case Category::Web: return "Web Search";
    case Category::Sql: return "SQL Database";
    case Category::NoSql: return "NoSQL Database";
    case Category::Model: return "Model Interaction";
    case Category::Guard: return "Inappropriate Query";
  }
  return "";
}

Category parse_category(std::string_view s) {
  const auto l = text::to_lower(text::trim(s));
  for (auto c : kCategories) {
    if (l == to_string(c)) return c;
  }
  throw ValidationError("unknown category " + std::string(s));
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NeedsManual: return "needs_manual";
  }
  return "fail";
}

Verdict parse_verdict(std::string_view s) {
  if (s == "pass") return Verdict::Pass;
  if (s == "fail") return Verdict::Fail;
  if (s == "needs_manual") return Verdict::NeedsManual;
  throw ValidationError("unknown verdict " + std::string(s));
}

// ---- checkers ----

Verdict Checker::check(const AgentAnswer& answer) const {
  std::string full = answer.body;
  for (const auto& c : answer.citations) full += "\n" + c.render();
  switch (kind) {
    case Kind::ContainsAny:
      for (const auto& k : keywords) {
        if (text::contains_icase(full, k)) return Verdict::Pass;
      }
      return Verdict::Fail;
    case Kind::NumericEquals:
      for (double v : text::numbers_in(answer.body)) {
        if (std::fabs(v - value) <= tolerance) return Verdict::Pass;
      }
      return Verdict::Fail;
    case Kind::Regex:
      try {
        return std::regex_search(full, std::regex(pattern)) ? Verdict::Pass : Verdict::Fail;
      } catch (const std::regex_error&) {
        return Verdict::Fail;
      }
    case Kind::Exact: return answer.body == text ? Verdict::Pass : Verdict::Fail;
    case Kind::Manual: return Verdict::NeedsManual;
  }
  return Verdict::Fail;
}

Checker Checker::from_json(const json& j) {
  Checker c;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "contains_any") {
    c.kind = Kind::ContainsAny;
    c.keywords = j.at("keywords").get<std::vector<std::string>>();
    if (c.keywords.empty()) throw ValidationError("contains_any needs at least one keyword");
  } else if (kind == "numeric_equals") {
    c.kind = Kind::NumericEquals;
    c.value = j.at("value").get<double>();
    c.tolerance = j.value("tolerance", 1e-6);
    if (!(c.tolerance >= 0)) throw ValidationError("tolerance must not be negative");
  } else if (kind == "regex") {
    c.kind = Kind::Regex;
    c.pattern = j.at("pattern").get<std::string>();
    try {
      std::regex probe(c.pattern);
    } catch (const std::regex_error& e) {
      throw ValidationError("invalid checker regex " + c.pattern);
    }
  } else if (kind == "exact") {
    c.kind = Kind::Exact;
    c.text = j.at("text").get<std::string>();
  } else if (kind == "manual") {
    c.kind = Kind::Manual;
  } else {
    throw ValidationError("unknown checker kind " + kind);
  }
  return c;
}

json Checker::to_json() const {
  switch (kind) {
    case Kind::ContainsAny: return {{"kind", "contains_any"}, {"keywords", keywords}};
    case Kind::NumericEquals: return {{"kind", "numeric_equals"}, {"value", value}, {"tolerance", tolerance}};
    case Kind::Regex: return {{"kind", "regex"}, {"pattern", pattern}};
    case Kind::Exact: return {{"kind", "exact"}, {"text", text}};
    case Kind::Manual: return {{"kind", "manual"}};
  }
  return {{"kind", "manual"}};
}

// ---- items ----

EvalItem EvalItem::from_json(const json& j) {
  EvalItem it;
  try {
    it.item_id = j.at("item_id").get<std::string>();
    it.category = parse_category(j.at("category").get<std::string>());
    it.question = j.at("question").get<std::string>();
    it.phase = j.at("phase").get<int>();
    const auto r = parse_route(j.at("expected_route").get<std::string>());
    if (!r || *r == RouteLabel::Unknown) throw ValidationError("bad expected_route");
    it.expected_route = *r;
    it.expected_tool_spans = j.value("expected_tool_spans", std::vector<std::string>{});
    it.checker = Checker::from_json(j.at("checker"));
  } catch (const json::exception& e) {
    throw ValidationError("eval item " + it.item_id + ": " + e.what());
  }
  if (it.phase != 1 && it.phase != 2) throw ValidationError("eval item " + it.item_id + ": phase must be 1 or 2");
  if (text::trim(it.question).empty()) throw ValidationError("eval item " + it.item_id + ": empty question");
  return it;
}

json EvalItem::to_json() const {
  return {{"item_id", item_id},
          {"category", std::string(to_string(category))},
          {"question", question},
          {"phase", phase},
          {"expected_route", std::string(dairy::to_string(expected_route))},
          {"expected_tool_spans", expected_tool_spans},
          {"checker", checker.to_json()}};
}

bool span_pattern_matches(std::string_view pattern, std::string_view name) {
  for (const auto& alt : text::split(pattern, '|')) {
    // glob with '*' only
    std::size_t p = 0, n = 0, star = std::string::npos, mark = 0;
    bool ok = true;
    while (n < name.size()) {
      if (p < alt.size() && alt[p] == '*') {
        star = p++;
        mark = n;
      } else if (p < alt.size() && alt[p] == name[n]) {
        ++p;
        ++n;
      } else if (star != std::string::npos) {
        p = star + 1;
        n = ++mark;
      } else {
        ok = false;
        break;
      }
    }
    while (ok && p < alt.size() && alt[p] == '*') ++p;
    if (ok && p == alt.size()) return true;
  }
  return false;
}

std::vector<EvalItem> load_items(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open eval fixture " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("eval fixture " + path.string() + " is not valid JSON");
  }
  const json& arr = j.is_object() ? j.at("items") : j;
  std::vector<EvalItem> items;
  for (const auto& x : arr) items.push_back(EvalItem::from_json(x));
  return items;
}

// ---- report ----

std::vector<CategoryScore> PhaseReport::categories() const {
  std::vector<CategoryScore> out;
  for (auto c : kCategories) {
    CategoryScore s{c};
    for (const auto& it : items) {
      if (it.category != c) continue;
      ++s.total;
      s.seconds += it.elapsed;
      const bool ok = phase == 1 ? it.gate_pass() : it.correct();
      if (ok) ++s.correct;
      if (it.verdict == Verdict::NeedsManual) ++s.pending;
    }
    out.push_back(s);
  }
  return out;
}

std::size_t PhaseReport::overall_correct() const {
  std::size_t n = 0;
  for (const auto& s : categories()) n += s.correct;
  return n;
}

json PhaseReport::to_json() const {
  json j;
  j["phase"] = phase;
  j["model"] = model;
  j["items"] = json::array();
  for (const auto& it : items) {
    j["items"].push_back({{"item_id", it.item_id},
                          {"category", std::string(to_string(it.category))},
                          {"question", it.question},
                          {"expected_route", std::string(dairy::to_string(it.expected_route))},
                          {"actual_route", std::string(dairy::to_string(it.actual_route))},
                          {"route_correct", it.route_correct},
                          {"tool_correct", it.tool_correct},
                          {"answer_verdict", std::string(to_string(it.verdict))},
                          {"elapsed", it.elapsed},
                          {"error", it.error ? json(*it.error) : json(nullptr)},
                          {"turn_id", it.turn_id}});
  }
  json cats = json::object();
  for (const auto& s : categories()) {
    cats[std::string(to_string(s.category))] = {
        {"correct", s.correct}, {"total", s.total}, {"pending", s.pending}, {"seconds", s.seconds}};
  }
  j["categories"] = cats;
  j["overall"] = {{"correct", overall_correct()}, {"total", overall_total()}};
  return j;
}

PhaseReport PhaseReport::from_json(const json& j) {
  PhaseReport r;
  r.phase = j.at("phase").get<int>();
  r.model = j.at("model").get<std::string>();
  for (const auto& x : j.at("items")) {
    ItemOutcome o;
    o.item_id = x.at("item_id").get<std::string>();
    o.category = parse_category(x.at("category").get<std::string>());
    o.question = x.at("question").get<std::string>();
    o.expected_route = parse_route(x.at("expected_route").get<std::string>()).value_or(RouteLabel::Unknown);
    o.actual_route = parse_route(x.at("actual_route").get<std::string>()).value_or(RouteLabel::Unknown);
    o.route_correct = x.at("route_correct").get<bool>();
    o.tool_correct = x.at("tool_correct").get<bool>();
    o.verdict = parse_verdict(x.at("answer_verdict").get<std::string>());
    o.elapsed = x.at("elapsed").get<double>();
    if (!x.at("error").is_null()) o.error = x.at("error").get<std::string>();
    o.turn_id = x.value("turn_id", std::string());
    r.items.push_back(std::move(o));
  }
  return r;
}

PhaseReport run_phase(Engine& engine, const std::vector<EvalItem>& items, int phase, const std::string& model) {
  PhaseReport report;
  report.phase = phase;
  report.model = model;
  std::size_t n = 0;
  const auto session = "eval-p" + std::to_string(phase) + "-" + model;
  for (const auto& item : items) {
    ItemOutcome o;
    o.item_id = item.item_id;
    o.category = item.category;
    o.question = item.question;
    o.expected_route = item.expected_route;
    ++n;
    try {
      const auto q = UserQuery::make(item.question, session);
      const auto r = phase == 1 ? engine.handle_turn(q, item.expected_route) : engine.handle_turn(q);
      o.turn_id = r.turn.turn_id;
      o.actual_route = r.turn.route;
      if (phase == 2) {
        // the route the supervisor actually chose, as recorded in the trace
        for (const auto& s : r.turn.spans) {
          if (s.name == "supervisor" && s.payload.contains("route") && s.payload["route"].is_string()) {
            o.actual_route = parse_route(s.payload["route"].get<std::string>()).value_or(RouteLabel::Unknown);
          }
        }
      }
      o.route_correct = o.actual_route == item.expected_route;
      o.tool_correct = true;
      for (const auto& pat : item.expected_tool_spans) {
        bool hit = false;
        for (const auto& s : r.turn.spans) hit = hit || span_pattern_matches(pat, s.name);
        o.tool_correct = o.tool_correct && hit;
      }
      o.elapsed = r.total_seconds;
      if (r.turn.answer && r.turn.answer->error) o.error = r.turn.answer->error->stage;
      o.verdict = o.error || !r.turn.answer ? Verdict::Fail : item.checker.check(*r.turn.answer);
    } catch (const Error& e) {
      o.error = e.stage();
      o.verdict = Verdict::Fail;
    }
    report.items.push_back(std::move(o));
  }
  return report;
}

Format parse_format(std::string_view s) {
  if (s == "table-text") return Format::TableText;
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  throw ValidationError("unknown report format " + std::string(s) + " (table-text, json, csv)");
}

namespace {

std::string row(const std::vector<std::string>& cells) {
  std::string s = "|";
  for (const auto& c : cells) s += " " + c + " |";
  return s + "\n";
}

std::string score(std::size_t k, std::size_t n) { return std::to_string(k) + "/" + std::to_string(n); }

std::string phase2_tables(const std::vector<PhaseReport>& reports) {
  std::string out;
  std::vector<std::string> head{"Model"};
  for (auto c : kCategories) head.emplace_back(column_title(c));
  auto correctness_head = head;
  correctness_head.emplace_back("Overall");
  out += "Correctness (questions answered correctly per task category)\n";
  out += row(correctness_head);
  std::size_t pending = 0;
  for (const auto& r : reports) {
    std::vector<std::string> cells{r.model};
    for (const auto& s : r.categories()) {
      cells.push_back(score(s.correct, s.total));
      pending += s.pending;
    }
    cells.push_back(score(r.overall_correct(), r.overall_total()));
    out += row(cells);
  }
  if (pending) out += std::to_string(pending) + " answer(s) await manual review and are not counted.\n";
  out += "\nExecution time (seconds per task category)\n";
  out += row(head);
  for (const auto& r : reports) {
    std::vector<std::string> cells{r.model};
    for (const auto& s : r.categories()) cells.push_back(text::fixed(s.seconds, 2));
    out += row(cells);
  }
  return out;
}

std::string item_table(const PhaseReport& r) {
  std::string out = "\nItems (" + r.model + ")\n";
  out += row({"Item", "Category", "Expected", "Routed", "Route", "Tools", "Answer", "Error", "Seconds"});
  for (const auto& it : r.items) {
    out += row({it.item_id, std::string(to_string(it.category)), std::string(dairy::to_string(it.expected_route)),
                std::string(dairy::to_string(it.actual_route)), it.route_correct ? "ok" : "wrong",
                it.tool_correct ? "ok" : "wrong", std::string(to_string(it.verdict)), it.error.value_or("-"),
                text::fixed(it.elapsed, 2)});
  }
  return out;
}

std::string phase1_table(const PhaseReport& r) {
  std::string out = "Screening gate (" + r.model + ")\n";
  out += row({"Item", "Category", "Route", "Gate", "Failed stage", "Seconds"});
  std::size_t pass = 0;
  for (const auto& it : r.items) {
    pass += it.gate_pass();
    out += row({it.item_id, std::string(to_string(it.category)), std::string(dairy::to_string(it.expected_route)),
                it.gate_pass() ? "PASS" : "FAIL", it.error.value_or("-"), text::fixed(it.elapsed, 2)});
  }
  out += "Gate: " + score(pass, r.items.size()) + " items executed without error\n";
  return out;
}

std::string csv_rows(const PhaseReport& r) {
  std::string out;
  for (const auto& it : r.items) {
    const std::vector<std::string> cells{r.model,
                                         std::to_string(r.phase),
                                         it.item_id,
                                         std::string(to_string(it.category)),
                                         it.question,
                                         std::string(dairy::to_string(it.expected_route)),
                                         std::string(dairy::to_string(it.actual_route)),
                                         it.route_correct ? "true" : "false",
                                         it.tool_correct ? "true" : "false",
                                         std::string(to_string(it.verdict)),
                                         text::fixed(it.elapsed, 6),
                                         it.error.value_or("")};
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv::escape(cells[i]);
    out += "\n";
  }
  return out;
}

}  // namespace

std::string render_reports(const std::vector<PhaseReport>& reports, Format format) {
  switch (format) {
    case Format::Json: {
      if (reports.size() == 1) return dump_json(reports[0].to_json(), 2) + "\n";
      json arr = json::array();
      for (const auto& r : reports) arr.push_back(r.to_json());
      return dump_json(arr, 2) + "\n";
    }
    case Format::Csv: {
      std::string out =
          "model,phase,item_id,category,question,expected_route,actual_route,route_correct,tool_correct,"
          "answer_verdict,elapsed_seconds,error_stage\n";
      for (const auto& r : reports) out += csv_rows(r);
      return out;
    }
    case Format::TableText: {
      std::string out;
      std::vector<PhaseReport> p2;
      for (const auto& r : reports) {
        if (r.phase == 1) {
          out += phase1_table(r) + "\n";
        } else {
          p2.push_back(r);
        }
      }
      if (!p2.empty()) {
        out += phase2_tables(p2);
        for (const auto& r : p2) out += item_table(r);
      }
      return out;
    }
  }
  return "";
}

std::string render_report(const PhaseReport& report, Format format) { return render_reports({report}, format); }

}  // namespace dairy::eval
