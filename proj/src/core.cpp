#include "dairy/core.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <numeric>
#include <set>
#include <sstream>

#include "dairy/text.hpp"

namespace dairy {

Timestamp utc_now() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::string format_timestamp(Timestamp t) {
  const auto ms = t.time_since_epoch().count();
  std::int64_t secs = ms / 1000;
  std::int64_t frac = ms % 1000;
  if (frac < 0) {
    frac += 1000;
    --secs;
  }
  std::time_t tt = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(frac));
  return buf;
}

Timestamp parse_timestamp(std::string_view s) {
  std::tm tm{};
  int ms = 0;
  const std::string str(s);
  if (std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                  &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &ms) != 7) {
    throw ValidationError("bad timestamp: " + str);
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  const std::time_t secs = timegm(&tm);
  return Timestamp(std::chrono::milliseconds(static_cast<std::int64_t>(secs) * 1000 + ms));
}

std::string_view to_string(RouteLabel label) {
  switch (label) {
    case RouteLabel::Text: return "TEXT";
    case RouteLabel::Sql: return "SQL";
    case RouteLabel::NoSql: return "NOSQL";
    case RouteLabel::Model: return "MODEL";
    case RouteLabel::Clarify: return "CLARIFY";
    case RouteLabel::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::optional<RouteLabel> parse_route(std::string_view name) {
  const std::string n = text::to_lower(text::trim(name));
  for (RouteLabel l : {RouteLabel::Text, RouteLabel::Sql, RouteLabel::NoSql, RouteLabel::Model,
                       RouteLabel::Clarify, RouteLabel::Unknown}) {
    if (n == text::to_lower(to_string(l)) || n == subagent_name(l)) return l;
  }
  return std::nullopt;
}

std::string_view subagent_name(RouteLabel label) {
  switch (label) {
    case RouteLabel::Text: return "text_subagent";
    case RouteLabel::Sql: return "sql_subagent";
    case RouteLabel::NoSql: return "nosql_subagent";
    case RouteLabel::Model: return "model_subagent";
    case RouteLabel::Clarify: return "clarify_subagent";
    case RouteLabel::Unknown: return "unknown";
  }
  return "unknown";
}

UserQuery UserQuery::make(std::string text, std::string session_id) {
  if (text::trim(text).empty()) throw ValidationError("question text is empty");
  if (session_id.empty()) throw ValidationError("session id is empty");
  return UserQuery{std::move(text), std::move(session_id), utc_now()};
}

bool operator==(const UserQuery& a, const UserQuery& b) {
  return a.text == b.text && a.session_id == b.session_id && a.received_at == b.received_at;
}

std::string Citation::render() const {
  if (text::starts_with_icase(doi_or_url, "http")) {
    return "\"" + title + "\" – " + doi_or_url;
  }
  std::string out = title;
  if (year) out += " (" + std::to_string(*year) + ")";
  return out + " – DOI: " + doi_or_url;
}

std::string cell_to_string(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const {
      if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) return text::fixed(v, 1);
      std::ostringstream os;
      os.precision(10);
      os << v;
      return os.str();
    }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(V{}, c);
}

json cell_to_json(const Cell& c) {
  struct V {
    json operator()(std::monostate) const { return nullptr; }
    json operator()(std::int64_t v) const { return v; }
    json operator()(double v) const { return v; }
    json operator()(const std::string& v) const { return v; }
  };
  return std::visit(V{}, c);
}

Cell cell_from_json(const json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return static_cast<std::int64_t>(j.get<bool>() ? 1 : 0);
  return j.dump();
}

std::string ResultTable::render_text() const {
  std::vector<std::size_t> widths(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) widths[c] = columns[c].size();
  std::vector<std::vector<std::string>> cells;
  for (const auto& row : rows) {
    auto& out = cells.emplace_back();
    for (std::size_t c = 0; c < row.size() && c < columns.size(); ++c) {
      out.push_back(cell_to_string(row[c]));
      widths[c] = std::max(widths[c], out.back().size());
    }
  }
  std::string rule = "+";
  for (auto w : widths) rule += std::string(w + 2, '-') + "+";
  auto line = [&](const std::vector<std::string>& vals) {
    std::string s = "|";
    for (std::size_t c = 0; c < widths.size(); ++c) {
      const std::string v = c < vals.size() ? vals[c] : "";
      s += " " + v + std::string(widths[c] - v.size(), ' ') + " |";
    }
    return s;
  };
  std::string out = rule + "\n" + line(columns) + "\n" + rule + "\n";
  for (const auto& r : cells) out += line(r) + "\n";
  out += rule + "\n";
  if (truncated) {
    out += "Showing the first " + std::to_string(rows.size()) + " of " + std::to_string(total_row_count) +
           " total records.\n";
  } else {
    out += std::to_string(total_row_count) + (total_row_count == 1 ? " record.\n" : " records.\n");
  }
  return out;
}

std::string_view to_string(Attachment::Kind k) {
  switch (k) {
    case Attachment::Kind::Table: return "table";
    case Attachment::Kind::Series: return "series";
    case Attachment::Kind::Svg: return "svg";
  }
  return "table";
}

// ---- trace ----

std::string Trace::begin(std::string name, std::optional<std::string> parent) {
  TraceSpan s;
  s.span_id = "s" + std::to_string(next_id_++);
  s.parent_id = std::move(parent);
  s.name = std::move(name);
  s.started_at = utc_now();
  s.ended_at = s.started_at;
  spans_.push_back(std::move(s));
  open_.push_back({spans_.back().span_id, std::chrono::steady_clock::now()});
  return spans_.back().span_id;
}

void Trace::end(const std::string& span_id) {
  for (auto it = open_.begin(); it != open_.end(); ++it) {
    if (it->id != span_id) continue;
    auto& s = span(span_id);
    s.duration = std::chrono::duration<double>(std::chrono::steady_clock::now() - it->started).count();
    // wall clock may step backwards; keep ended_at >= started_at
    s.ended_at = std::max(utc_now(), s.started_at);
    open_.erase(it);
    return;
  }
}

TraceSpan& Trace::span(const std::string& span_id) {
  for (auto& s : spans_) {
    if (s.span_id == span_id) return s;
  }
  throw std::out_of_range("no span " + span_id);
}

bool Trace::contains(std::string_view name) const { return count(name) > 0; }

std::size_t Trace::count(std::string_view name) const {
  return static_cast<std::size_t>(
      std::count_if(spans_.begin(), spans_.end(), [&](const TraceSpan& s) { return s.name == name; }));
}

ScopedSpan::ScopedSpan(Trace& trace, std::string name, std::optional<std::string> parent)
    : trace_(trace), id_(trace.begin(std::move(name), std::move(parent))) {}

ScopedSpan::~ScopedSpan() { trace_.end(id_); }

void ScopedSpan::fail(std::string_view detail) {
  auto& s = trace_.span(id_);
  s.failed = true;
  s.payload["error"] = std::string(detail);
}

bool is_supervisor_tree(const std::vector<TraceSpan>& spans) {
  std::size_t roots = 0;
  std::set<std::string> ids;
  for (const auto& s : spans) {
    if (!ids.insert(s.span_id).second) return false;
    if (!s.parent_id) {
      ++roots;
      if (s.name != "supervisor") return false;
    }
    if (s.ended_at < s.started_at || s.duration < 0) return false;
  }
  if (roots != 1) return false;
  // every parent must exist and appear before its child, so no cycles
  std::set<std::string> seen;
  for (const auto& s : spans) {
    if (s.parent_id && !seen.count(*s.parent_id)) return false;
    seen.insert(s.span_id);
  }
  return true;
}

ConversationTurn new_turn(const UserQuery& query) {
  if (text::trim(query.text).empty()) throw ValidationError("question text is empty");
  ConversationTurn t;
  t.query = query;
  t.route = RouteLabel::Unknown;
  return t;
}

// ---- JSON ----

void to_json(json& j, const Citation& c) {
  j = json{{"title", c.title}, {"doi_or_url", c.doi_or_url}};
  j["year"] = c.year ? json(*c.year) : json(nullptr);
}

void from_json(const json& j, Citation& c) {
  c.title = j.at("title").get<std::string>();
  c.doi_or_url = j.at("doi_or_url").get<std::string>();
  if (j.contains("year") && !j.at("year").is_null()) c.year = j.at("year").get<int>();
  else c.year.reset();
}

void to_json(json& j, const ResultTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = json::array();
    for (const auto& c : r) row.push_back(cell_to_json(c));
    rows.push_back(std::move(row));
  }
  j = json{{"columns", t.columns}, {"rows", rows}, {"total_row_count", t.total_row_count},
           {"truncated", t.truncated}};
}

void from_json(const json& j, ResultTable& t) {
  t.columns = j.at("columns").get<std::vector<std::string>>();
  t.rows.clear();
  for (const auto& r : j.at("rows")) {
    auto& row = t.rows.emplace_back();
    for (const auto& c : r) row.push_back(cell_from_json(c));
  }
  t.total_row_count = j.at("total_row_count").get<std::size_t>();
  t.truncated = j.at("truncated").get<bool>();
}

void to_json(json& j, const Attachment& a) {
  j = json{{"id", a.id}, {"kind", std::string(to_string(a.kind))}, {"payload", a.payload}};
}

void from_json(const json& j, Attachment& a) {
  a.id = j.at("id").get<std::string>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "table") a.kind = Attachment::Kind::Table;
  else if (kind == "series") a.kind = Attachment::Kind::Series;
  else if (kind == "svg") a.kind = Attachment::Kind::Svg;
  else throw ValidationError("unknown attachment kind " + kind);
  a.payload = j.at("payload");
}

void to_json(json& j, const AgentAnswer& a) {
  j = json{{"body", a.body},
           {"citations", a.citations},
           {"attachments", a.attachments},
           {"route", std::string(to_string(a.route))},
           {"elapsed", a.elapsed}};
  if (a.error) j["error"] = json{{"stage", a.error->stage}, {"detail", a.error->detail}};
  else j["error"] = nullptr;
}

void from_json(const json& j, AgentAnswer& a) {
  a.body = j.at("body").get<std::string>();
  a.citations = j.at("citations").get<std::vector<Citation>>();
  a.attachments = j.at("attachments").get<std::vector<Attachment>>();
  auto r = parse_route(j.at("route").get<std::string>());
  if (!r) throw ValidationError("unknown route in answer");
  a.route = *r;
  a.elapsed = j.at("elapsed").get<double>();
  if (j.contains("error") && !j.at("error").is_null()) {
    a.error = AnswerError{j.at("error").at("stage").get<std::string>(), j.at("error").at("detail").get<std::string>()};
  } else {
    a.error.reset();
  }
}

void to_json(json& j, const TraceSpan& s) {
  j = json{{"span_id", s.span_id},
           {"parent_id", s.parent_id ? json(*s.parent_id) : json(nullptr)},
           {"name", s.name},
           {"started_at", format_timestamp(s.started_at)},
           {"ended_at", format_timestamp(s.ended_at)},
           {"duration", s.duration},
           {"failed", s.failed},
           {"payload", s.payload}};
}

void from_json(const json& j, TraceSpan& s) {
  s.span_id = j.at("span_id").get<std::string>();
  if (j.at("parent_id").is_null()) s.parent_id.reset();
  else s.parent_id = j.at("parent_id").get<std::string>();
  s.name = j.at("name").get<std::string>();
  s.started_at = parse_timestamp(j.at("started_at").get<std::string>());
  s.ended_at = parse_timestamp(j.at("ended_at").get<std::string>());
  s.duration = j.at("duration").get<double>();
  s.failed = j.value("failed", false);
  s.payload = j.value("payload", json::object());
}

void to_json(json& j, const UserQuery& q) {
  j = json{{"text", q.text}, {"session_id", q.session_id}, {"received_at", format_timestamp(q.received_at)}};
}

void from_json(const json& j, UserQuery& q) {
  q.text = j.at("text").get<std::string>();
  q.session_id = j.at("session_id").get<std::string>();
  q.received_at = parse_timestamp(j.at("received_at").get<std::string>());
}

void to_json(json& j, const ConversationTurn& t) {
  j = json{{"turn_id", t.turn_id},
           {"query", t.query},
           {"route", std::string(to_string(t.route))},
           {"spans", t.spans},
           {"answer", t.answer ? json(*t.answer) : json(nullptr)}};
}

void from_json(const json& j, ConversationTurn& t) {
  t.turn_id = j.at("turn_id").get<std::string>();
  t.query = j.at("query").get<UserQuery>();
  auto r = parse_route(j.at("route").get<std::string>());
  if (!r) throw ValidationError("unknown route in turn");
  t.route = *r;
  t.spans = j.at("spans").get<std::vector<TraceSpan>>();
  if (j.at("answer").is_null()) t.answer.reset();
  else t.answer = j.at("answer").get<AgentAnswer>();
}

}  // namespace dairy
