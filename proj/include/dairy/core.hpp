#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "dairy/error.hpp"

namespace dairy {

using json = nlohmann::json;
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

Timestamp utc_now();
std::string format_timestamp(Timestamp t);  // 2025-10-01T08:30:00.123Z
Timestamp parse_timestamp(std::string_view s);

// UNKNOWN is internal only; it must be collapsed to CLARIFY before answering.
enum class RouteLabel { Text, Sql, NoSql, Model, Clarify, Unknown };

std::string_view to_string(RouteLabel label);  // "TEXT", "SQL", ...
std::optional<RouteLabel> parse_route(std::string_view name);
// Vocabulary the supervisor emits: "text_subagent", "sql_subagent", ...
std::string_view subagent_name(RouteLabel label);

struct UserQuery {
  std::string text;
  std::string session_id;
  Timestamp received_at{};

  // Throws ValidationError when the text is blank.
  static UserQuery make(std::string text, std::string session_id);
};

struct Citation {
  std::string title;
  std::optional<int> year;
  std::string doi_or_url;

  // "Title (Year) – DOI: 10.x/y" for literature, "\"Title\" – url" for web pages.
  std::string render() const;
  bool operator==(const Citation&) const = default;
};

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

std::string cell_to_string(const Cell& c);
json cell_to_json(const Cell& c);
Cell cell_from_json(const json& j);

// A capped view of a query result. `rows` never exceeds the display cap.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::size_t total_row_count = 0;
  bool truncated = false;

  std::string render_text() const;
  bool operator==(const ResultTable&) const = default;
};

struct Attachment {
  enum class Kind { Table, Series, Svg };
  std::string id;
  Kind kind = Kind::Table;
  json payload;  // table/series JSON, or the SVG document as a JSON string

  bool operator==(const Attachment&) const = default;
};

std::string_view to_string(Attachment::Kind k);

struct AnswerError {
  std::string stage;
  std::string detail;
  bool operator==(const AnswerError&) const = default;
};

struct AgentAnswer {
  std::string body;
  std::vector<Citation> citations;
  std::vector<Attachment> attachments;
  RouteLabel route = RouteLabel::Clarify;
  double elapsed = 0.0;  // seconds
  std::optional<AnswerError> error;

  bool operator==(const AgentAnswer&) const = default;
};

inline constexpr std::string_view kIDontKnow = "I don't know.";

struct TraceSpan {
  std::string span_id;
  std::optional<std::string> parent_id;
  std::string name;
  Timestamp started_at{};
  Timestamp ended_at{};
  double duration = 0.0;  // monotonic seconds
  bool failed = false;
  json payload = json::object();

  bool operator==(const TraceSpan&) const = default;
};

// Single-writer span recorder for one turn.
class Trace {
 public:
  std::string begin(std::string name, std::optional<std::string> parent = std::nullopt);
  void end(const std::string& span_id);
  TraceSpan& span(const std::string& span_id);

  const std::vector<TraceSpan>& spans() const { return spans_; }
  std::vector<TraceSpan> take() { return std::move(spans_); }
  bool contains(std::string_view name) const;
  std::size_t count(std::string_view name) const;

 private:
  struct Open {
    std::string id;
    std::chrono::steady_clock::time_point started;
  };
  std::vector<TraceSpan> spans_;
  std::vector<Open> open_;
  std::size_t next_id_ = 1;
};

// RAII wrapper: the span closes when the scope exits, even on exceptions.
class ScopedSpan {
 public:
  ScopedSpan(Trace& trace, std::string name, std::optional<std::string> parent = std::nullopt);
  ~ScopedSpan();
  ScopedSpan(const ScopedSpan&) = delete;
  ScopedSpan& operator=(const ScopedSpan&) = delete;

  const std::string& id() const { return id_; }
  json& payload() { return trace_.span(id_).payload; }
  void fail(std::string_view detail);

 private:
  Trace& trace_;
  std::string id_;
};

// Spans must form one tree rooted at a span named "supervisor".
bool is_supervisor_tree(const std::vector<TraceSpan>& spans);

struct ConversationTurn {
  std::string turn_id;
  UserQuery query;
  RouteLabel route = RouteLabel::Unknown;
  std::vector<TraceSpan> spans;
  std::optional<AgentAnswer> answer;

  bool operator==(const ConversationTurn&) const = default;
};

ConversationTurn new_turn(const UserQuery& query);

bool operator==(const UserQuery& a, const UserQuery& b);

void to_json(json& j, const Citation& c);
void from_json(const json& j, Citation& c);
void to_json(json& j, const ResultTable& t);
void from_json(const json& j, ResultTable& t);
void to_json(json& j, const Attachment& a);
void from_json(const json& j, Attachment& a);
void to_json(json& j, const AgentAnswer& a);
void from_json(const json& j, AgentAnswer& a);
void to_json(json& j, const TraceSpan& s);
void from_json(const json& j, TraceSpan& s);
void to_json(json& j, const UserQuery& q);
void from_json(const json& j, UserQuery& q);
void to_json(json& j, const ConversationTurn& t);
void from_json(const json& j, ConversationTurn& t);

}  // namespace dairy
