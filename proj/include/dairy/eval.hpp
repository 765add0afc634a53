#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dairy/core.hpp"
#include "dairy/engine.hpp"

namespace dairy::eval {

enum class Category { Literature, Web, Sql, NoSql, Model, Guard };

inline constexpr Category kCategories[] = {Category::Literature, Category::Web,   Category::Sql,
                                           Category::NoSql,      Category::Model, Category::Guard};

std::string_view to_string(Category c);       // "literature", ...
std::string_view column_title(Category c);    // "Literature Retrieval", ...
Category parse_category(std::string_view s);  // throws ValidationError

enum class Verdict { Pass, Fail, NeedsManual };
std::string_view to_string(Verdict v);  // "pass", "fail", "needs_manual"
Verdict parse_verdict(std::string_view s);

struct Checker {
  enum class Kind { ContainsAny, NumericEquals, Regex, Exact, Manual };
  Kind kind = Kind::Manual;
  std::vector<std::string> keywords;  // contains_any, case-insensitive
  double value = 0.0;                 // numeric_equals
  double tolerance = 1e-6;
  std::string pattern;  // regex (ECMAScript, searched)
  std::string text;     // exact

  // Body plus rendered citations are checked; exact compares the body only.
  Verdict check(const AgentAnswer& answer) const;

  static Checker from_json(const json& j);
  json to_json() const;
};

struct EvalItem {
  std::string item_id;
  Category category = Category::Literature;
  std::string question;
  int phase = 2;
  RouteLabel expected_route = RouteLabel::Text;
  // Each pattern must match at least one span name; '*' is a wildcard, '|' separates
  // alternatives.
  std::vector<std::string> expected_tool_spans;
  Checker checker;

  static EvalItem from_json(const json& j);
  json to_json() const;
};

bool span_pattern_matches(std::string_view pattern, std::string_view name);

std::vector<EvalItem> load_items(const std::filesystem::path& path);

struct ItemOutcome {
  std::string item_id;
  Category category = Category::Literature;
  std::string question;
  RouteLabel expected_route = RouteLabel::Text;
  RouteLabel actual_route = RouteLabel::Clarify;
  bool route_correct = false;
  bool tool_correct = false;
  Verdict verdict = Verdict::Fail;
  double elapsed = 0.0;
  std::optional<std::string> error;  // failing stage
  std::string turn_id;

  // Phase-1 screening gate: no stage error and a pass or pending verdict.
  bool gate_pass() const { return !error && verdict != Verdict::Fail; }
  // Phase-2 correctness: right route and a passing answer.
  bool correct() const { return route_correct && verdict == Verdict::Pass; }

  bool operator==(const ItemOutcome&) const = default;
};

struct CategoryScore {
  Category category;
  std::size_t correct = 0;
  std::size_t total = 0;
  std::size_t pending = 0;
  double seconds = 0.0;
};

struct PhaseReport {
  int phase = 2;
  std::string model;
  std::vector<ItemOutcome> items;

  std::vector<CategoryScore> categories() const;  // fixed column order, empty categories kept
  std::size_t overall_correct() const;
  std::size_t overall_total() const { return items.size(); }

  json to_json() const;
  static PhaseReport from_json(const json& j);
  bool operator==(const PhaseReport&) const = default;
};

// Runs every item through the engine, strictly sequentially. Phase 1 uses direct mode to the
// expected route, phase 2 the supervisor.
PhaseReport run_phase(Engine& engine, const std::vector<EvalItem>& items, int phase, const std::string& model);

enum class Format { TableText, Json, Csv };
Format parse_format(std::string_view s);  // throws ValidationError
std::string render_report(const PhaseReport& report, Format format);
// Several models in one table (one row each).
std::string render_reports(const std::vector<PhaseReport>& reports, Format format);

}  // namespace dairy::eval
