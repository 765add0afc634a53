#pragma once

// Closed dataframe-chain mini-language used by the document-store agent.
//
//   program := ident "=" "df" step*
//   step    := ".select(" cols ")" | ".filter(" pred ")" | ".distinct()"
//            | ".groupBy(" cols ").agg(" agg ")" | ".count()" | ".avg(" col ")"
//            | ".orderBy(" col ["," "ascending=" bool] ")" | ".limit(" int ")"
//   pred    := col cmp literal { ("&" | "and") col cmp literal }
//   cmp     := > | >= | < | <= | == | !=
//   agg     := ("avg" | "sum" | "min" | "max" | "count") "(" col ")"
//
// Columns are quoted strings; literals are numbers or quoted strings. Whitespace is free.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dairy/core.hpp"

namespace dairy::dsl {

enum class CmpOp { Gt, Ge, Lt, Le, Eq, Ne };
enum class AggFn { Avg, Sum, Min, Max, Count };

std::string_view to_string(CmpOp op);
std::string_view to_string(AggFn fn);

using Literal = std::variant<std::int64_t, double, std::string>;

struct Comparison {
  std::string column;
  CmpOp op = CmpOp::Eq;
  Literal value;
  bool operator==(const Comparison&) const = default;
};

struct Select {
  std::vector<std::string> columns;
  bool operator==(const Select&) const = default;
};
struct Filter {
  std::vector<Comparison> terms;  // conjunction
  bool operator==(const Filter&) const = default;
};
struct Distinct {
  bool operator==(const Distinct&) const = default;
};
struct GroupByAgg {
  std::vector<std::string> keys;
  AggFn fn = AggFn::Count;
  std::string column;
  bool operator==(const GroupByAgg&) const = default;
};
struct Count {
  bool operator==(const Count&) const = default;
};
struct Avg {
  std::string column;
  bool operator==(const Avg&) const = default;
};
struct OrderBy {
  std::string column;
  bool ascending = true;
  bool operator==(const OrderBy&) const = default;
};
struct Limit {
  std::int64_t n = 0;
  bool operator==(const Limit&) const = default;
};

using Step = std::variant<Select, Filter, Distinct, GroupByAgg, Count, Avg, OrderBy, Limit>;

struct Program {
  std::string target = "result";
  std::vector<Step> steps;
  bool operator==(const Program&) const = default;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& what);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnknownColumnError : public SyntaxError {
 public:
  UnknownColumnError(std::size_t position, std::string column, std::string suggestion);
  const std::string& column() const { return column_; }
  const std::string& suggestion() const { return suggestion_; }

 private:
  std::string column_;
  std::string suggestion_;
};

// Output column names of aggregating steps: "count", "avg(MilkYieldKg)".
std::string agg_column_name(AggFn fn, std::string_view column);

// Grammar only.
Program parse(std::string_view source);
// Grammar plus column resolution: every referenced column must exist at that point of the chain
// (starting from `columns`); unknown names report the nearest existing one.
Program parse(std::string_view source, const std::vector<std::string>& columns);

// Canonical source; parse(to_source(p)) == p.
std::string to_source(const Program& p);

// ---- evaluation ----

enum class ColType { Text, Integer, Real };

struct Column {
  std::string name;
  ColType type = ColType::Text;
  bool operator==(const Column&) const = default;
};

// Integer columns hold int64 cells, Real columns double cells, Text columns strings; any cell
// may be null.
struct DataFrame {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  std::optional<std::size_t> index_of(std::string_view name) const;
  std::vector<std::string> names() const;
  bool operator==(const DataFrame&) const = default;
};

class EvalError : public Error {
 public:
  explicit EvalError(const std::string& what) : Error("execute_dsl_code", what) {}
};

// Semantics: steps apply left to right. Filter drops rows whose compared cell is null and
// rejects text-vs-number comparisons. Distinct keeps first occurrences. GroupByAgg emits groups
// in first-appearance order; aggregates skip nulls (all-null group: null, count: 0). Avg over
// no non-null value is an error. OrderBy is stable with nulls last. Sum keeps the column type,
// avg is real, count is integer.
DataFrame evaluate(const Program& program, const DataFrame& input);

ResultTable to_result_table(const DataFrame& df, std::size_t display_cap);

}  // namespace dairy::dsl
