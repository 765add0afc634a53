#include "dairy/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "dairy/text.hpp"

namespace dairy::dsl {

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
  }
  return "==";
}

std::string_view to_string(AggFn fn) {
  switch (fn) {
    case AggFn::Avg: return "avg";
    case AggFn::Sum: return "sum";
    case AggFn::Min: return "min";
    case AggFn::Max: return "max";
    case AggFn::Count: return "count";
  }
  return "count";
}

SyntaxError::SyntaxError(std::size_t position, const std::string& what)
    : Error("parse_dsl", "at position " + std::to_string(position) + ": " + what), position_(position) {}

UnknownColumnError::UnknownColumnError(std::size_t position, std::string column, std::string suggestion)
    : SyntaxError(position, "unknown column \"" + column + "\"" +
                                (suggestion.empty() ? std::string() : "; did you mean \"" + suggestion + "\"?")),
      column_(std::move(column)),
      suggestion_(std::move(suggestion)) {}

std::string agg_column_name(AggFn fn, std::string_view column) {
  if (fn == AggFn::Count && column.empty()) return "count";
  return std::string(to_string(fn)) + "(" + std::string(column) + ")";
}

// ---- lexer ----

namespace {

enum class Tok { Ident, String, Int, Real, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier, decoded string, punct, or number text
  std::size_t pos = 0;
  std::int64_t ival = 0;
  double rval = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_ws();
      if (i_ >= src_.size()) {
        out.push_back({Tok::End, "", i_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip_ws() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
  }

  Token next() {
    const std::size_t start = i_;
    const char c = src_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) ++i_;
      return {Tok::Ident, std::string(src_.substr(start, i_ - start)), start};
    }
    if (c == '"' || c == '\'') return string_lit(c, start);
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && i_ + 1 < src_.size() &&
         (std::isdigit(static_cast<unsigned char>(src_[i_ + 1])) || src_[i_ + 1] == '.'))) {
      return number(start);
    }
    if (c == '.' && i_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))) {
      return number(start);
    }
    static constexpr std::string_view two[] = {">=", "<=", "==", "!="};
    for (auto t : two) {
      if (src_.substr(i_, 2) == t) {
        i_ += 2;
        return {Tok::Punct, std::string(t), start};
      }
    }
    static constexpr std::string_view one = ".(),=&><";
    if (one.find(c) != std::string_view::npos) {
      ++i_;
      return {Tok::Punct, std::string(1, c), start};
    }
    throw SyntaxError(start, std::string("unexpected character '") + printable(c) + "'");
  }

  static std::string printable(char c) {
    if (std::isprint(static_cast<unsigned char>(c))) return std::string(1, c);
    char buf[8];
    std::snprintf(buf, sizeof buf, "\\x%02x", static_cast<unsigned char>(c));
    return buf;
  }

  Token string_lit(char quote, std::size_t start) {
    ++i_;
    std::string val;
    while (i_ < src_.size()) {
      const char c = src_[i_];
      if (c == '\\') {
        if (i_ + 1 >= src_.size()) break;
        val += src_[i_ + 1];
        i_ += 2;
        continue;
      }
      if (c == quote) {
        ++i_;
        return {Tok::String, val, start};
      }
      val += c;
      ++i_;
    }
    throw SyntaxError(start, "unterminated string literal");
  }

  Token number(std::size_t start) {
    if (src_[i_] == '-') ++i_;
    bool real = false;
    while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
    if (i_ < src_.size() && src_[i_] == '.' && i_ + 1 < src_.size() &&
        std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))) {
      real = true;
      ++i_;
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
    }
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
      std::size_t j = i_ + 1;
      if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
      if (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) {
        real = true;
        i_ = j;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
      }
    }
    const std::string txt(src_.substr(start, i_ - start));
    Token t{real ? Tok::Real : Tok::Int, txt, start};
    if (real) {
      char* end = nullptr;
      t.rval = std::strtod(txt.c_str(), &end);
      if (end != txt.c_str() + txt.size() || !std::isfinite(t.rval)) {
        throw SyntaxError(start, "invalid number " + txt);
      }
    } else {
      auto [p, ec] = std::from_chars(txt.data(), txt.data() + txt.size(), t.ival);
      if (ec != std::errc() || p != txt.data() + txt.size()) throw SyntaxError(start, "integer out of range " + txt);
    }
    return t;
  }

  std::string_view src_;
  std::size_t i_ = 0;
};

// ---- parser ----

class Parser {
 public:
  Parser(std::vector<Token> toks, const std::vector<std::string>* columns)
      : toks_(std::move(toks)), checking_(columns != nullptr) {
    if (columns) cols_ = *columns;
  }

  Program program() {
    Program p;
    const auto& target = expect(Tok::Ident, "an assignment target");
    p.target = target.text;
    punct("=");
    const auto& df = expect(Tok::Ident, "df");
    if (df.text != "df") throw SyntaxError(df.pos, "expected df, found " + df.text);
    while (peek().kind != Tok::End) p.steps.push_back(step());
    return p;
  }

 private:
  const Token& peek() const { return toks_[k_]; }
  const Token& take() {
    const Token& t = toks_[k_];
    if (t.kind != Tok::End) ++k_;
    return t;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::String: return "string \"" + t.text + "\"";
      default: return "'" + t.text + "'";
    }
  }

  const Token& expect(Tok kind, std::string_view what) {
    const Token& t = peek();
    if (t.kind != kind) throw SyntaxError(t.pos, "expected " + std::string(what) + ", found " + describe(t));
    return take();
  }

  void punct(std::string_view p) {
    const Token& t = peek();
    if (t.kind != Tok::Punct || t.text != p) {
      throw SyntaxError(t.pos, "expected '" + std::string(p) + "', found " + describe(t));
    }
    take();
  }

  bool at_punct(std::string_view p) const { return peek().kind == Tok::Punct && peek().text == p; }

  std::string column() {
    const Token& t = expect(Tok::String, "a quoted column name");
    if (checking_ && std::find(cols_.begin(), cols_.end(), t.text) == cols_.end()) {
      std::string best;
      std::size_t best_d = std::numeric_limits<std::size_t>::max();
      for (const auto& c : cols_) {
        const auto d = text::edit_distance(t.text, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      throw UnknownColumnError(t.pos, t.text, best);
    }
    return t.text;
  }

  std::vector<std::string> column_list() {
    std::vector<std::string> out{column()};
    while (at_punct(",")) {
      take();
      out.push_back(column());
    }
    return out;
  }

  Comparison comparison() {
    Comparison c;
    c.column = column();
    const Token& op = peek();
    if (op.kind != Tok::Punct) throw SyntaxError(op.pos, "expected a comparison operator, found " + describe(op));
    if (op.text == ">") c.op = CmpOp::Gt;
    else if (op.text == ">=") c.op = CmpOp::Ge;
    else if (op.text == "<") c.op = CmpOp::Lt;
    else if (op.text == "<=") c.op = CmpOp::Le;
    else if (op.text == "==") c.op = CmpOp::Eq;
    else if (op.text == "!=") c.op = CmpOp::Ne;
    else throw SyntaxError(op.pos, "expected a comparison operator, found " + describe(op));
    take();
    const Token& v = peek();
    switch (v.kind) {
      case Tok::Int: c.value = v.ival; break;
      case Tok::Real: c.value = v.rval; break;
      case Tok::String: c.value = v.text; break;
      default: throw SyntaxError(v.pos, "expected a literal, found " + describe(v));
    }
    take();
    return c;
  }

  Step step() {
    punct(".");
    const Token& name = expect(Tok::Ident, "a step name");
    const std::string n = name.text;
    punct("(");
    if (n == "select") {
      Select s{column_list()};
      punct(")");
      cols_ = s.columns;
      return s;
    }
    if (n == "filter") {
      Filter f;
      f.terms.push_back(comparison());
      while (at_punct("&") || (peek().kind == Tok::Ident && peek().text == "and")) {
        take();
        f.terms.push_back(comparison());
      }
      punct(")");
      return f;
    }
    if (n == "distinct") {
      punct(")");
      return Distinct{};
    }
    if (n == "groupBy") {
      GroupByAgg g;
      g.keys = column_list();
      punct(")");
      punct(".");
      const Token& agg = expect(Tok::Ident, "agg");
      if (agg.text != "agg") throw SyntaxError(agg.pos, "groupBy must be followed by .agg(...), found " + agg.text);
      punct("(");
      const Token& fn = expect(Tok::Ident, "an aggregate function");
      if (fn.text == "avg") g.fn = AggFn::Avg;
      else if (fn.text == "sum") g.fn = AggFn::Sum;
      else if (fn.text == "min") g.fn = AggFn::Min;
      else if (fn.text == "max") g.fn = AggFn::Max;
      else if (fn.text == "count") g.fn = AggFn::Count;
      else throw SyntaxError(fn.pos, "unknown aggregate function " + fn.text);
      punct("(");
      g.column = column();
      punct(")");
      punct(")");
      auto next = g.keys;
      next.push_back(agg_column_name(g.fn, g.column));
      cols_ = std::move(next);
      return g;
    }
    if (n == "count") {
      punct(")");
      cols_ = {"count"};
      return Count{};
    }
    if (n == "avg") {
      Avg a{column()};
      punct(")");
      cols_ = {agg_column_name(AggFn::Avg, a.column)};
      return a;
    }
    if (n == "orderBy") {
      OrderBy o;
      o.column = column();
      if (at_punct(",")) {
        take();
        const Token& kw = expect(Tok::Ident, "ascending");
        if (kw.text != "ascending") throw SyntaxError(kw.pos, "expected ascending=, found " + kw.text);
        punct("=");
        const Token& b = expect(Tok::Ident, "True or False");
        if (b.text == "True" || b.text == "true") o.ascending = true;
        else if (b.text == "False" || b.text == "false") o.ascending = false;
        else throw SyntaxError(b.pos, "expected True or False, found " + b.text);
      }
      punct(")");
      return o;
    }
    if (n == "limit") {
      const Token& v = expect(Tok::Int, "a row count");
      if (v.ival < 0) throw SyntaxError(v.pos, "limit must not be negative");
      Limit l{v.ival};
      punct(")");
      return l;
    }
    throw SyntaxError(name.pos, "unsupported step ." + n + "()");
  }

  std::vector<Token> toks_;
  std::size_t k_ = 0;
  bool checking_ = false;
  std::vector<std::string> cols_;
};

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string literal_source(const Literal& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    std::string s = buf;
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
  }
  return quote(std::get<std::string>(v));
}

}  // namespace

Program parse(std::string_view source) { return Parser(Lexer(source).run(), nullptr).program(); }

Program parse(std::string_view source, const std::vector<std::string>& columns) {
  return Parser(Lexer(source).run(), &columns).program();
}

std::string to_source(const Program& p) {
  std::string out = p.target + " = df";
  struct V {
    std::string& out;
    static std::string cols(const std::vector<std::string>& cs) {
      std::string s;
      for (std::size_t i = 0; i < cs.size(); ++i) s += (i ? ", " : "") + quote(cs[i]);
      return s;
    }
    void operator()(const Select& s) { out += ".select(" + cols(s.columns) + ")"; }
    void operator()(const Filter& f) {
      out += ".filter(";
      for (std::size_t i = 0; i < f.terms.size(); ++i) {
        const auto& t = f.terms[i];
        out += (i ? " & " : "") + quote(t.column) + " " + std::string(to_string(t.op)) + " " + literal_source(t.value);
      }
      out += ")";
    }
    void operator()(const Distinct&) { out += ".distinct()"; }
    void operator()(const GroupByAgg& g) {
      out += ".groupBy(" + cols(g.keys) + ").agg(" + std::string(to_string(g.fn)) + "(" + quote(g.column) + "))";
    }
    void operator()(const Count&) { out += ".count()"; }
    void operator()(const Avg& a) { out += ".avg(" + quote(a.column) + ")"; }
    void operator()(const OrderBy& o) {
      out += ".orderBy(" + quote(o.column) + (o.ascending ? "" : ", ascending=False") + ")";
    }
    void operator()(const Limit& l) { out += ".limit(" + std::to_string(l.n) + ")"; }
  };
  for (const auto& s : p.steps) std::visit(V{out}, s);
  return out;
}

// ---- evaluation ----

std::optional<std::size_t> DataFrame::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> DataFrame::names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

namespace {

bool is_null(const Cell& c) { return std::holds_alternative<std::monostate>(c); }

double as_double(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  return std::get<double>(c);
}

std::size_t require(const DataFrame& df, const std::string& name) {
  const auto idx = df.index_of(name);
  if (!idx) throw EvalError("unknown column \"" + name + "\"");
  return *idx;
}

// Three-way compare of two non-null cells of one column type.
int compare_cells(const Cell& a, const Cell& b) {
  if (std::holds_alternative<std::string>(a)) {
    const auto& x = std::get<std::string>(a);
    const auto& y = std::get<std::string>(b);
    return x < y ? -1 : (y < x ? 1 : 0);
  }
  if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
    const auto x = std::get<std::int64_t>(a);
    const auto y = std::get<std::int64_t>(b);
    return x < y ? -1 : (y < x ? 1 : 0);
  }
  const double x = as_double(a);
  const double y = as_double(b);
  return x < y ? -1 : (y < x ? 1 : 0);
}

bool test(CmpOp op, int c) {
  switch (op) {
    case CmpOp::Gt: return c > 0;
    case CmpOp::Ge: return c >= 0;
    case CmpOp::Lt: return c < 0;
    case CmpOp::Le: return c <= 0;
    case CmpOp::Eq: return c == 0;
    case CmpOp::Ne: return c != 0;
  }
  return false;
}

Cell literal_cell(const Literal& v) {
  return std::visit([](const auto& x) -> Cell { return x; }, v);
}

DataFrame apply(const Select& s, const DataFrame& in) {
  std::vector<std::size_t> idx;
  DataFrame out;
  for (const auto& c : s.columns) {
    idx.push_back(require(in, c));
    out.columns.push_back(in.columns[idx.back()]);
  }
  out.rows.reserve(in.rows.size());
  for (const auto& r : in.rows) {
    auto& row = out.rows.emplace_back();
    for (auto i : idx) row.push_back(r[i]);
  }
  return out;
}

DataFrame apply(const Filter& f, const DataFrame& in) {
  std::vector<std::size_t> idx;
  for (const auto& t : f.terms) {
    const auto i = require(in, t.column);
    const bool text_col = in.columns[i].type == ColType::Text;
    const bool text_lit = std::holds_alternative<std::string>(t.value);
    if (text_col != text_lit) {
      throw EvalError("type mismatch: column \"" + t.column + "\" is " + (text_col ? "text" : "numeric") +
                      " but the literal is " + (text_lit ? "text" : "numeric"));
    }
    idx.push_back(i);
  }
  DataFrame out{in.columns, {}};
  for (const auto& r : in.rows) {
    bool keep = true;
    for (std::size_t k = 0; k < f.terms.size() && keep; ++k) {
      const Cell& cell = r[idx[k]];
      keep = !is_null(cell) && test(f.terms[k].op, compare_cells(cell, literal_cell(f.terms[k].value)));
    }
    if (keep) out.rows.push_back(r);
  }
  return out;
}

DataFrame apply(const Distinct&, const DataFrame& in) {
  DataFrame out{in.columns, {}};
  for (const auto& r : in.rows) {
    if (std::find(out.rows.begin(), out.rows.end(), r) == out.rows.end()) out.rows.push_back(r);
  }
  return out;
}

struct Accumulator {
  AggFn fn;
  ColType type;
  std::int64_t count = 0;
  double real_sum = 0;
  std::int64_t int_sum = 0;
  Cell best;

  void add(const Cell& c) {
    if (is_null(c)) return;
    ++count;
    if (fn == AggFn::Sum || fn == AggFn::Avg) {
      if (fn == AggFn::Sum && type == ColType::Integer) int_sum += std::get<std::int64_t>(c);
      else real_sum += as_double(c);
    } else if (fn == AggFn::Min || fn == AggFn::Max) {
      if (is_null(best)) {
        best = c;
      } else {
        const int cmp = compare_cells(c, best);
        if ((fn == AggFn::Min && cmp < 0) || (fn == AggFn::Max && cmp > 0)) best = c;
      }
    }
  }

  Cell result() const {
    switch (fn) {
      case AggFn::Count: return count;
      case AggFn::Sum:
        if (count == 0) return std::monostate{};
        if (type == ColType::Integer) return int_sum;
        return real_sum;
      case AggFn::Avg:
        if (count == 0) return std::monostate{};
        return real_sum / static_cast<double>(count);
      case AggFn::Min:
      case AggFn::Max: return best;
    }
    return std::monostate{};
  }
};

ColType agg_type(AggFn fn, ColType in) {
  switch (fn) {
    case AggFn::Count: return ColType::Integer;
    case AggFn::Avg: return ColType::Real;
    default: return in;
  }
}

DataFrame apply(const GroupByAgg& g, const DataFrame& in) {
  std::vector<std::size_t> keys;
  DataFrame out;
  for (const auto& k : g.keys) {
    keys.push_back(require(in, k));
    out.columns.push_back(in.columns[keys.back()]);
  }
  const auto vi = require(in, g.column);
  const ColType vt = in.columns[vi].type;
  if (vt == ColType::Text && (g.fn == AggFn::Avg || g.fn == AggFn::Sum)) {
    throw EvalError(std::string(to_string(g.fn)) + " needs a numeric column, \"" + g.column + "\" is text");
  }
  out.columns.push_back({agg_column_name(g.fn, g.column), agg_type(g.fn, vt)});

  std::vector<std::vector<Cell>> group_keys;
  std::vector<Accumulator> accs;
  for (const auto& r : in.rows) {
    std::vector<Cell> key;
    for (auto k : keys) key.push_back(r[k]);
    auto it = std::find(group_keys.begin(), group_keys.end(), key);
    std::size_t gi;
    if (it == group_keys.end()) {
      group_keys.push_back(std::move(key));
      accs.push_back(Accumulator{g.fn, vt, 0, 0, 0, {}});
      gi = accs.size() - 1;
    } else {
      gi = static_cast<std::size_t>(it - group_keys.begin());
    }
    accs[gi].add(r[vi]);
  }
  for (std::size_t i = 0; i < group_keys.size(); ++i) {
    auto row = group_keys[i];
    row.push_back(accs[i].result());
    out.rows.push_back(std::move(row));
  }
  return out;
}

DataFrame apply(const Count&, const DataFrame& in) {
  return DataFrame{{{"count", ColType::Integer}}, {{static_cast<std::int64_t>(in.rows.size())}}};
}

DataFrame apply(const Avg& a, const DataFrame& in) {
  const auto i = require(in, a.column);
  if (in.columns[i].type == ColType::Text) throw EvalError("avg needs a numeric column, \"" + a.column + "\" is text");
  Accumulator acc{AggFn::Avg, in.columns[i].type, 0, 0, 0, {}};
  for (const auto& r : in.rows) acc.add(r[i]);
  if (acc.count == 0) throw EvalError("avg(\"" + a.column + "\") has no non-null values");
  return DataFrame{{{agg_column_name(AggFn::Avg, a.column), ColType::Real}}, {{acc.result()}}};
}

DataFrame apply(const OrderBy& o, const DataFrame& in) {
  const auto i = require(in, o.column);
  DataFrame out = in;
  std::stable_sort(out.rows.begin(), out.rows.end(), [&](const auto& a, const auto& b) {
    const bool na = is_null(a[i]);
    const bool nb = is_null(b[i]);
    if (na || nb) return !na && nb;  // nulls last
    const int c = compare_cells(a[i], b[i]);
    return o.ascending ? c < 0 : c > 0;
  });
  return out;
}

DataFrame apply(const Limit& l, const DataFrame& in) {
  DataFrame out{in.columns, {}};
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(l.n), in.rows.size());
  out.rows.assign(in.rows.begin(), in.rows.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

}  // namespace

DataFrame evaluate(const Program& program, const DataFrame& input) {
  DataFrame cur = input;
  for (const auto& s : program.steps) {
    cur = std::visit([&](const auto& step) { return apply(step, cur); }, s);
  }
  return cur;
}

ResultTable to_result_table(const DataFrame& df, std::size_t display_cap) {
  ResultTable t;
  t.columns = df.names();
  t.total_row_count = df.rows.size();
  const auto n = std::min(display_cap, df.rows.size());
  t.rows.assign(df.rows.begin(), df.rows.begin() + static_cast<std::ptrdiff_t>(n));
  t.truncated = t.total_row_count > t.rows.size();
  return t;
}

}  // namespace dairy::dsl
