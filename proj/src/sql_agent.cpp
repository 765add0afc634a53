#include "dairy/sql_agent.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <sqlite3.h>

#include "dairy/csv.hpp"
#include "dairy/text.hpp"

namespace dairy {

TableSchema TableSchema::milk_records() {
  using T = ColumnSpec::Type;
  TableSchema s;
  s.columns = {
      {"AnimalIdentifier", T::Text, ""},      {"HerdIdentifier", T::Text, ""},
      {"BirthDate", T::Date, ""},             {"CalvingDate", T::Date, ""},
      {"SireBreed", T::Text, ""},             {"DamBreed", T::Text, ""},
      {"DaysInMilk", T::Integer, "days"},     {"LactationNumber", T::Integer, ""},
      {"MilkYieldKg", T::Real, "kg"},         {"FatYieldKg", T::Real, "kg"},
      {"ProteinYieldKg", T::Real, "kg"},      {"FatPct", T::Real, "%"},
      {"ProteinPct", T::Real, "%"},           {"SomaticCellCount", T::Integer, "cells/mL"},
  };
  return s;
}

const ColumnSpec* TableSchema::find(std::string_view name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

const char* sql_type(ColumnSpec::Type t) {
  switch (t) {
    case ColumnSpec::Type::Text: return "TEXT";
    case ColumnSpec::Type::Date: return "TEXT";
    case ColumnSpec::Type::Integer: return "INTEGER";
    case ColumnSpec::Type::Real: return "REAL";
  }
  return "TEXT";
}

}  // namespace

std::string TableSchema::render_create() const {
  std::string out = "CREATE TABLE " + table + " (\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const auto& c = columns[i];
    out += "  " + c.name + " " + sql_type(c.type) + (i + 1 < columns.size() ? "," : "");
    std::string note;
    if (c.type == ColumnSpec::Type::Date) note = "ISO-8601 date";
    if (!c.unit.empty()) note = c.unit;
    if (!note.empty()) out += "  -- " + note;
    out += "\n";
  }
  return out + ");";
}

// ---- validation ----

namespace {

constexpr std::array kForbidden = {"INSERT", "UPDATE", "DELETE", "DROP",    "ALTER",
                                   "CREATE", "ATTACH", "PRAGMA", "REPLACE", "TRUNCATE"};

// Comments become a single space; literals are kept verbatim.
std::string strip_sql_comments(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\'' || c == '"' || c == '`') {
      const char q = c;
      out += c;
      ++i;
      while (i < s.size()) {
        out += s[i];
        if (s[i] == q) {
          if (i + 1 < s.size() && s[i + 1] == q) {
            out += s[++i];
          } else {
            ++i;
            break;
          }
        }
        ++i;
      }
      continue;
    }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      while (i < s.size() && s[i] != '\n') ++i;
      out += ' ';
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      const auto end = s.find("*/", i + 2);
      if (end == std::string_view::npos) throw SqlValidationError("comment", "unterminated block comment");
      i = end + 2;
      out += ' ';
      continue;
    }
    out += c;
    ++i;
  }
  return out;
}

// Text outside quotes, with every quoted run replaced by a space.
std::string outside_literals(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\'' || c == '"' || c == '`') {
      const char q = c;
      ++i;
      bool closed = false;
      while (i < s.size()) {
        if (s[i] == q) {
          if (i + 1 < s.size() && s[i + 1] == q) {
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        ++i;
      }
      if (!closed) throw SqlValidationError("literal", "unterminated quoted literal");
      out += ' ';
      continue;
    }
    out += c;
    ++i;
  }
  return out;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string w;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      w += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    } else if (!w.empty()) {
      out.push_back(std::move(w));
      w.clear();
    }
  }
  if (!w.empty()) out.push_back(std::move(w));
  return out;
}

}  // namespace

SqlPlan validate_sql(std::string_view statement) {
  const std::string stripped = strip_sql_comments(statement);
  const std::string bare = outside_literals(stripped);
  if (text::trim(bare).empty()) throw SqlValidationError("empty", "SQL statement is empty");

  const auto semi = bare.find(';');
  if (semi != std::string::npos && !text::trim(std::string_view(bare).substr(semi + 1)).empty()) {
    throw SqlValidationError("single-statement", "only one SQL statement is allowed");
  }
  const auto ws = words(bare);
  if (ws.empty() || (ws.front() != "SELECT" && ws.front() != "WITH")) {
    throw SqlValidationError("read-only", "statement must start with SELECT or WITH");
  }
  for (const auto& w : ws) {
    for (const char* f : kForbidden) {
      if (w == f) throw SqlValidationError("forbidden-keyword", "forbidden keyword " + w);
    }
  }
  return SqlPlan{text::trim(stripped), true};
}

// ---- ingestion ----

namespace {

struct Db {
  sqlite3* h = nullptr;
  ~Db() {
    if (h) sqlite3_close(h);
  }
};

struct Stmt {
  sqlite3_stmt* h = nullptr;
  ~Stmt() {
    if (h) sqlite3_finalize(h);
  }
};

void exec(sqlite3* db, const std::string& sql) {
  char* err = nullptr;
  if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw IngestionError("ingest_csv", "sqlite: " + msg);
  }
}

bool parse_int(const std::string& s, std::int64_t& out) {
  const auto t = text::trim(s);
  if (t.empty()) return false;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && p == t.data() + t.size();
}

bool parse_real(const std::string& s, double& out) {
  const auto t = text::trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

bool is_iso_date(const std::string& s) {
  static const std::regex re(R"(^\d{4}-\d{2}-\d{2}$)");
  return std::regex_match(s, re);
}

}  // namespace

CsvIngestReport ingest_csv(const std::filesystem::path& csv_path, const std::filesystem::path& db_path,
                           const TableSchema& schema) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw IngestionError("ingest_csv", "cannot open CSV file " + csv_path.string());
  std::ostringstream os;
  os << in.rdbuf();
  const auto rows = csv::parse(os.str());
  if (rows.empty()) throw IngestionError("ingest_csv", "CSV file " + csv_path.string() + " has no header");

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < rows[0].size(); ++i) index[text::trim(rows[0][i])] = i;
  std::vector<std::size_t> order;
  for (const auto& c : schema.columns) {
    auto it = index.find(c.name);
    if (it == index.end()) throw IngestionError("ingest_csv", "CSV header is missing column " + c.name);
    order.push_back(it->second);
  }

  if (!db_path.parent_path().empty()) std::filesystem::create_directories(db_path.parent_path());
  const auto tmp = db_path.string() + ".tmp";
  std::filesystem::remove(tmp);
  CsvIngestReport report;
  {
    Db db;
    if (sqlite3_open(tmp.c_str(), &db.h) != SQLITE_OK) {
      throw IngestionError("ingest_csv", "cannot create store " + tmp);
    }
    std::string ddl = "CREATE TABLE " + schema.table + " (";
    std::string ins = "INSERT INTO " + schema.table + " VALUES (";
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
      ddl += (i ? ", " : "") + schema.columns[i].name + " " + sql_type(schema.columns[i].type);
      ins += i ? ", ?" : "?";
    }
    exec(db.h, ddl + ")");
    exec(db.h, "BEGIN");
    Stmt st;
    if (sqlite3_prepare_v2(db.h, (ins + ")").c_str(), -1, &st.h, nullptr) != SQLITE_OK) {
      throw IngestionError("ingest_csv", sqlite3_errmsg(db.h));
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      auto reject = [&](const std::string& why) {
        ++report.rejected;
        report.warnings.push_back("row " + std::to_string(r) + ": " + why);
      };
      if (row.size() != rows[0].size()) {
        reject("expected " + std::to_string(rows[0].size()) + " fields, got " + std::to_string(row.size()));
        continue;
      }
      sqlite3_reset(st.h);
      sqlite3_clear_bindings(st.h);
      bool ok = true;
      for (std::size_t c = 0; c < schema.columns.size() && ok; ++c) {
        const auto& spec = schema.columns[c];
        const std::string cell = text::trim(row[order[c]]);
        const int slot = static_cast<int>(c + 1);
        if (cell.empty()) {
          sqlite3_bind_null(st.h, slot);
          continue;
        }
        switch (spec.type) {
          case ColumnSpec::Type::Integer: {
            std::int64_t v = 0;
            if (!parse_int(cell, v)) {
              reject(spec.name + " is not an integer: " + cell);
              ok = false;
            } else {
              sqlite3_bind_int64(st.h, slot, v);
            }
            break;
          }
          case ColumnSpec::Type::Real: {
            double v = 0;
            if (!parse_real(cell, v)) {
              reject(spec.name + " is not a number: " + cell);
              ok = false;
            } else {
              sqlite3_bind_double(st.h, slot, v);
            }
            break;
          }
          case ColumnSpec::Type::Date:
            if (!is_iso_date(cell)) {
              reject(spec.name + " is not an ISO-8601 date: " + cell);
              ok = false;
              break;
            }
            [[fallthrough]];
          case ColumnSpec::Type::Text:
            sqlite3_bind_text(st.h, slot, cell.c_str(), static_cast<int>(cell.size()), SQLITE_TRANSIENT);
            break;
        }
      }
      if (!ok) continue;
      if (sqlite3_step(st.h) != SQLITE_DONE) throw IngestionError("ingest_csv", sqlite3_errmsg(db.h));
      ++report.loaded;
    }
    exec(db.h, "COMMIT");
  }
  std::filesystem::rename(tmp, db_path);
  return report;
}

// ---- store ----

SqlStore::SqlStore(const std::filesystem::path& db_path) : path_(db_path) {
  if (!std::filesystem::exists(db_path)) {
    throw ExecutionError("relational store " + db_path.string() + " does not exist; run ingest first");
  }
  // immutable=1: no locks, journals or shm files, so the file stays byte-identical.
  const std::string uri = "file:" + std::filesystem::absolute(db_path).string() + "?mode=ro&immutable=1";
  if (sqlite3_open_v2(uri.c_str(), &db_, SQLITE_OPEN_READONLY | SQLITE_OPEN_URI | SQLITE_OPEN_FULLMUTEX, nullptr) !=
      SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    if (db_) sqlite3_close(db_);
    db_ = nullptr;
    throw ExecutionError("cannot open relational store: " + msg);
  }
}

SqlStore::~SqlStore() {
  if (db_) sqlite3_close(db_);
}

ResultTable SqlStore::execute(const SqlPlan& plan, std::size_t display_cap) const {
  if (!plan.validated) throw ExecutionError("refusing to execute an unvalidated statement");
  std::lock_guard lk(mu_);
  Stmt st;
  const char* tail = nullptr;
  if (sqlite3_prepare_v2(db_, plan.statement.c_str(), -1, &st.h, &tail) != SQLITE_OK) {
    throw ExecutionError(std::string("sqlite: ") + sqlite3_errmsg(db_));
  }
  if (!st.h) throw ExecutionError("statement is empty");
  if (tail && !text::trim(tail).empty()) throw ExecutionError("trailing text after statement");
  if (!sqlite3_stmt_readonly(st.h)) throw ExecutionError("statement is not read-only");

  ResultTable t;
  const int ncol = sqlite3_column_count(st.h);
  for (int c = 0; c < ncol; ++c) t.columns.emplace_back(sqlite3_column_name(st.h, c));
  while (true) {
    const int rc = sqlite3_step(st.h);
    if (rc == SQLITE_DONE) break;
    if (rc != SQLITE_ROW) throw ExecutionError(std::string("sqlite: ") + sqlite3_errmsg(db_));
    ++t.total_row_count;
    if (t.rows.size() >= display_cap) continue;
    auto& row = t.rows.emplace_back();
    for (int c = 0; c < ncol; ++c) {
      switch (sqlite3_column_type(st.h, c)) {
        case SQLITE_INTEGER: row.emplace_back(static_cast<std::int64_t>(sqlite3_column_int64(st.h, c))); break;
        case SQLITE_FLOAT: row.emplace_back(sqlite3_column_double(st.h, c)); break;
        case SQLITE_NULL: row.emplace_back(std::monostate{}); break;
        default: {
          const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(st.h, c));
          row.emplace_back(std::string(p ? p : ""));
        }
      }
    }
  }
  t.truncated = t.total_row_count > t.rows.size();
  return t;
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("checksum", "cannot open " + path.string());
  std::uint64_t h = 1469598103934665603ULL;
  char buf[8192];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

// ---- team ----

SqlTeam::SqlTeam(ModelGateway& gateway, const SystemConfig& config, const SqlStore& store, TableSchema schema)
    : gateway_(gateway), config_(config), store_(store), schema_(std::move(schema)) {}

SqlPlan SqlTeam::generate_sql(const UserQuery& query, Trace& trace, const std::string& parent) const {
  ScopedSpan span(trace, "generate_sql", parent);
  const auto prompt =
      text::render(config_.prompts.sql_generate, {{"question", query.text}, {"schema", schema_.render_create()}});
  try {
    const auto resp = gateway_.complete(make_request("generate_sql", config_.prompts.system, prompt,
                                                     config_.model_name, config_.temperature, config_.max_tokens));
    span.payload()["model_output"] = resp.raw_text;
    auto sql = extract_code_block(resp.clean_text, "sql");
    span.payload()["sql"] = sql;
    return SqlPlan{std::move(sql), false};
  } catch (const Error& e) {
    span.fail(e.what());
    throw;
  }
}

namespace {

AgentAnswer failure(std::string_view stage, const std::string& detail, std::string_view lead) {
  AgentAnswer a;
  a.route = RouteLabel::Sql;
  a.body = std::string(lead) + " (" + std::string(stage) + " failed: " + detail + ")";
  a.error = AnswerError{std::string(stage), detail};
  return a;
}

}  // namespace

AgentAnswer SqlTeam::run(const UserQuery& query, Trace& trace, const std::string& parent) const {
  SqlPlan plan;
  try {
    plan = generate_sql(query, trace, parent);
  } catch (const ExtractionError& e) {
    return failure("generate_sql", e.what(), "Sorry, I could not generate a database query for that question.");
  } catch (const Error& e) {
    return failure("generate_sql", e.what(), "Sorry, I could not reach the language model to query your records.");
  }

  {
    ScopedSpan span(trace, "validate_sql", parent);
    try {
      plan = validate_sql(plan.statement);
    } catch (const SqlValidationError& e) {
      span.fail(e.what());
      span.payload()["rule"] = e.rule();
      return failure("validate_sql", e.what(), "Sorry, the generated query was rejected by the safety check.");
    }
  }

  ResultTable table;
  {
    ScopedSpan span(trace, "execute_query", parent);
    span.payload()["sql"] = plan.statement;
    try {
      table = store_.execute(plan, config_.row_display_cap);
      span.payload()["total_row_count"] = table.total_row_count;
    } catch (const Error& e) {
      span.fail(e.what());
      return failure("execute_query", e.what(), "Sorry, the query against your farm records failed.");
    }
  }

  AgentAnswer answer;
  answer.route = RouteLabel::Sql;
  const auto rendered = table.render_text();
  {
    ScopedSpan span(trace, "phrase_result", parent);
    try {
      const auto prompt = text::render(config_.prompts.sql_phrase,
                                       {{"question", query.text}, {"code", plan.statement}, {"result", rendered}});
      answer.body = gateway_
                        .complete(make_request("phrase_result", config_.prompts.system, prompt, config_.model_name,
                                               config_.temperature, config_.max_tokens))
                        .clean_text;
    } catch (const Error& e) {
      span.fail(e.what());  // fall back to the raw table
    }
  }
  answer.body += (answer.body.empty() ? "" : "\n\n") + std::string("Results:\n") + rendered;
  Attachment att;
  att.id = "table-1";
  att.kind = Attachment::Kind::Table;
  att.payload = table;
  answer.attachments.push_back(std::move(att));
  return answer;
}

}  // namespace dairy
