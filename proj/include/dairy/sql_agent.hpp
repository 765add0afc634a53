#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "dairy/config.hpp"
#include "dairy/core.hpp"
#include "dairy/gateway.hpp"

struct sqlite3;

namespace dairy {

struct ColumnSpec {
  enum class Type { Text, Date, Integer, Real };
  std::string name;
  Type type = Type::Text;
  std::string unit;
};

struct TableSchema {
  std::string table = "milk_data_table";
  std::vector<ColumnSpec> columns;

  // The test-day production table.
  static TableSchema milk_records();
  std::string render_create() const;  // CREATE TABLE text with unit comments
  const ColumnSpec* find(std::string_view name) const;
};

struct SqlPlan {
  std::string statement;
  bool validated = false;
};

class SqlValidationError : public Error {
 public:
  SqlValidationError(std::string rule, const std::string& what)
      : Error("validate_sql", what), rule_(std::move(rule)) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

// Read-only gate: one statement, first keyword SELECT/WITH, no DDL/DML keyword outside string
// literals, nothing after a terminating semicolon. Comments are stripped first.
SqlPlan validate_sql(std::string_view statement);

struct CsvIngestReport {
  std::size_t loaded = 0;
  std::size_t rejected = 0;
  std::vector<std::string> warnings;
};

// Builds a fresh store at `db_path` from a CSV whose header holds the schema column names in any
// order. Rows with unparseable cells are rejected; a missing column aborts.
CsvIngestReport ingest_csv(const std::filesystem::path& csv_path, const std::filesystem::path& db_path,
                           const TableSchema& schema = TableSchema::milk_records());

class ExecutionError : public Error {
 public:
  explicit ExecutionError(const std::string& what) : Error("execute_query", what) {}
};

// Read-only handle on the embedded relational store.
class SqlStore {
 public:
  explicit SqlStore(const std::filesystem::path& db_path);
  ~SqlStore();
  SqlStore(const SqlStore&) = delete;
  SqlStore& operator=(const SqlStore&) = delete;

  ResultTable execute(const SqlPlan& plan, std::size_t display_cap) const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  sqlite3* db_ = nullptr;
  mutable std::mutex mu_;
};

// Content hash of a file, hex encoded.
std::string file_checksum(const std::filesystem::path& path);

class SqlTeam {
 public:
  SqlTeam(ModelGateway& gateway, const SystemConfig& config, const SqlStore& store,
          TableSchema schema = TableSchema::milk_records());

  // Throws ExtractionError (model output kept on the exception) when no SQL is found.
  SqlPlan generate_sql(const UserQuery& query, Trace& trace, const std::string& parent) const;

  // generate_sql, validate_sql, execute_query, phrase_result.
  AgentAnswer run(const UserQuery& query, Trace& trace, const std::string& parent) const;

 private:
  ModelGateway& gateway_;
  const SystemConfig& config_;
  const SqlStore& store_;
  TableSchema schema_;
};

}  // namespace dairy
