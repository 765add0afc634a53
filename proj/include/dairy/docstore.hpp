#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dairy/config.hpp"
#include "dairy/core.hpp"
#include "dairy/dsl.hpp"
#include "dairy/gateway.hpp"

namespace dairy {

struct EventRecord {
  std::string event_type;
  std::string test_date;
  std::optional<std::int64_t> days_in_milk;
  std::optional<double> milk_yield_kg;
  std::optional<double> fat_pct;
  std::optional<double> protein_pct;
  std::optional<double> lactose_pct;
  std::optional<std::int64_t> somatic_cell_count;
  std::optional<std::int64_t> insemination_number;
  std::optional<std::string> breeding_type;
  std::optional<std::string> pregnancy_result_code;
  std::optional<std::int64_t> calving_ease;
};

struct Lactation {
  std::int64_t parity = 1;
  std::string calving_date;
  std::vector<EventRecord> events;
};

struct HerdDocument {
  std::string animal_id;
  std::string herd_id;
  std::string birth_date;
  std::vector<Lactation> lactations;

  // Throws ValidationError on a missing or ill-typed field.
  static HerdDocument from_json(const json& j);
  json to_json() const;
};

// Column layout of the flattened event table.
const std::vector<dsl::Column>& event_row_columns();

// One row per event, parentage copied from the enclosing document and lactation.
void append_rows(const HerdDocument& doc, dsl::DataFrame& df);

struct DocumentIngestReport {
  std::size_t documents = 0;
  std::size_t rows = 0;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

// Immutable after construction; safe for concurrent reads.
class DocumentStore {
 public:
  // JSON array or JSON lines. Malformed documents are skipped; zero documents is an
  // IngestionError.
  static DocumentStore load(const std::filesystem::path& path);
  static DocumentStore from_text(std::string_view data);

  const dsl::DataFrame& table() const { return table_; }
  const DocumentIngestReport& report() const { return report_; }

 private:
  dsl::DataFrame table_;
  DocumentIngestReport report_;
};

class NoSqlTeam {
 public:
  NoSqlTeam(ModelGateway& gateway, const SystemConfig& config, const DocumentStore& store);

  // generate_dsl_code (+ one repair on a parse failure), execute_dsl_code, phrase_result.
  AgentAnswer run(const UserQuery& query, Trace& trace, const std::string& parent) const;

 private:
  ModelGateway& gateway_;
  const SystemConfig& config_;
  const DocumentStore& store_;
};

}  // namespace dairy
