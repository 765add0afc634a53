#include "dairy/docstore.hpp"

#include <fstream>
#include <sstream>

#include "dairy/text.hpp"

namespace dairy {

namespace {

std::string req_string(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_string()) throw ValidationError(where + ": missing string field " + key);
  return j[key].get<std::string>();
}

template <typename T>
std::optional<T> opt(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  const auto& v = j[key];
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ValidationError(where + ": " + key + " must be a string");
  } else if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw ValidationError(where + ": " + key + " must be a number");
  } else {
    if (!v.is_number_integer()) throw ValidationError(where + ": " + key + " must be an integer");
  }
  return v.get<T>();
}

template <typename T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
Cell cell(const std::optional<T>& v) {
  if (!v) return std::monostate{};
  return *v;
}

}  // namespace

HerdDocument HerdDocument::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("document is not an object");
  HerdDocument d;
  d.animal_id = req_string(j, "animal_id", "document");
  const std::string where = "document " + d.animal_id;
  d.herd_id = req_string(j, "herd_id", where);
  d.birth_date = opt<std::string>(j, "birth_date", where).value_or("");
  if (!j.contains("lactations") || !j["lactations"].is_array()) {
    throw ValidationError(where + ": missing lactations array");
  }
  for (const auto& lj : j["lactations"]) {
    if (!lj.is_object()) throw ValidationError(where + ": lactation is not an object");
    Lactation l;
    if (!lj.contains("parity") || !lj["parity"].is_number_integer()) {
      throw ValidationError(where + ": lactation parity must be an integer");
    }
    l.parity = lj["parity"].get<std::int64_t>();
    if (l.parity < 1) throw ValidationError(where + ": parity must be at least 1");
    l.calving_date = opt<std::string>(lj, "calving_date", where).value_or("");
    if (!lj.contains("events") || !lj["events"].is_array()) {
      throw ValidationError(where + ": lactation " + std::to_string(l.parity) + " has no events array");
    }
    for (const auto& ej : lj["events"]) {
      if (!ej.is_object()) throw ValidationError(where + ": event is not an object");
      EventRecord e;
      e.event_type = req_string(ej, "event_type", where);
      e.test_date = req_string(ej, "test_date", where);
      e.days_in_milk = opt<std::int64_t>(ej, "days_in_milk", where);
      e.milk_yield_kg = opt<double>(ej, "MilkYieldKg", where);
      e.fat_pct = opt<double>(ej, "FatPct", where);
      e.protein_pct = opt<double>(ej, "ProteinPct", where);
      e.lactose_pct = opt<double>(ej, "LactosePct", where);
      e.somatic_cell_count = opt<std::int64_t>(ej, "SomaticCellCount", where);
      e.insemination_number = opt<std::int64_t>(ej, "InseminationNumber", where);
      e.breeding_type = opt<std::string>(ej, "BreedingType", where);
      e.pregnancy_result_code = opt<std::string>(ej, "PregnancyResultCode", where);
      e.calving_ease = opt<std::int64_t>(ej, "CalvingEase", where);
      l.events.push_back(std::move(e));
    }
    d.lactations.push_back(std::move(l));
  }
  return d;
}

json HerdDocument::to_json() const {
  json j{{"animal_id", animal_id}, {"herd_id", herd_id}, {"birth_date", birth_date}};
  j["lactations"] = json::array();
  for (const auto& l : lactations) {
    json lj{{"parity", l.parity}, {"calving_date", l.calving_date}, {"events", json::array()}};
    for (const auto& e : l.events) {
      json ej{{"event_type", e.event_type}, {"test_date", e.test_date}};
      put(ej, "days_in_milk", e.days_in_milk);
      put(ej, "MilkYieldKg", e.milk_yield_kg);
      put(ej, "FatPct", e.fat_pct);
      put(ej, "ProteinPct", e.protein_pct);
      put(ej, "LactosePct", e.lactose_pct);
      put(ej, "SomaticCellCount", e.somatic_cell_count);
      put(ej, "InseminationNumber", e.insemination_number);
      put(ej, "BreedingType", e.breeding_type);
      put(ej, "PregnancyResultCode", e.pregnancy_result_code);
      put(ej, "CalvingEase", e.calving_ease);
      lj["events"].push_back(std::move(ej));
    }
    j["lactations"].push_back(std::move(lj));
  }
  return j;
}

const std::vector<dsl::Column>& event_row_columns() {
  using dsl::ColType;
  static const std::vector<dsl::Column> cols = {
      {"AnimalId", ColType::Text},          {"HerdId", ColType::Text},
      {"Parity", ColType::Integer},         {"EventType", ColType::Text},
      {"TestDate", ColType::Text},          {"CalvingDate", ColType::Text},
      {"BirthDate", ColType::Text},         {"DIM", ColType::Integer},
      {"MilkYieldKg", ColType::Real},       {"FatPct", ColType::Real},
      {"ProteinPct", ColType::Real},        {"LactosePct", ColType::Real},
      {"SCC", ColType::Integer},            {"InseminationNumber", ColType::Integer},
      {"BreedingType", ColType::Text},      {"PregnancyResultCode", ColType::Text},
      {"CalvingEase", ColType::Integer},
  };
  return cols;
}

void append_rows(const HerdDocument& doc, dsl::DataFrame& df) {
  auto text_or_null = [](const std::string& s) -> Cell {
    if (s.empty()) return std::monostate{};
    return s;
  };
  for (const auto& l : doc.lactations) {
    for (const auto& e : l.events) {
      df.rows.push_back({doc.animal_id, doc.herd_id, l.parity, e.event_type, e.test_date,
                         text_or_null(l.calving_date), text_or_null(doc.birth_date), cell(e.days_in_milk),
                         cell(e.milk_yield_kg), cell(e.fat_pct), cell(e.protein_pct), cell(e.lactose_pct),
                         cell(e.somatic_cell_count), cell(e.insemination_number), cell(e.breeding_type),
                         cell(e.pregnancy_result_code), cell(e.calving_ease)});
    }
  }
}

DocumentStore DocumentStore::from_text(std::string_view data) {
  DocumentStore s;
  s.table_.columns = event_row_columns();
  std::vector<json> docs;
  const auto trimmed = text::trim(data);
  if (!trimmed.empty() && trimmed.front() == '[') {
    json arr;
    try {
      arr = json::parse(trimmed);
    } catch (const json::exception& e) {
      throw IngestionError("ingest_documents", std::string("document array is not valid JSON: ") + e.what());
    }
    for (auto& d : arr) docs.push_back(std::move(d));
  } else {
    std::size_t line_no = 0;
    for (const auto& line : text::split(trimmed, '\n')) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      try {
        docs.push_back(json::parse(line));
      } catch (const json::exception&) {
        ++s.report_.skipped;
        s.report_.warnings.push_back("line " + std::to_string(line_no) + ": not valid JSON");
      }
    }
  }
  for (std::size_t i = 0; i < docs.size(); ++i) {
    try {
      const auto doc = HerdDocument::from_json(docs[i]);
      append_rows(doc, s.table_);
      ++s.report_.documents;
    } catch (const ValidationError& e) {
      ++s.report_.skipped;
      s.report_.warnings.push_back("document " + std::to_string(i + 1) + " skipped: " + e.what());
    }
  }
  if (s.report_.documents == 0) throw IngestionError("ingest_documents", "no valid herd documents found");
  s.report_.rows = s.table_.rows.size();
  return s;
}

DocumentStore DocumentStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("ingest_documents", "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return from_text(os.str());
}

// ---- team ----

NoSqlTeam::NoSqlTeam(ModelGateway& gateway, const SystemConfig& config, const DocumentStore& store)
    : gateway_(gateway), config_(config), store_(store) {}

namespace {

AgentAnswer failure(std::string_view stage, const std::string& detail, std::string_view lead) {
  AgentAnswer a;
  a.route = RouteLabel::NoSql;
  a.body = std::string(lead) + " (" + std::string(stage) + " failed: " + detail + ")";
  a.error = AnswerError{std::string(stage), detail};
  return a;
}

std::string column_list(const dsl::DataFrame& df) {
  std::string out;
  for (const auto& c : df.columns) out += (out.empty() ? "" : ", ") + c.name;
  return out;
}

}  // namespace

AgentAnswer NoSqlTeam::run(const UserQuery& query, Trace& trace, const std::string& parent) const {
  const auto& df = store_.table();
  const auto names = df.names();
  const auto columns = column_list(df);

  std::optional<dsl::Program> program;
  std::string source;
  std::string last_error;
  for (int attempt = 0; attempt < 2 && !program; ++attempt) {
    ScopedSpan span(trace, "generate_dsl_code", parent);
    span.payload()["attempt"] = attempt + 1;
    const bool repair = attempt > 0;
    const auto prompt = repair ? text::render(config_.prompts.nosql_repair, {{"question", query.text},
                                                                             {"code", source},
                                                                             {"error", last_error},
                                                                             {"columns", columns}})
                               : text::render(config_.prompts.nosql_generate,
                                              {{"question", query.text}, {"columns", columns}});
    try {
      const auto resp = gateway_.complete(make_request(repair ? "repair_dsl_code" : "generate_dsl_code",
                                                       config_.prompts.system, prompt, config_.model_name,
                                                       config_.temperature, config_.max_tokens));
      span.payload()["model_output"] = resp.raw_text;
      try {
        source = extract_code_block(resp.clean_text, "dsl");
      } catch (const ExtractionError& e) {
        source = resp.clean_text;
        throw;
      }
      span.payload()["code"] = source;
      program = dsl::parse(source, names);
    } catch (const GatewayError& e) {
      span.fail(e.what());
      return failure("generate_dsl_code", e.what(), "Sorry, I could not reach the language model to query your herd data.");
    } catch (const Error& e) {
      span.fail(e.what());
      last_error = e.what();
    }
  }
  if (!program) {
    return failure("generate_dsl_code", last_error + "; source: " + source,
                   "Sorry, I could not produce a valid data query for that question.");
  }

  ResultTable table;
  {
    ScopedSpan span(trace, "execute_dsl_code", parent);
    span.payload()["code"] = dsl::to_source(*program);
    try {
      table = dsl::to_result_table(dsl::evaluate(*program, df), config_.row_display_cap);
      span.payload()["total_row_count"] = table.total_row_count;
    } catch (const Error& e) {
      span.fail(e.what());
      return failure("execute_dsl_code", e.what(), "Sorry, running the data query on your herd records failed.");
    }
  }

  AgentAnswer answer;
  answer.route = RouteLabel::NoSql;
  const auto rendered = table.render_text();
  {
    ScopedSpan span(trace, "phrase_result", parent);
    try {
      const auto prompt = text::render(config_.prompts.nosql_phrase,
                                       {{"question", query.text}, {"code", source}, {"result", rendered}});
      answer.body = gateway_
                        .complete(make_request("phrase_result", config_.prompts.system, prompt, config_.model_name,
                                               config_.temperature, config_.max_tokens))
                        .clean_text;
    } catch (const Error& e) {
      span.fail(e.what());
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
