#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <fstream>
#include <sstream>

#include "dairy/fixtures.hpp"
#include "dairy/sql_agent.hpp"
#include "dairy/text.hpp"
#include "support/helpers.hpp"
#include "support/sql_corpus.hpp"

using namespace dairy;

namespace {

// Plain line split of the fixture CSV; the fixture never quotes fields.
std::vector<std::map<std::string, std::string>> read_rows(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) header.push_back(f);
  }
  std::vector<std::map<std::string, std::string>> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f;
    std::map<std::string, std::string> row;
    for (const auto& h : header) {
      std::getline(ss, f, ',');
      row[h] = f;
    }
    out.push_back(row);
  }
  return out;
}

struct SqlFixture {
  support::TempDir tmp;
  SystemConfig cfg = support::fixture_config(tmp.path());
  SqlFixture() { ingest_csv(cfg.sql_csv, cfg.sql_store); }
};

std::vector<std::string> names(const Trace& tr) {
  std::vector<std::string> out;
  for (const auto& s : tr.spans()) out.push_back(s.name);
  return out;
}

AgentAnswer run_team(SqlFixture& f, const std::vector<MockEntry>& entries, const std::string& question, Trace& tr) {
  MockScript s;
  s.entries = entries;
  ModelGateway gw(std::make_shared<MockChatBackend>(s));
  SqlStore store(f.cfg.sql_store);
  SqlTeam team(gw, f.cfg, store);
  const auto root = tr.begin("supervisor");
  auto a = team.run(UserQuery::make(question, "s"), tr, root);
  tr.end(root);
  return a;
}

}  // namespace

TEST(SqlValidatorTest, Examples) {
  EXPECT_TRUE(validate_sql("SELECT 1").validated);
  EXPECT_NO_THROW(validate_sql("  select * from milk_data_table;  "));
  EXPECT_NO_THROW(validate_sql("WITH a AS (SELECT 1) SELECT * FROM a"));
  EXPECT_NO_THROW(validate_sql("SELECT 'DROP TABLE x' AS s"));
  try {
    validate_sql("DROP TABLE milk_data_table");
    FAIL();
  } catch (const SqlValidationError& e) {
    EXPECT_EQ(e.stage(), "validate_sql");
    EXPECT_EQ(e.rule(), "read-only");
  }
  try {
    validate_sql("SELECT 1; DELETE FROM milk_data_table");
    FAIL();
  } catch (const SqlValidationError& e) {
    EXPECT_EQ(e.rule(), "single-statement");
  }
  EXPECT_THROW(validate_sql("SELECT * FROM t WHERE x IN (SELECT 1) UNION SELECT 1 FROM (ATTACH 'x' AS y)"),
               SqlValidationError);
}

TEST(SqlValidatorTest, AdversarialCorpusAllRejected) {
  std::size_t accepted = 0;
  for (auto stmt : support::kAdversarialSql) {
    try {
      validate_sql(stmt);
      ++accepted;
      ADD_FAILURE() << "accepted: " << stmt;
    } catch (const SqlValidationError&) {
    }
  }
  EXPECT_EQ(accepted, 0u);
}

TEST(SqlValidatorTest, BenignCorpusAllAcceptedAndExecutable) {
  SqlFixture f;
  SqlStore store(f.cfg.sql_store);
  std::size_t accepted = 0;
  for (auto stmt : support::kBenignSql) {
    try {
      const auto plan = validate_sql(stmt);
      store.execute(plan, 20);
      ++accepted;
    } catch (const Error& e) {
      ADD_FAILURE() << stmt << ": " << e.what();
    }
  }
  EXPECT_EQ(accepted, 20u);
}

TEST(SqlIngestTest, FixtureLoadsAllRows) {
  SqlFixture f;
  SqlStore store(f.cfg.sql_store);
  const auto t = store.execute(validate_sql("SELECT COUNT(*) FROM milk_data_table"), 20);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(std::get<std::int64_t>(t.rows[0][0]), 200);
}

TEST(SqlIngestTest, MissingColumnAborts) {
  support::TempDir tmp;
  auto csv = fixtures::generate_sql_fixture();
  const auto eol = csv.find('\n');
  auto header = csv.substr(0, eol);
  header.replace(header.find("SomaticCellCount"), std::string("SomaticCellCount").size(), "Scc");
  support::write_file(tmp / "bad.csv", header + csv.substr(eol));
  try {
    ingest_csv(tmp / "bad.csv", tmp / "db.sqlite");
    FAIL();
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find("SomaticCellCount"), std::string::npos);
  }
}

TEST(SqlIngestTest, BadCellRejectsRowOnly) {
  support::TempDir tmp;
  auto lines = text::split(fixtures::generate_sql_fixture(), '\n');
  // replace the MilkYieldKg field of the first data row
  auto fields = text::split(lines[1], ',');
  const auto header = text::split(lines[0], ',');
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "MilkYieldKg") fields[i] = "lots";
  }
  std::string row;
  for (std::size_t i = 0; i < fields.size(); ++i) row += (i ? "," : "") + fields[i];
  lines[1] = row;
  std::string csv;
  for (const auto& l : lines) {
    if (!l.empty()) csv += l + "\n";
  }
  support::write_file(tmp / "bad.csv", csv);
  const auto r = ingest_csv(tmp / "bad.csv", tmp / "db.sqlite");
  EXPECT_EQ(r.loaded, 199u);
  EXPECT_EQ(r.rejected, 1u);
  ASSERT_FALSE(r.warnings.empty());
}

TEST(SqlStoreTest, TruncatesToDisplayCap) {
  SqlFixture f;
  SqlStore store(f.cfg.sql_store);
  const auto t = store.execute(
      validate_sql("SELECT AnimalIdentifier, MilkYieldKg FROM milk_data_table WHERE MilkYieldKg > 43"), 20);
  EXPECT_EQ(t.total_row_count, 49u);
  EXPECT_EQ(t.rows.size(), 20u);
  EXPECT_TRUE(t.truncated);
  EXPECT_NE(t.render_text().find("Showing the first 20 of 49 total records."), std::string::npos);
}

TEST(SqlStoreTest, BadColumnIsExecutionError) {
  SqlFixture f;
  SqlStore store(f.cfg.sql_store);
  try {
    store.execute(validate_sql("SELECT NoSuchColumn FROM milk_data_table"), 20);
    FAIL();
  } catch (const ExecutionError& e) {
    EXPECT_EQ(e.stage(), "execute_query");
  }
  EXPECT_THROW(store.execute(SqlPlan{"SELECT 1", false}, 20), Error);
}

TEST(SqlStoreTest, ReadOnlyEvenWhenGateBypassed) {
  SqlFixture f;
  const auto before = file_checksum(f.cfg.sql_store);
  {
    SqlStore store(f.cfg.sql_store);
    EXPECT_THROW(store.execute(SqlPlan{"DELETE FROM milk_data_table", true}, 20), Error);
  }
  EXPECT_EQ(file_checksum(f.cfg.sql_store), before);
}

TEST(SqlTeamTest, CountMatchesBruteForce) {
  SqlFixture f;
  const auto rows = read_rows(f.cfg.sql_csv);
  long long want = 0;
  for (const auto& r : rows) want += std::stoll(r.at("LactationNumber")) > 5;
  Trace tr;
  const auto a = run_team(f,
                          {{"lactation", "generate_sql",
                            "```sql\nSELECT COUNT(*) AS n FROM milk_data_table WHERE LactationNumber > 5\n```", ""},
                           {"lactation", "phrase_result", "Here is the count of animals past their fifth lactation.", ""}},
                          "How many animals are in lactation greater than 5", tr);
  ASSERT_FALSE(a.error.has_value());
  EXPECT_EQ(names(tr), (std::vector<std::string>{"supervisor", "generate_sql", "validate_sql", "execute_query",
                                                 "phrase_result"}));
  const auto nums = text::numbers_in(a.body);
  EXPECT_NE(std::find(nums.begin(), nums.end(), static_cast<double>(want)), nums.end()) << a.body;
  ASSERT_EQ(a.attachments.size(), 1u);
  const auto t = a.attachments[0].payload.get<ResultTable>();
  EXPECT_EQ(std::get<std::int64_t>(t.rows[0][0]), want);
}

TEST(SqlTeamTest, MeanMatchesBruteForce) {
  SqlFixture f;
  double sum = 0;
  int n = 0;
  for (const auto& r : read_rows(f.cfg.sql_csv)) {
    if (r.at("HerdIdentifier") == "H02") {
      sum += std::stod(r.at("MilkYieldKg"));
      ++n;
    }
  }
  ASSERT_GT(n, 0);
  Trace tr;
  const auto a = run_team(
      f, {{"herd", "generate_sql", "SELECT AVG(MilkYieldKg) FROM milk_data_table WHERE HerdIdentifier = 'H02'", ""},
          {"herd", "phrase_result", "This is the average yield for that herd.", ""}},
      "Average milk yield for herd H02", tr);
  const auto t = a.attachments.at(0).payload.get<ResultTable>();
  EXPECT_NEAR(std::get<double>(t.rows[0][0]), sum / n, 1e-9);
}

TEST(SqlTeamTest, UnsafeStatementNeverExecutes) {
  SqlFixture f;
  const auto before = file_checksum(f.cfg.sql_store);
  Trace tr;
  const auto a = run_team(f, {{"delete", "generate_sql", "```sql\nDROP TABLE milk_data_table;\n```", ""}},
                          "Please delete all my records", tr);
  ASSERT_TRUE(a.error.has_value());
  EXPECT_EQ(a.error->stage, "validate_sql");
  EXPECT_FALSE(tr.contains("execute_query"));
  EXPECT_EQ(file_checksum(f.cfg.sql_store), before);
}

TEST(SqlTeamTest, ProseInsteadOfSqlFailsAtGeneration) {
  SqlFixture f;
  Trace tr;
  const auto a =
      run_team(f, {{"cows", "generate_sql", "I think you have around fifty cows producing well.", ""}}, "How many cows", tr);
  ASSERT_TRUE(a.error.has_value());
  EXPECT_EQ(a.error->stage, "generate_sql");
  EXPECT_FALSE(tr.contains("validate_sql"));
}

TEST(SqlTeamTest, PhraseFailureKeepsTable) {
  SqlFixture f;
  Trace tr;
  const auto a = run_team(f,
                          {{"cows", "generate_sql", "SELECT COUNT(*) FROM milk_data_table", ""},
                           {"cows", "phrase_result", "", "timeout"}},
                          "How many cows", tr);
  EXPECT_FALSE(a.error.has_value());
  EXPECT_NE(a.body.find("Results:"), std::string::npos);
  EXPECT_NE(a.body.find("200"), std::string::npos);
}

TEST(SchemaTest, CreateStatementListsEveryColumn) {
  const auto schema = TableSchema::milk_records();
  const auto ddl = schema.render_create();
  for (const auto& c : schema.columns) EXPECT_NE(ddl.find(c.name), std::string::npos) << c.name;
  EXPECT_NE(schema.find("MilkYieldKg"), nullptr);
  EXPECT_EQ(schema.find("milkyield"), nullptr);
}
