#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dairy/docstore.hpp"
#include "dairy/knowledge.hpp"

// Seeded synthetic stand-ins for farm data and the abstract corpus. Every generator is a pure
// function of its parameters: same parameters, same bytes, on any platform.
namespace dairy::fixtures {

// mt19937_64 output is fixed by the standard; the distributions here are built on its raw
// bits so that results do not depend on the standard library's distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::int64_t range(std::int64_t lo, std::int64_t hi);  // inclusive
  double normal(double mean, double sd);
  bool chance(double p) { return uniform() < p; }

 private:
  std::mt19937_64 g_;
};

std::string iso_date(std::int64_t days_since_epoch);  // 1970-01-01 is day 0
std::int64_t days_from_iso(const std::string& iso);

struct SqlFixtureSpec {
  std::uint64_t seed = 20240601;
  std::size_t rows = 200;
  std::size_t animals = 60;
  std::size_t herds = 4;
  double threshold_kg = 43.0;
  std::size_t rows_above_threshold = 49;  // clamped to rows
  std::vector<double> yield_mean_by_parity{30.0, 34.0, 36.0, 36.5, 35.0, 34.0, 33.0};
  double yield_sd = 5.0;
};

// CSV with the milk_records schema header.
std::string generate_sql_fixture(const SqlFixtureSpec& spec = {});

// The 14 event types of the document store, in display order.
const std::vector<std::string>& event_types();

struct NoSqlFixtureSpec {
  std::uint64_t seed = 20240602;
  std::size_t cows = 30;
  std::size_t events_per_cow = 10;
  std::size_t herds = 3;
  std::int64_t max_parity = 5;
};

std::vector<HerdDocument> generate_herd_documents(const NoSqlFixtureSpec& spec = {});
std::string generate_nosql_fixture(const NoSqlFixtureSpec& spec = {});  // JSON array

struct CorpusFixtureSpec {
  std::uint64_t seed = 20240603;
  std::size_t docs = 50;  // at least the handwritten topic stubs
};

std::vector<AbstractDoc> generate_corpus(const CorpusFixtureSpec& spec = {});
std::string generate_corpus_fixture(const CorpusFixtureSpec& spec = {});  // JSON lines

// Canned web results for the offline search provider.
std::string web_fixture();

}  // namespace dairy::fixtures
