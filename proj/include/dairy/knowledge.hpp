#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dairy/config.hpp"
#include "dairy/core.hpp"
#include "dairy/gateway.hpp"

namespace dairy {

struct AbstractDoc {
  std::string doc_id;
  std::string title;
  std::string abstract_text;
  int year = 0;
  std::string doi;
  std::vector<std::string> authors;
  std::string source_tag = "JDS";
};

using EmbeddingVector = std::vector<double>;

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual EmbeddingVector embed(std::string_view text) = 0;
  virtual std::size_t dim() const = 0;
};

// Offline embedder: lowercase alphanumeric tokens hashed (FNV-1a) into signed buckets, then
// L2-normalised. Blank text maps to the zero vector.
class HashingEmbedder final : public Embedder {
 public:
  explicit HashingEmbedder(std::size_t dim = 256) : dim_(dim) {}
  EmbeddingVector embed(std::string_view text) override;
  std::size_t dim() const override { return dim_; }

 private:
  std::size_t dim_;
};

// POST {model, input} to an embeddings endpoint, read data[0].embedding.
class RemoteEmbedder final : public Embedder {
 public:
  RemoteEmbedder(std::string base_url, std::string model, std::string path = "/v1/embeddings");
  EmbeddingVector embed(std::string_view text) override;
  std::size_t dim() const override { return dim_; }

 private:
  std::string base_url_;
  std::string model_;
  std::string path_;
  std::size_t dim_ = 0;
};

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

struct RetrievalHit {
  std::string doc_id;
  double score = 0.0;
  std::size_t rank = 0;
};

struct CorpusSummary {
  std::size_t count = 0;
  std::size_t rejected = 0;
  std::size_t dim = 0;
  std::vector<std::string> warnings;
};

class RetrievalError : public Error {
 public:
  explicit RetrievalError(const std::string& what) : Error("jds_retrieve", what) {}
};

// One chunk per abstract. Immutable after ingestion.
class LiteratureIndex {
 public:
  explicit LiteratureIndex(std::shared_ptr<Embedder> embedder);

  // JSON-lines {id, title, abstract, year, doi, authors[], source}; bad lines are skipped.
  CorpusSummary ingest(const std::filesystem::path& path);
  CorpusSummary ingest_lines(std::string_view jsonl);

  std::vector<RetrievalHit> retrieve_topk(std::string_view query, std::size_t k) const;

  const AbstractDoc& doc(const std::string& doc_id) const;
  const std::vector<AbstractDoc>& docs() const { return docs_; }
  const std::vector<EmbeddingVector>& vectors() const { return vectors_; }
  std::size_t size() const { return docs_.size(); }
  Embedder& embedder() const { return *embedder_; }

 private:
  std::shared_ptr<Embedder> embedder_;
  std::vector<AbstractDoc> docs_;
  std::vector<EmbeddingVector> vectors_;
};

std::string embedding_text(const AbstractDoc& d);

struct WebResult {
  std::string title;
  std::string url;
  std::string snippet;
};

class SearchError : public Error {
 public:
  explicit SearchError(const std::string& what) : Error("web_search", what) {}
};

class WebSearchProvider {
 public:
  static constexpr std::size_t kMaxResults = 10;
  virtual ~WebSearchProvider() = default;
  virtual std::vector<WebResult> search(std::string_view query) = 0;
};

// Canned results: JSON array of {match, results[{title, url, snippet}]}. An entry applies when
// its `match` occurs in the query (case-insensitive); results concatenate in file order.
class FixtureWebProvider final : public WebSearchProvider {
 public:
  explicit FixtureWebProvider(const std::filesystem::path& path);
  explicit FixtureWebProvider(const json& entries);
  std::vector<WebResult> search(std::string_view query) override;

 private:
  struct Entry {
    std::string match;
    std::vector<WebResult> results;
  };
  std::vector<Entry> entries_;
};

// GET on a URL template ("{query}" is URL-encoded) returning {"results": [{title, url, snippet}]}.
class HttpWebProvider final : public WebSearchProvider {
 public:
  explicit HttpWebProvider(std::string url_template, double timeout_s = 30.0);
  std::vector<WebResult> search(std::string_view query) override;

 private:
  std::string url_template_;
  double timeout_s_;
};

std::string url_encode(std::string_view s);

struct Grade {
  enum class Verdict { Adequate, Inadequate };
  Verdict verdict = Verdict::Inadequate;
  std::string raw_model_output;

  bool adequate() const { return verdict == Verdict::Adequate; }
};

// "yes" (first word, any case, trailing punctuation ignored) is adequate; anything else is not.
Grade parse_grade(std::string_view model_output);

// The text subagent: literature RAG, graded, with web search as fallback.
class TextTeam {
 public:
  TextTeam(ModelGateway& gateway, const SystemConfig& config, const LiteratureIndex& index,
           WebSearchProvider& web);

  std::pair<AgentAnswer, Grade> answer_from_docs(const UserQuery& query, const std::vector<RetrievalHit>& hits,
                                                 Trace& trace, const std::string& parent) const;
  std::pair<AgentAnswer, Grade> answer_from_web(const UserQuery& query, const std::vector<WebResult>& results,
                                                Trace& trace, const std::string& parent) const;
  std::vector<WebResult> web_search(std::string_view query) const { return web_.search(query); }

  // Spans under `parent`: jds_retrieve, generate_jds_answer, grade_jds_answer, and on an
  // inadequate grade web_search, generate_web_answer, grade_web_answer.
  AgentAnswer run(const UserQuery& query, Trace& trace, const std::string& parent) const;

 private:
  Grade grade(const UserQuery& query, const std::string& answer, std::string_view source, std::string_view span,
              Trace& trace, const std::string& parent) const;

  ModelGateway& gateway_;
  const SystemConfig& config_;
  const LiteratureIndex& index_;
  WebSearchProvider& web_;
};

}  // namespace dairy
