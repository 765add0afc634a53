#include "dairy/knowledge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <httplib.h>

#include "dairy/text.hpp"

namespace dairy {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto slash = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

EmbeddingVector HashingEmbedder::embed(std::string_view text) {
  EmbeddingVector v(dim_, 0.0);
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    const auto h = fnv1a(tok);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    v[h % dim_] += sign;
    tok.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) tok += static_cast<char>(std::tolower(c));
    else flush();
  }
  flush();
  double norm = 0;
  for (double x : v) norm += x * x;
  if (norm > 0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

RemoteEmbedder::RemoteEmbedder(std::string base_url, std::string model, std::string path)
    : base_url_(std::move(base_url)), model_(std::move(model)), path_(std::move(path)) {}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) {
  httplib::Client cli(base_url_);
  cli.set_read_timeout(std::chrono::seconds(60));
  const json body{{"model", model_}, {"input", std::string(text)}};
  auto res = cli.Post(path_, body.dump(), "application/json");
  if (!res) throw RetrievalError("embedding endpoint " + base_url_ + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw RetrievalError("embedding endpoint " + base_url_ + " returned HTTP " + std::to_string(res->status));
  }
  EmbeddingVector v;
  try {
    v = json::parse(res->body).at("data").at(0).at("embedding").get<EmbeddingVector>();
  } catch (const json::exception& e) {
    throw RetrievalError(std::string("unexpected embedding response: ") + e.what());
  }
  if (v.empty()) throw RetrievalError("embedding endpoint returned an empty vector");
  if (dim_ == 0) dim_ = v.size();
  if (v.size() != dim_) throw RetrievalError("embedding dimension changed between calls");
  return v;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  double dot = 0, na = 0, nb = 0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::string embedding_text(const AbstractDoc& d) { return d.title + "\n" + d.abstract_text; }

LiteratureIndex::LiteratureIndex(std::shared_ptr<Embedder> embedder) : embedder_(std::move(embedder)) {}

CorpusSummary LiteratureIndex::ingest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("ingest_abstracts", "cannot open corpus file " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return ingest_lines(os.str());
}

CorpusSummary LiteratureIndex::ingest_lines(std::string_view jsonl) {
  std::vector<AbstractDoc> docs;
  std::set<std::string> ids;
  CorpusSummary summary;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(jsonl, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    auto reject = [&](const std::string& why) {
      ++summary.rejected;
      summary.warnings.push_back("line " + std::to_string(line_no) + ": " + why);
    };
    try {
      const auto j = json::parse(line);
      AbstractDoc d;
      d.doc_id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
      d.title = j.at("title").get<std::string>();
      d.abstract_text = j.at("abstract").get<std::string>();
      d.year = j.value("year", 0);
      d.doi = j.value("doi", std::string());
      d.authors = j.value("authors", std::vector<std::string>{});
      d.source_tag = j.value("source", std::string("JDS"));
      if (text::trim(d.abstract_text).empty()) {
        reject("empty abstract");
        continue;
      }
      if (!ids.insert(d.doc_id).second) {
        reject("duplicate id " + d.doc_id);
        continue;
      }
      docs.push_back(std::move(d));
    } catch (const json::exception& e) {
      reject(e.what());
    }
  }
  if (docs.empty()) throw IngestionError("ingest_abstracts", "corpus has no valid records");
  std::vector<EmbeddingVector> vectors;
  vectors.reserve(docs.size());
  for (const auto& d : docs) vectors.push_back(embedder_->embed(embedding_text(d)));
  docs_ = std::move(docs);
  vectors_ = std::move(vectors);
  summary.count = docs_.size();
  summary.dim = embedder_->dim();
  return summary;
}

std::vector<RetrievalHit> LiteratureIndex::retrieve_topk(std::string_view query, std::size_t k) const {
  if (docs_.empty()) throw RetrievalError("literature corpus is empty");
  if (k == 0) throw RetrievalError("k must be at least 1");
  const auto q = embedder_->embed(query);
  std::vector<RetrievalHit> hits;
  hits.reserve(docs_.size());
  for (std::size_t i = 0; i < docs_.size(); ++i) hits.push_back({docs_[i].doc_id, cosine(q, vectors_[i]), 0});
  const std::size_t n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(),
                    [](const RetrievalHit& a, const RetrievalHit& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.doc_id < b.doc_id;
                    });
  hits.resize(n);
  for (std::size_t i = 0; i < n; ++i) hits[i].rank = i + 1;
  return hits;
}

const AbstractDoc& LiteratureIndex::doc(const std::string& doc_id) const {
  for (const auto& d : docs_) {
    if (d.doc_id == doc_id) return d;
  }
  throw RetrievalError("unknown document " + doc_id);
}

// ---- web search ----

namespace {

std::vector<WebResult> parse_results(const json& arr) {
  std::vector<WebResult> out;
  for (const auto& r : arr) {
    WebResult w;
    w.title = r.value("title", std::string());
    w.url = r.value("url", std::string());
    w.snippet = r.value("snippet", std::string());
    if (w.url.empty()) continue;
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

FixtureWebProvider::FixtureWebProvider(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open web fixture " + path.string());
  try {
    *this = FixtureWebProvider(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError("web fixture " + path.string() + " is not valid JSON: " + e.what());
  }
}

FixtureWebProvider::FixtureWebProvider(const json& entries) {
  if (!entries.is_array()) throw ConfigError("web fixture must be a JSON array of {match, results}");
  for (const auto& e : entries) {
    entries_.push_back({e.at("match").get<std::string>(), parse_results(e.at("results"))});
  }
}

std::vector<WebResult> FixtureWebProvider::search(std::string_view query) {
  std::vector<WebResult> out;
  for (const auto& e : entries_) {
    if (!text::contains_icase(query, e.match)) continue;
    for (const auto& r : e.results) {
      if (out.size() == kMaxResults) return out;
      out.push_back(r);
    }
  }
  return out;
}

std::string url_encode(std::string_view s) {
  std::string out;
  static const char* kHex = "0123456789ABCDEF";
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

HttpWebProvider::HttpWebProvider(std::string url_template, double timeout_s)
    : url_template_(std::move(url_template)), timeout_s_(timeout_s) {}

std::vector<WebResult> HttpWebProvider::search(std::string_view query) {
  const auto url = text::render(url_template_, {{"query", url_encode(query)}});
  const auto [base, path] = split_url(url);
  httplib::Client cli(base);
  if (!cli.is_valid()) throw SearchError("invalid search provider address " + base);
  cli.set_read_timeout(std::chrono::milliseconds(static_cast<long>(timeout_s_ * 1000)));
  auto res = cli.Get(path);
  if (!res) throw SearchError("search provider " + base + " unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw SearchError("search provider returned HTTP " + std::to_string(res->status));
  try {
    const auto j = json::parse(res->body);
    auto results = parse_results(j.is_array() ? j : j.at("results"));
    if (results.size() > kMaxResults) results.resize(kMaxResults);
    return results;
  } catch (const json::exception& e) {
    throw SearchError(std::string("unexpected search response: ") + e.what());
  }
}

// ---- grading and the text team ----

Grade parse_grade(std::string_view model_output) {
  Grade g;
  g.raw_model_output = std::string(model_output);
  std::string word;
  for (char c : text::trim(model_output)) {
    if (!std::isalpha(static_cast<unsigned char>(c))) break;
    word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  g.verdict = word == "yes" ? Grade::Verdict::Adequate : Grade::Verdict::Inadequate;
  return g;
}

TextTeam::TextTeam(ModelGateway& gateway, const SystemConfig& config, const LiteratureIndex& index,
                   WebSearchProvider& web)
    : gateway_(gateway), config_(config), index_(index), web_(web) {}

Grade TextTeam::grade(const UserQuery& query, const std::string& answer, std::string_view source,
                      std::string_view span_name, Trace& trace, const std::string& parent) const {
  ScopedSpan span(trace, std::string(span_name), parent);
  const auto prompt = text::render(config_.prompts.text_grade,
                                   {{"question", query.text}, {"answer", answer}, {"source", std::string(source)}});
  try {
    const auto resp = gateway_.complete(make_request(std::string(span_name), config_.prompts.system, prompt,
                                                     config_.model_name, config_.temperature, config_.max_tokens));
    auto g = parse_grade(resp.clean_text);
    span.payload()["verdict"] = g.adequate() ? "adequate" : "inadequate";
    span.payload()["raw"] = g.raw_model_output;
    return g;
  } catch (const Error& e) {
    span.fail(e.what());
    Grade g;
    g.raw_model_output = e.what();
    return g;
  }
}

std::pair<AgentAnswer, Grade> TextTeam::answer_from_docs(const UserQuery& query, const std::vector<RetrievalHit>& hits,
                                                         Trace& trace, const std::string& parent) const {
  if (hits.empty()) throw RetrievalError("answer_from_docs needs at least one hit");
  AgentAnswer answer;
  answer.route = RouteLabel::Text;
  std::string context;
  for (const auto& h : hits) {
    const auto& d = index_.doc(h.doc_id);
    context += "[" + std::to_string(h.rank) + "] " + d.title + " (" + std::to_string(d.year) + ")\n" +
               d.abstract_text + "\n\n";
  }
  const auto n_cite = std::min<std::size_t>(hits.size(), 5);
  for (std::size_t i = 0; i < n_cite; ++i) {
    const auto& d = index_.doc(hits[i].doc_id);
    answer.citations.push_back({d.title, d.year > 0 ? std::optional<int>(d.year) : std::nullopt, d.doi});
  }

  std::string generated;
  {
    ScopedSpan span(trace, "generate_jds_answer", parent);
    try {
      const auto prompt = text::render(config_.prompts.text_answer, {{"question", query.text}, {"context", context}});
      generated = gateway_
                      .complete(make_request("generate_jds_answer", config_.prompts.system, prompt,
                                             config_.model_name, config_.temperature, config_.max_tokens))
                      .clean_text;
    } catch (const Error& e) {
      span.fail(e.what());
      Grade g;
      g.raw_model_output = e.what();
      answer.body = std::string(kIDontKnow);
      answer.error = AnswerError{"generate_jds_answer", e.what()};
      return {answer, g};
    }
  }
  auto g = grade(query, generated, "journal abstracts", "grade_jds_answer", trace, parent);
  answer.body = generated + "\n\nTop " + std::to_string(n_cite) + " Sources:\n";
  for (std::size_t i = 0; i < answer.citations.size(); ++i) {
    answer.body += std::to_string(i + 1) + ". " + answer.citations[i].render() + "\n";
  }
  return {answer, g};
}

std::pair<AgentAnswer, Grade> TextTeam::answer_from_web(const UserQuery& query, const std::vector<WebResult>& results,
                                                        Trace& trace, const std::string& parent) const {
  AgentAnswer answer;
  answer.route = RouteLabel::Text;
  std::string context;
  for (std::size_t i = 0; i < results.size(); ++i) {
    context += "[" + std::to_string(i + 1) + "] " + results[i].title + " <" + results[i].url + ">\n" +
               results[i].snippet + "\n\n";
  }
  const auto n_cite = std::min(results.size(), config_.top_k);
  for (std::size_t i = 0; i < n_cite; ++i) answer.citations.push_back({results[i].title, std::nullopt, results[i].url});

  std::string generated;
  {
    ScopedSpan span(trace, "generate_web_answer", parent);
    try {
      const auto prompt = text::render(config_.prompts.web_answer, {{"question", query.text}, {"context", context}});
      generated = gateway_
                      .complete(make_request("generate_web_answer", config_.prompts.system, prompt,
                                             config_.model_name, config_.temperature, config_.max_tokens))
                      .clean_text;
    } catch (const Error& e) {
      span.fail(e.what());
      Grade g;
      g.raw_model_output = e.what();
      answer.error = AnswerError{"generate_web_answer", e.what()};
      return {answer, g};
    }
  }
  auto g = grade(query, generated, "web search results", "grade_web_answer", trace, parent);
  answer.body = generated + "\n\nSource" + std::string(n_cite == 1 ? "" : "s") + ":\n";
  for (const auto& c : answer.citations) answer.body += c.render() + "\n";
  return {answer, g};
}

AgentAnswer TextTeam::run(const UserQuery& query, Trace& trace, const std::string& parent) const {
  std::optional<AnswerError> first_error;

  std::vector<RetrievalHit> hits;
  {
    ScopedSpan span(trace, "jds_retrieve", parent);
    try {
      hits = index_.retrieve_topk(query.text, config_.top_k);
      json ids = json::array();
      for (const auto& h : hits) ids.push_back({{"doc_id", h.doc_id}, {"score", h.score}});
      span.payload()["hits"] = ids;
    } catch (const Error& e) {
      span.fail(e.what());
      first_error = AnswerError{"jds_retrieve", e.what()};
    }
  }
  if (!hits.empty()) {
    auto [answer, g] = answer_from_docs(query, hits, trace, parent);
    if (g.adequate() && !answer.error) return answer;
    if (answer.error && !first_error) first_error = answer.error;
  }

  std::vector<WebResult> results;
  {
    ScopedSpan span(trace, "web_search", parent);
    try {
      results = web_.search(query.text);
      span.payload()["results"] = results.size();
    } catch (const Error& e) {
      span.fail(e.what());
      if (!first_error) first_error = AnswerError{"web_search", e.what()};
    }
  }
  if (!results.empty()) {
    auto [answer, g] = answer_from_web(query, results, trace, parent);
    if (g.adequate() && !answer.error) return answer;
    if (answer.error && !first_error) first_error = answer.error;
  }

  AgentAnswer idk;
  idk.route = RouteLabel::Text;
  idk.body = std::string(kIDontKnow);
  idk.error = first_error;
  return idk;
}

}  // namespace dairy
