#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dairy/knowledge.hpp"
#include "dairy/text.hpp"

namespace support::retrieval_oracle {

struct Scored {
  long double score;
  std::string doc_id;
};

// Brute force: long-double cosine against every document, full sort by (score desc, id asc).
inline std::vector<Scored> brute_force_ranking(const std::vector<dairy::AbstractDoc>& docs, dairy::Embedder& emb,
                                               const std::string& query) {
  const auto q = emb.embed(query);
  std::vector<Scored> scored;
  for (const auto& d : docs) {
    const auto v = emb.embed(d.title + "\n" + d.abstract_text);
    long double dot = 0, nq = 0, nv = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      dot += static_cast<long double>(q[i]) * v[i];
      nq += static_cast<long double>(q[i]) * q[i];
      nv += static_cast<long double>(v[i]) * v[i];
    }
    const long double s = (nq == 0 || nv == 0) ? 0.0L : dot / (std::sqrt(nq) * std::sqrt(nv));
    scored.push_back({s, d.doc_id});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  return scored;
}

// Scores closer than this are one tie group; double and long double round differently there.
inline constexpr long double kTieEps = 1e-12L;

// The ranking must reproduce the oracle's score at every rank; exact score ties go by doc id.
// Returns a description of the first disagreement.
inline std::optional<std::string> ranking_mismatch(const std::vector<dairy::RetrievalHit>& hits,
                                                   const std::vector<Scored>& want) {
  std::map<std::string, long double> oracle;
  for (const auto& w : want) oracle[w.doc_id] = w.score;
  std::set<std::string> seen;
  std::ostringstream why;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (!seen.insert(hits[i].doc_id).second) return "duplicate " + hits[i].doc_id;
    if (hits[i].rank != i + 1) return "rank field " + std::to_string(hits[i].rank);
    const auto it = oracle.find(hits[i].doc_id);
    if (it == oracle.end()) return "unknown doc " + hits[i].doc_id;
    const long double got = it->second;
    if (std::fabs(got - want[i].score) > kTieEps) {
      why << "rank " << i + 1 << ": " << hits[i].doc_id << " scores " << static_cast<double>(got) << ", oracle has "
          << want[i].doc_id << " at " << static_cast<double>(want[i].score);
      return why.str();
    }
    if (std::fabs(static_cast<long double>(hits[i].score) - got) > kTieEps) {
      return "reported score differs for " + hits[i].doc_id;
    }
    if (i > 0 && hits[i - 1].score == hits[i].score && hits[i - 1].doc_id > hits[i].doc_id) {
      return "tie not broken by doc id at rank " + std::to_string(i + 1);
    }
  }
  return std::nullopt;
}

inline std::string jsonl(const std::vector<dairy::AbstractDoc>& docs) {
  std::string out;
  for (const auto& d : docs) {
    out += dairy::json{{"id", d.doc_id}, {"title", d.title},   {"abstract", d.abstract_text},
                       {"year", d.year}, {"doi", d.doi},       {"authors", d.authors}, {"source", d.source_tag}}
               .dump() +
           "\n";
  }
  return out;
}

// Queries of 1 to 8 words drawn from the corpus vocabulary.
inline std::vector<std::string> random_queries(const std::vector<dairy::AbstractDoc>& docs, std::size_t n,
                                               std::uint64_t seed) {
  std::vector<std::string> vocab;
  for (const auto& d : docs) {
    for (const auto& w : dairy::text::split(d.title + " " + d.abstract_text, ' ')) {
      if (w.size() > 3) vocab.push_back(w);
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1), len(1, 8);
  std::vector<std::string> out;
  for (std::size_t qi = 0; qi < n; ++qi) {
    std::string q;
    for (auto k = len(rng); k > 0; --k) q += vocab[pick(rng)] + " ";
    out.push_back(q);
  }
  return out;
}

}  // namespace support::retrieval_oracle
