// Copyright (C) 2026 The rankfuse Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except in compliance
// with the License. You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under the License.

#include "rankfuse/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "rankfuse/text.hpp"
#include "strings.hpp"

namespace rankfuse {

FieldSource parse_field_source(std::string_view name) {
  if (name == "abstract") return FieldSource::Abstract;
  if (name == "full_text" || name == "full-text" || name == "fulltext") return FieldSource::FullText;
  throw Error("unknown field '" + std::string(name) + "' (expected abstract or full_text)");
}

std::string_view to_string(FieldSource f) { return f == FieldSource::Abstract ? "abstract" : "full_text"; }

InvertedIndex InvertedIndex::from_parts(FieldSource field, std::vector<std::string> doc_ids,
                                        std::vector<std::uint32_t> doc_len, std::vector<std::string> terms,
                                        std::vector<std::vector<Posting>> postings) {
  if (doc_ids.empty()) throw ValidationError("index has no documents");
  if (doc_ids.size() != doc_len.size()) throw ValidationError("doc id and doc length tables differ in size");
  if (terms.size() != postings.size()) throw ValidationError("term dictionary and postings differ in size");

  InvertedIndex idx;
  idx.field_ = field;
  idx.doc_ids_ = std::move(doc_ids);
  idx.doc_len_ = std::move(doc_len);
  idx.terms_ = std::move(terms);
  idx.postings_ = std::move(postings);

  const auto n = static_cast<std::uint32_t>(idx.doc_ids_.size());
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!idx.doc_lookup_.emplace(idx.doc_ids_[i], i).second)
      throw ValidationError("duplicate doc_id " + idx.doc_ids_[i] + " in index");
  }
  idx.total_tokens_ = std::accumulate(idx.doc_len_.begin(), idx.doc_len_.end(), std::uint64_t{0});
  idx.avg_doc_len_ = static_cast<double>(idx.total_tokens_) / static_cast<double>(n);

  idx.collection_freq_.assign(idx.terms_.size(), 0);
  idx.forward_.assign(n, {});
  for (std::uint32_t t = 0; t < idx.terms_.size(); ++t) {
    if (t > 0 && !(idx.terms_[t - 1] < idx.terms_[t]))
      throw ValidationError("term dictionary is not strictly sorted at '" + idx.terms_[t] + "'");
    idx.term_lookup_.emplace(idx.terms_[t], t);
    const auto& plist = idx.postings_[t];
    if (plist.empty()) throw ValidationError("term '" + idx.terms_[t] + "' has no postings");
    for (std::size_t j = 0; j < plist.size(); ++j) {
      const auto& p = plist[j];
      if (p.doc >= n) throw ValidationError("posting of '" + idx.terms_[t] + "' references unknown document");
      if (j > 0 && plist[j - 1].doc >= p.doc)
        throw ValidationError("postings of '" + idx.terms_[t] + "' are not strictly ascending");
      if (p.count == 0) throw ValidationError("zero count posting for '" + idx.terms_[t] + "'");
      idx.collection_freq_[t] += p.count;
      idx.forward_[p.doc].push_back({t, p.count});
    }
  }
  for (std::uint32_t d = 0; d < n; ++d) {
    std::uint64_t sum = 0;
    for (const auto& p : idx.forward_[d]) sum += p.count;
    if (sum != idx.doc_len_[d])
      throw ValidationError("document length of " + idx.doc_ids_[d] + " disagrees with its postings");
  }
  return idx;
}

std::optional<std::uint32_t> InvertedIndex::ordinal(const std::string& doc_id) const {
  auto it = doc_lookup_.find(doc_id);
  if (it == doc_lookup_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t InvertedIndex::doc_len(std::uint32_t ordinal) const {
  if (ordinal >= doc_len_.size()) throw Error("unknown document ordinal " + std::to_string(ordinal));
  return doc_len_[ordinal];
}

std::optional<std::uint32_t> InvertedIndex::term_id(const std::string& term) const {
  auto it = term_lookup_.find(term);
  if (it == term_lookup_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t InvertedIndex::count(std::uint32_t term_id, std::uint32_t ordinal) const {
  const auto& plist = postings_.at(term_id);
  auto it = std::lower_bound(plist.begin(), plist.end(), ordinal,
                             [](const Posting& p, std::uint32_t d) { return p.doc < d; });
  return it != plist.end() && it->doc == ordinal ? it->count : 0;
}

void BM25Params::validate() const {
  if (!(k >= 0.0) || !std::isfinite(k)) throw Error("BM25 k must be a finite non-negative number");
  if (!(b >= 0.0 && b <= 1.0)) throw Error("BM25 b must lie in [0, 1]");
}

double QuerySpec::weight(const std::string& term) const {
  auto it = weights.find(term);
  return it == weights.end() ? 1.0 : it->second;
}

std::map<std::string, double> QuerySpec::vector() const {
  std::map<std::string, double> v;
  for (const auto& t : terms) v[t] += weight(t);
  return v;
}

bool QuerySpec::contains(const std::string& term) const {
  return std::find(terms.begin(), terms.end(), term) != terms.end();
}

InvertedIndex build_index(std::span<const Doc> corpus, FieldSource field) {
  if (corpus.empty()) throw Error("cannot build an index over an empty corpus");

  std::vector<std::string> doc_ids;
  std::vector<std::uint32_t> doc_len;
  doc_ids.reserve(corpus.size());
  doc_len.reserve(corpus.size());
  std::map<std::string, std::vector<Posting>> by_term;

  for (std::uint32_t ord = 0; ord < corpus.size(); ++ord) {
    const Doc& d = corpus[ord];
    auto tokens = tokenize(field == FieldSource::Abstract ? d.abstract : d.full_text);
    doc_ids.push_back(d.doc_id);
    doc_len.push_back(static_cast<std::uint32_t>(tokens.size()));
    std::map<std::string, std::uint32_t> counts;
    for (auto& t : tokens) ++counts[std::move(t)];
    for (auto& [t, c] : counts) by_term[t].push_back({ord, c});
  }

  std::vector<std::string> terms;
  std::vector<std::vector<Posting>> postings;
  terms.reserve(by_term.size());
  postings.reserve(by_term.size());
  for (auto& [t, plist] : by_term) {
    terms.push_back(t);
    postings.push_back(std::move(plist));
  }
  return InvertedIndex::from_parts(field, std::move(doc_ids), std::move(doc_len), std::move(terms),
                                   std::move(postings));
}

double bm25_idf(std::uint32_t doc_freq, std::size_t n_docs) {
  const double n = static_cast<double>(n_docs);
  const double df = static_cast<double>(doc_freq);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

namespace {

inline double term_weight(double idf, std::uint32_t cnt, std::uint32_t len, double avg_len, const BM25Params& p) {
  if (cnt == 0) return 0.0;
  const double c = static_cast<double>(cnt);
  const double norm = avg_len > 0.0 ? static_cast<double>(len) / avg_len : 0.0;
  return idf * c * (p.k + 1.0) / (c + p.k * (1.0 - p.b + p.b * norm));
}

struct QueryTerm {
  std::uint32_t id;
  double qweight;
  double idf;
};

std::vector<QueryTerm> resolve(const QuerySpec& query, const InvertedIndex& index) {
  std::vector<QueryTerm> out;
  for (const auto& [term, qw] : query.vector()) {
    auto id = index.term_id(term);
    if (!id) continue;
    out.push_back({*id, qw, bm25_idf(index.doc_freq(*id), index.n_docs())});
  }
  return out;
}

}  // namespace

double bm25_term_weight(const std::string& term, std::uint32_t doc_ordinal, const InvertedIndex& index,
                        const BM25Params& params) {
  const auto len = index.doc_len(doc_ordinal);
  auto id = index.term_id(term);
  if (!id) return 0.0;
  return term_weight(bm25_idf(index.doc_freq(*id), index.n_docs()), index.count(*id, doc_ordinal), len,
                     index.avg_doc_len(), params);
}

double bm25_score(const QuerySpec& query, std::uint32_t doc_ordinal, const InvertedIndex& index,
                  const BM25Params& params) {
  const auto len = index.doc_len(doc_ordinal);
  double s = 0.0;
  for (const auto& qt : resolve(query, index))
    s += qt.qweight * term_weight(qt.idf, index.count(qt.id, doc_ordinal), len, index.avg_doc_len(), params);
  return s;
}

std::vector<double> bm25_score_all(const QuerySpec& query, const InvertedIndex& index, const BM25Params& params) {
  std::vector<double> acc(index.n_docs(), 0.0);
  const double avg = index.avg_doc_len();
  for (const auto& qt : resolve(query, index)) {
    const auto plist = index.postings(qt.id);
    const auto n = static_cast<std::int64_t>(plist.size());
    // Each posting in one list names a distinct document, so the writes never collide.
#pragma omp parallel for schedule(static) if (n > 4096)
    for (std::int64_t i = 0; i < n; ++i) {
      const Posting& p = plist[static_cast<std::size_t>(i)];
      acc[p.doc] += qt.qweight * term_weight(qt.idf, p.count, index.doc_len(p.doc), avg, params);
    }
  }
  return acc;
}

std::vector<double> bm25_score_all_serial(const QuerySpec& query, const InvertedIndex& index,
                                          const BM25Params& params) {
  std::vector<double> acc(index.n_docs(), 0.0);
  for (const auto& qt : resolve(query, index)) {
    for (const Posting& p : index.postings(qt.id))
      acc[p.doc] += qt.qweight * term_weight(qt.idf, p.count, index.doc_len(p.doc), index.avg_doc_len(), params);
  }
  return acc;
}

void rank_top_k(std::vector<ScoredDoc>& docs, std::size_t k) {
  auto before = [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  };
  if (k < docs.size()) {
    std::partial_sort(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(k), docs.end(), before);
    docs.resize(k);
  } else {
    std::sort(docs.begin(), docs.end(), before);
  }
}

std::vector<RunEntry> to_run_entries(const std::vector<ScoredDoc>& docs) {
  std::vector<RunEntry> out;
  out.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) out.push_back({docs[i].doc_id, static_cast<int>(i) + 1, docs[i].score});
  return out;
}

std::vector<RunEntry> search(const InvertedIndex& index, const QuerySpec& query, const BM25Params& params,
                             std::size_t k) {
  if (k == 0) throw Error("search depth must be at least 1");
  auto scores = bm25_score_all(query, index, params);
  std::vector<ScoredDoc> hits;
  for (std::uint32_t d = 0; d < scores.size(); ++d)
    if (scores[d] > 0.0) hits.push_back({index.doc_id(d), scores[d]});
  rank_top_k(hits, k);
  return to_run_entries(hits);
}

FieldCombo FieldCombo::parse(std::string_view spec) {
  FieldCombo c;
  std::size_t i = 0;
  while (i <= spec.size()) {
    auto j = spec.find_first_of("+,", i);
    if (j == std::string_view::npos) j = spec.size();
    auto part = spec.substr(i, j - i);
    if (part == "query") c.query = true;
    else if (part == "question") c.question = true;
    else if (part == "narrative") c.narrative = true;
    else throw Error("unknown topic field '" + std::string(part) + "' (expected query, question or narrative)");
    i = j + 1;
  }
  return c;
}

std::string FieldCombo::to_string() const {
  std::string s;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!s.empty()) s += '+';
    s += name;
  };
  add(query, "query");
  add(question, "question");
  add(narrative, "narrative");
  return s;
}

QuerySpec make_query(const Topic& topic, const FieldCombo& combo) {
  if (combo.empty()) throw Error("empty topic field combination");
  std::string text;
  auto add = [&](bool on, const std::string& field) {
    if (!on || field.empty()) return;
    if (!text.empty()) text += ' ';
    text += field;
  };
  add(combo.query, topic.query);
  add(combo.question, topic.question);
  add(combo.narrative, topic.narrative);
  if (text.empty())
    throw Error("topic " + std::to_string(topic.number) + ": all selected fields (" + combo.to_string() +
                ") are empty");
  QuerySpec q;
  q.terms = tokenize(text);
  return q;
}

Expansion expand_from_feedback(const InvertedIndex& index, const QuerySpec& query,
                               std::span<const std::uint32_t> feedback_docs, std::size_t n_terms) {
  Expansion ex;
  ex.query = query;
  ex.feedback_docs = feedback_docs.size();
  std::map<std::uint32_t, std::uint64_t> feedback_counts;
  std::uint64_t feedback_len = 0;
  for (auto d : feedback_docs) {
    feedback_len += index.doc_len(d);
    for (const auto& p : index.doc_terms(d)) feedback_counts[p.doc] += p.count;
  }
  if (feedback_len == 0 || index.total_tokens() == 0) {
    ex.no_feedback = true;
    return ex;
  }

  struct Candidate {
    std::uint32_t term;
    double score;
  };
  std::vector<Candidate> candidates;
  const double f_len = static_cast<double>(feedback_len);
  const double c_len = static_cast<double>(index.total_tokens());
  for (const auto& [t, cnt] : feedback_counts) {
    if (query.contains(index.term(t))) continue;
    const double pf = static_cast<double>(cnt) / f_len;
    const double pc = static_cast<double>(index.collection_freq(t)) / c_len;
    const double score = pf * std::log(pf / pc);
    if (score > 0.0) candidates.push_back({t, score});
  }
  // Term ids follow lexicographic order, so ties resolve by ascending term.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.term < b.term;
  });
  if (candidates.size() > n_terms) candidates.resize(n_terms);
  if (candidates.empty()) return ex;

  const double top = candidates.front().score;
  for (const auto& c : candidates) {
    const auto& term = index.term(c.term);
    ex.query.terms.push_back(term);
    ex.query.weights[term] = c.score / top;
    ex.added_terms.push_back(term);
  }
  return ex;
}

Expansion pseudo_feedback_expand(const InvertedIndex& index, const QuerySpec& query, const BM25Params& params,
                                 std::size_t n_docs, std::size_t n_terms) {
  if (n_docs == 0 || n_terms == 0) throw Error("feedback depth and term count must be at least 1");
  auto top = search(index, query, params, n_docs);
  if (top.empty()) {
    Expansion ex;
    ex.query = query;
    ex.no_feedback = true;
    return ex;
  }
  std::vector<std::uint32_t> docs;
  for (const auto& e : top) docs.push_back(*index.ordinal(e.doc_id));
  return expand_from_feedback(index, query, docs, n_terms);
}

Expansion relevance_feedback_expand(const InvertedIndex& index, const QuerySpec& query, const BM25Params& params,
                                    const Qrels& qrels, TopicNumber topic, std::size_t n_docs,
                                    std::size_t n_terms) {
  if (n_docs == 0 || n_terms == 0) throw Error("feedback depth and term count must be at least 1");
  std::vector<std::uint32_t> docs;
  for (const auto& e : search(index, query, params, index.n_docs())) {
    if (qrels.grade(topic, e.doc_id) < 1) continue;
    docs.push_back(*index.ordinal(e.doc_id));
    if (docs.size() == n_docs) break;
  }
  if (docs.empty()) {
    Expansion ex;
    ex.query = query;
    ex.no_feedback = true;
    return ex;
  }
  return expand_from_feedback(index, query, docs, n_terms);
}

}  // namespace rankfuse
