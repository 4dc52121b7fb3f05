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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rankfuse/types.hpp"

namespace rankfuse {

enum class FieldSource : std::uint8_t { Abstract = 0, FullText = 1 };

FieldSource parse_field_source(std::string_view name);
std::string_view to_string(FieldSource f);

struct Posting {
  std::uint32_t doc = 0;    // ordinal for postings, term id for the forward index
  std::uint32_t count = 0;

  friend bool operator==(const Posting&, const Posting&) = default;
};

/// Immutable term -> postings index over one document field. Terms are kept
/// in lexicographic order so term ids are stable across builds and loads.
class InvertedIndex {
 public:
  /// Assembles an index from raw parts, deriving document frequencies,
  /// collection frequencies and the forward index. Throws ValidationError when
  /// the parts are inconsistent.
  static InvertedIndex from_parts(FieldSource field, std::vector<std::string> doc_ids,
                                  std::vector<std::uint32_t> doc_len, std::vector<std::string> terms,
                                  std::vector<std::vector<Posting>> postings);

  FieldSource field_source() const { return field_; }
  std::size_t n_docs() const { return doc_ids_.size(); }
  std::size_t vocabulary_size() const { return terms_.size(); }
  double avg_doc_len() const { return avg_doc_len_; }
  std::uint64_t total_tokens() const { return total_tokens_; }

  const std::string& doc_id(std::uint32_t ordinal) const { return doc_ids_.at(ordinal); }
  std::optional<std::uint32_t> ordinal(const std::string& doc_id) const;
  std::uint32_t doc_len(std::uint32_t ordinal) const;

  const std::vector<std::string>& terms() const { return terms_; }
  const std::string& term(std::uint32_t id) const { return terms_.at(id); }
  std::optional<std::uint32_t> term_id(const std::string& term) const;

  /// Postings sorted by ascending doc ordinal.
  std::span<const Posting> postings(std::uint32_t term_id) const { return postings_.at(term_id); }
  std::uint32_t doc_freq(std::uint32_t term_id) const {
    return static_cast<std::uint32_t>(postings_.at(term_id).size());
  }
  std::uint64_t collection_freq(std::uint32_t term_id) const { return collection_freq_.at(term_id); }

  /// Occurrences of a term in a document, 0 when absent.
  std::uint32_t count(std::uint32_t term_id, std::uint32_t ordinal) const;

  /// (term id, count) pairs of one document, ascending term id.
  std::span<const Posting> doc_terms(std::uint32_t ordinal) const { return forward_.at(ordinal); }

 private:
  FieldSource field_ = FieldSource::Abstract;
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_len_;
  double avg_doc_len_ = 0.0;
  std::uint64_t total_tokens_ = 0;
  std::vector<std::string> terms_;
  std::vector<std::vector<Posting>> postings_;
  std::vector<std::uint64_t> collection_freq_;
  std::vector<std::vector<Posting>> forward_;
  std::unordered_map<std::string, std::uint32_t> term_lookup_;
  std::unordered_map<std::string, std::uint32_t> doc_lookup_;
};

struct BM25Params {
  double k = 1.2;   // term-frequency saturation
  double b = 0.75;  // length normalization

  void validate() const;
};

/// Bag of query tokens. A term's coordinate in the query vector is its
/// multiplicity times its weight; unweighted terms weigh 1.
struct QuerySpec {
  std::vector<std::string> terms;
  std::map<std::string, double> weights;

  double weight(const std::string& term) const;
  /// Sparse query vector: term -> multiplicity * weight.
  std::map<std::string, double> vector() const;
  bool contains(const std::string& term) const;
};

InvertedIndex build_index(std::span<const Doc> corpus, FieldSource field);

/// Smoothed, non-negative inverse document frequency.
double bm25_idf(std::uint32_t doc_freq, std::size_t n_docs);

double bm25_term_weight(const std::string& term, std::uint32_t doc_ordinal, const InvertedIndex& index,
                        const BM25Params& params);

/// Term-at-a-time dot product of the query vector with the document's BM25 vector.
double bm25_score(const QuerySpec& query, std::uint32_t doc_ordinal, const InvertedIndex& index,
                  const BM25Params& params);

/// BM25 scores of every document, indexed by ordinal. Postings of each query
/// term are accumulated in parallel; the result does not depend on the
/// thread count.
std::vector<double> bm25_score_all(const QuerySpec& query, const InvertedIndex& index, const BM25Params& params);

/// Single-threaded reference for bm25_score_all.
std::vector<double> bm25_score_all_serial(const QuerySpec& query, const InvertedIndex& index,
                                          const BM25Params& params);

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;
};

/// Sorts by descending score, then ascending doc_id, and keeps the first k.
void rank_top_k(std::vector<ScoredDoc>& docs, std::size_t k);

/// Converts an ordered list into run entries with ranks 1..n.
std::vector<RunEntry> to_run_entries(const std::vector<ScoredDoc>& docs);

/// Top-k documents with a positive BM25 score, ranked 1..n.
std::vector<RunEntry> search(const InvertedIndex& index, const QuerySpec& query, const BM25Params& params,
                             std::size_t k);

/// Which topic fields feed a query.
struct FieldCombo {
  bool query = false;
  bool question = false;
  bool narrative = false;

  bool empty() const { return !query && !question && !narrative; }
  /// Accepts "query", "query+question", "question,narrative", ...
  static FieldCombo parse(std::string_view spec);
  std::string to_string() const;
};

QuerySpec make_query(const Topic& topic, const FieldCombo& combo);

struct Expansion {
  QuerySpec query;
  std::size_t feedback_docs = 0;
  std::vector<std::string> added_terms;
  /// Set when there was nothing to learn from and the query came back unchanged.
  bool no_feedback = false;
};

/// Scores terms of the feedback documents by their KL contribution
/// p_F(t) * ln(p_F(t) / p_C(t)) and appends the n_terms best that the query
/// does not already contain. Weights are normalized so the best added term
/// weighs 1.
Expansion expand_from_feedback(const InvertedIndex& index, const QuerySpec& query,
                               std::span<const std::uint32_t> feedback_docs, std::size_t n_terms);

/// Expansion from the top n_docs BM25 results.
Expansion pseudo_feedback_expand(const InvertedIndex& index, const QuerySpec& query, const BM25Params& params,
                                 std::size_t n_docs, std::size_t n_terms);

/// Expansion from the n_docs highest-ranked results judged relevant (grade >= 1).
Expansion relevance_feedback_expand(const InvertedIndex& index, const QuerySpec& query, const BM25Params& params,
                                    const Qrels& qrels, TopicNumber topic, std::size_t n_docs,
                                    std::size_t n_terms);

/// Binary index file; layout in docs/index_format.md.
std::string serialize_index(const InvertedIndex& index);
InvertedIndex deserialize_index(std::string_view bytes);
void save_index(const InvertedIndex& index, const std::filesystem::path& path);
InvertedIndex load_index(const std::filesystem::path& path);

}  // namespace rankfuse
