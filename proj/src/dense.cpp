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

#include "rankfuse/dense.hpp"

#include <cmath>
#include <cstdint>

#include "rankfuse/corpus_io.hpp"
#include "strings.hpp"

namespace rankfuse {

DenseStore::DenseStore(std::size_t dim, std::map<std::string, std::vector<double>> docs,
                       std::map<TopicNumber, std::vector<double>> topics)
    : dim_(dim), topics_(std::move(topics)) {
  if (dim_ == 0) throw ValidationError("vector dimension must be positive");
  doc_ids_.reserve(docs.size());
  matrix_.reserve(docs.size() * dim_);
  for (auto& [id, v] : docs) {
    if (v.size() != dim_) throw ValidationError("doc:" + id + " has dimension " + std::to_string(v.size()) +
                                                ", expected " + std::to_string(dim_));
    rows_.emplace(id, doc_ids_.size());
    doc_ids_.push_back(id);
    matrix_.insert(matrix_.end(), v.begin(), v.end());
  }
  for (const auto& [t, v] : topics_) {
    if (v.size() != dim_) throw ValidationError("topic:" + std::to_string(t) + " has dimension " +
                                                std::to_string(v.size()) + ", expected " + std::to_string(dim_));
  }
}

std::optional<std::size_t> DenseStore::doc_row(const std::string& doc_id) const {
  auto it = rows_.find(doc_id);
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> DenseStore::topic_vector(TopicNumber topic) const {
  auto it = topics_.find(topic);
  if (it == topics_.end()) throw Error("no vector for topic " + std::to_string(topic));
  return it->second;
}

DenseStore parse_vectors(std::string_view text) {
  std::map<std::string, std::vector<double>> docs;
  std::map<TopicNumber, std::vector<double>> topics;
  std::optional<std::size_t> dim;

  detail::for_each_line(text, [&](std::string_view line, std::size_t lineno) {
    auto cols = detail::split_ws(line);
    if (cols.empty()) return;
    if (cols.size() < 2) throw ParseError("expected `id dim v1 ... v_dim`", lineno);
    const std::string id(cols[0]);
    auto n = detail::parse_int<std::size_t>(cols[1]);
    if (!n || *n == 0) throw ParseError(id + ": dimension '" + std::string(cols[1]) + "' is not a positive integer", lineno);
    if (cols.size() - 2 != *n)
      throw ParseError(id + ": declares dimension " + std::to_string(*n) + " but has " +
                           std::to_string(cols.size() - 2) + " components",
                       lineno);
    if (dim && *dim != *n)
      throw ValidationError("line " + std::to_string(lineno) + ": dimension mismatch for " + id + ": " +
                            std::to_string(*n) + " vs " + std::to_string(*dim));
    dim = *n;

    std::vector<double> v;
    v.reserve(*n);
    for (std::size_t i = 2; i < cols.size(); ++i) {
      auto x = detail::parse_double(cols[i]);
      if (!x) throw ParseError(id + ": component '" + std::string(cols[i]) + "' is not a number", lineno);
      if (!std::isfinite(*x)) throw ValidationError("line " + std::to_string(lineno) + ": " + id + " has a non-finite component");
      v.push_back(*x);
    }

    auto insert = [&](auto& table, const auto& key) {
      auto [it, inserted] = table.emplace(key, v);
      if (!inserted && it->second != v)
        throw ValidationError("line " + std::to_string(lineno) + ": conflicting vectors for " + id);
    };
    if (id.rfind("doc:", 0) == 0) {
      auto doc_id = id.substr(4);
      if (doc_id.empty()) throw ParseError("empty document id", lineno);
      insert(docs, doc_id);
    } else if (id.rfind("topic:", 0) == 0) {
      auto t = detail::parse_int<TopicNumber>(std::string_view(id).substr(6));
      if (!t || *t <= 0) throw ParseError("bad topic id '" + id + "'", lineno);
      insert(topics, *t);
    } else {
      throw ParseError("id '" + id + "' must start with doc: or topic:", lineno);
    }
  });

  if (!dim) throw Error("no vectors");
  return DenseStore(*dim, std::move(docs), std::move(topics));
}

DenseStore load_vectors(const std::filesystem::path& path) { return parse_vectors(read_file(path)); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> dense_scores(const DenseStore& store, std::span<const double> query) {
  if (query.size() != store.dim()) throw Error("query dimension does not match the store");
  const auto n = static_cast<std::int64_t>(store.n_docs());
  std::vector<double> out(store.n_docs());
#pragma omp parallel for schedule(static) if (n > 1024)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = dot(query, store.doc_vector(static_cast<std::size_t>(i)));
  }
  return out;
}

std::vector<double> dense_scores_serial(const DenseStore& store, std::span<const double> query) {
  if (query.size() != store.dim()) throw Error("query dimension does not match the store");
  std::vector<double> out;
  out.reserve(store.n_docs());
  for (std::size_t i = 0; i < store.n_docs(); ++i) out.push_back(dot(query, store.doc_vector(i)));
  return out;
}

std::vector<RunEntry> dense_search(const DenseStore& store, TopicNumber topic, std::size_t k) {
  if (k == 0) throw Error("search depth must be at least 1");
  auto scores = dense_scores(store, store.topic_vector(topic));
  std::vector<ScoredDoc> hits;
  hits.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) hits.push_back({store.doc_ids()[i], scores[i]});
  rank_top_k(hits, k);
  return to_run_entries(hits);
}

void HybridParams::validate() const {
  if (!std::isfinite(lambda) || lambda < 0.0) throw Error("lambda must be a finite non-negative number");
  bm25.validate();
}

double hybrid_score(TopicNumber topic, const std::string& doc_id, const DenseStore& store,
                    const InvertedIndex& index, const QuerySpec& query, const HybridParams& params) {
  auto row = store.doc_row(doc_id);
  if (!row) throw Error("document " + doc_id + " has no vector (dense side)");
  auto ord = index.ordinal(doc_id);
  if (!ord) throw Error("document " + doc_id + " is not in the index (lexical side)");
  return params.lambda * dot(store.topic_vector(topic), store.doc_vector(*row)) +
         bm25_score(query, *ord, index, params.bm25);
}

HybridResult hybrid_search(const DenseStore& store, const InvertedIndex& index, TopicNumber topic,
                           const QuerySpec& query, const HybridParams& params, std::size_t k) {
  if (k == 0) throw Error("search depth must be at least 1");
  const auto dense = dense_scores(store, store.topic_vector(topic));
  const auto lexical = bm25_score_all(query, index, params.bm25);

  HybridResult result;
  std::vector<ScoredDoc> hits;
  std::vector<bool> seen(index.n_docs(), false);
  for (std::size_t row = 0; row < store.n_docs(); ++row) {
    const auto& id = store.doc_ids()[row];
    auto ord = index.ordinal(id);
    if (!ord) {
      ++result.missing_from_index;
      continue;
    }
    seen[*ord] = true;
    const double s = params.lambda * dense[row] + lexical[*ord];
    if (s != 0.0) hits.push_back({id, s});
  }
  for (bool s : seen)
    if (!s) ++result.missing_from_store;
  rank_top_k(hits, k);
  result.entries = to_run_entries(hits);
  return result;
}

HybridResult hybrid_search(const DenseStore& store, const InvertedIndex& index, const Topic& topic,
                           const FieldCombo& combo, const HybridParams& params, std::size_t k) {
  return hybrid_search(store, index, topic.number, make_query(topic, combo), params, k);
}

}  // namespace rankfuse
