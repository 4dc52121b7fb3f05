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

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rankfuse/lexical.hpp"
#include "rankfuse/types.hpp"

namespace rankfuse {

/// Precomputed document and topic embeddings of one fixed dimension.
/// Document rows are stored contiguously in ascending doc_id order.
class DenseStore {
 public:
  DenseStore(std::size_t dim, std::map<std::string, std::vector<double>> docs,
             std::map<TopicNumber, std::vector<double>> topics);

  std::size_t dim() const { return dim_; }
  std::size_t n_docs() const { return doc_ids_.size(); }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  std::span<const double> doc_vector(std::size_t row) const {
    return std::span<const double>(matrix_).subspan(row * dim_, dim_);
  }
  std::optional<std::size_t> doc_row(const std::string& doc_id) const;
  /// Throws when the topic has no vector.
  std::span<const double> topic_vector(TopicNumber topic) const;
  bool has_topic(TopicNumber topic) const { return topics_.count(topic) != 0; }
  const std::map<TopicNumber, std::vector<double>>& topics() const { return topics_; }

 private:
  std::size_t dim_;
  std::vector<std::string> doc_ids_;
  std::vector<double> matrix_;
  std::unordered_map<std::string, std::size_t> rows_;
  std::map<TopicNumber, std::vector<double>> topics_;
};

/// Text records `id dim v1 ... v_dim`, ids prefixed `doc:` or `topic:`.
DenseStore parse_vectors(std::string_view text);
DenseStore load_vectors(const std::filesystem::path& path);

double dot(std::span<const double> a, std::span<const double> b);

/// Exact inner product of `query` with every document row; parallel over rows.
std::vector<double> dense_scores(const DenseStore& store, std::span<const double> query);
/// Single-threaded reference for dense_scores.
std::vector<double> dense_scores_serial(const DenseStore& store, std::span<const double> query);

/// Exhaustive top-k by inner product, ties by ascending doc_id. Zero scores are kept.
std::vector<RunEntry> dense_search(const DenseStore& store, TopicNumber topic, std::size_t k);

struct HybridParams {
  double lambda = 1.0;
  BM25Params bm25;

  void validate() const;
};

/// lambda * <q_nn, d_nn> + bm25_score(query, d).
double hybrid_score(TopicNumber topic, const std::string& doc_id, const DenseStore& store,
                    const InvertedIndex& index, const QuerySpec& query, const HybridParams& params);

struct HybridResult {
  std::vector<RunEntry> entries;
  /// Documents skipped because they exist on only one side.
  std::size_t missing_from_index = 0;
  std::size_t missing_from_store = 0;
};

/// Ranks documents present in both the store and the index by hybrid score,
/// dropping zero scores.
HybridResult hybrid_search(const DenseStore& store, const InvertedIndex& index, const Topic& topic,
                           const FieldCombo& combo, const HybridParams& params, std::size_t k);

/// Same, with an already built query.
HybridResult hybrid_search(const DenseStore& store, const InvertedIndex& index, TopicNumber topic,
                           const QuerySpec& query, const HybridParams& params, std::size_t k);

}  // namespace rankfuse
