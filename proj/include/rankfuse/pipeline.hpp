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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankfuse/dense.hpp"
#include "rankfuse/eval.hpp"
#include "rankfuse/fusion.hpp"
#include "rankfuse/lexical.hpp"
#include "rankfuse/ltr.hpp"
#include "rankfuse/pool_config.hpp"
#include "rankfuse/types.hpp"

namespace rankfuse {

enum class FusionMode { Flat, Hierarchical, Weighted };

FusionMode parse_fusion_mode(std::string_view name);
std::string_view to_string(FusionMode mode);
/// RRF, h-RRF or h_w-RRF.
std::string_view default_fusion_tag(FusionMode mode);

/// Flat mode fuses every run of every pool at once; the other modes go
/// through the per-pool stage.
Run fuse_pools(std::span<const RunPool> pools, FusionMode mode, const FusionParams& params, std::string tag);

/// `pseudo:DOCS,TERMS` or `relevance:DOCS,TERMS`.
struct ExpansionSpec {
  enum class Kind { Pseudo, Relevance };
  Kind kind = Kind::Pseudo;
  std::size_t n_docs = 10;
  std::size_t n_terms = 10;

  static ExpansionSpec parse(std::string_view text);
};

struct SearchOptions {
  FieldCombo fields{true, false, false};
  BM25Params bm25;
  std::size_t k = 1000;
  std::string tag = "bm25";
  std::optional<ExpansionSpec> expand;
};

/// BM25 run over all topics, topics searched in parallel. Relevance feedback
/// needs `qrels`.
Run batch_search(const InvertedIndex& index, std::span<const Topic> topics, const SearchOptions& options,
                 const Qrels* qrels = nullptr);

/// Dense run for every topic vector in the store.
Run batch_dense_search(const DenseStore& store, std::size_t k, std::string tag);

Run batch_hybrid_search(const DenseStore& store, const InvertedIndex& index, std::span<const Topic> topics,
                        const FieldCombo& fields, const HybridParams& params, std::size_t k, std::string tag);

/// Overlap features for the top `depth` documents of each topic of `candidates`.
/// Labels come from `labels` (grade, unjudged = 0) when given.
std::vector<FeatureRecord> build_features(const InvertedIndex& index, std::span<const Topic> topics,
                                          const FieldCombo& fields, const BM25Params& bm25, const Run& candidates,
                                          std::size_t depth, const Qrels* labels);

/// Ranks every record by sigmoid(W . features + b).
Run score_features(const LinearScorer& scorer, std::span<const FeatureRecord> records, std::string tag);

/// rescore_top with the scorer applied to precomputed feature records.
Run rescore_with_features(const Run& run, std::size_t depth, const LinearScorer& scorer,
                          std::span<const FeatureRecord> records, std::string tag);

// Ablation tables.

struct AblationRow {
  std::string name;
  std::vector<std::string> pools;
  FusionMode mode = FusionMode::Weighted;
};

struct AblationConfig {
  std::vector<PoolSpec> pools;
  std::vector<AblationRow> rows;
  std::string baseline;
  FusionParams fusion;
  EvalCutoffs cutoffs;
  std::filesystem::path qrels;
  std::optional<std::filesystem::path> prior_qrels;
  std::filesystem::path base_dir;
};

AblationConfig parse_ablation_config(std::string_view json_text, const std::filesystem::path& base_dir);

struct AblationResult {
  struct Row {
    std::string name;
    FusionMode mode;
    std::size_t n_runs = 0;
    std::vector<double> means;
    /// Per metric: differs from the baseline row at p < 0.05.
    std::vector<bool> significant;
  };
  std::vector<std::string> metrics;
  std::vector<Row> rows;
};

AblationResult run_ablation(std::span<const RunPool> pools, std::span<const AblationRow> rows,
                            const std::string& baseline, const FusionParams& fusion, const Qrels& qrels,
                            const EvalCutoffs& cutoffs, double alpha = 0.05, const Qrels* prior = nullptr);

/// Tab-separated table, means to 4 decimals, `*` marking significance.
std::string format_ablation_table(const AblationResult& result);

// End-to-end experiment: index, retrieve, fuse, rescore, weighted fuse, evaluate.

struct RetrievalSpec {
  enum class Kind { Bm25, Dense, Hybrid };
  Kind kind = Kind::Bm25;
  std::string system;
  std::string tag;
  FieldSource index = FieldSource::Abstract;
  FieldCombo fields{true, false, false};
  std::optional<ExpansionSpec> expand;
  double lambda = 1.0;
};

struct RescoreSpec {
  std::string system = "ltr";
  std::size_t depth = 50;
  FieldSource index = FieldSource::Abstract;
  FieldCombo fields{true, true, false};
  TrainOptions train;
};

struct ExperimentConfig {
  std::filesystem::path corpus;
  std::filesystem::path topics;
  std::filesystem::path qrels;
  std::filesystem::path train_qrels;
  std::optional<std::filesystem::path> vectors;
  std::filesystem::path output_dir;
  bool residual = false;
  FusionParams fusion;
  BM25Params bm25;
  std::size_t k = 1000;
  EvalCutoffs cutoffs;
  std::vector<RetrievalSpec> retrieval;
  RescoreSpec rescore;
};

/// Relative paths resolve against base_dir.
ExperimentConfig parse_experiment_config(std::string_view json_text, const std::filesystem::path& base_dir);

struct ExperimentResult {
  Run final_run;
  EvalReport report;
  std::vector<std::filesystem::path> written;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace rankfuse
