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
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankfuse/lexical.hpp"
#include "rankfuse/types.hpp"

namespace rankfuse {

/// Dense scoring layer: sigmoid(W . features + bias).
struct LinearScorer {
  std::vector<double> weights;
  double bias = 0.0;

  std::size_t feature_dim() const { return weights.size(); }
  void validate() const;
};

double logistic(double z);

/// W . features + bias, before the sigmoid.
double pre_activation(const LinearScorer& scorer, std::span<const double> features);

double linear_score(const LinearScorer& scorer, std::span<const double> features);

/// Listwise softmax cross-entropy: -sum_d (y_d / sum y) * log softmax(s)_d,
/// evaluated with a max-shifted log-sum-exp.
double softmax_ranking_loss(std::span<const double> scores, std::span<const double> labels);

/// d loss / d s_i = softmax(s)_i - y_i / sum y.
std::vector<double> loss_gradient(std::span<const double> scores, std::span<const double> labels);

struct Candidate {
  std::string doc_id;
  std::vector<double> features;
  double label = 0.0;
};

struct TrainingExample {
  TopicNumber topic = 0;
  std::vector<Candidate> candidates;

  /// Throws unless some label is positive and all feature vectors agree in size.
  void validate() const;
};

struct SampledCandidates {
  TrainingExample example;
  /// No zero-label candidate was available; the positive is returned alone.
  bool no_negatives = false;
};

/// One uniformly chosen positive plus up to l - 1 distinct zero-label
/// candidates drawn uniformly. Deterministic for a given seed on every platform.
SampledCandidates sample_candidates(const TrainingExample& example, std::size_t l, std::uint64_t seed);

enum class LossInput {
  PreActivation,  // loss on W . e + b
  Sigmoid,        // loss on sigmoid(W . e + b)
};

struct TrainOptions {
  std::size_t l = 12;
  std::size_t steps = 500;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  LossInput loss_input = LossInput::PreActivation;
};

/// Plain gradient descent from W = 0, b = 0; each step draws one example and
/// one candidate subset.
LinearScorer train_linear(std::span<const TrainingExample> examples, const TrainOptions& options);

/// Mean loss over examples using every candidate.
double mean_loss(const LinearScorer& scorer, std::span<const TrainingExample> examples,
                 LossInput input = LossInput::PreActivation);

/// Uniform integer in [0, n) from raw engine output; unlike the standard
/// distributions this is identical across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

// Scorer files: {"feature_dim": n, "W": [...], "bias": b}.
std::string scorer_to_json(const LinearScorer& scorer);
LinearScorer scorer_from_json(std::string_view text);

/// One line of a feature file: {"topic", "doc_id", "features", "label"}.
struct FeatureRecord {
  TopicNumber topic = 0;
  std::string doc_id;
  std::vector<double> features;
  double label = 0.0;
};

std::vector<FeatureRecord> parse_feature_file(std::string_view jsonl);
std::string write_feature_file(std::span<const FeatureRecord> records);

/// Groups records by topic (ascending). Topics without a positive label are
/// skipped and counted in `skipped`.
std::vector<TrainingExample> group_examples(std::span<const FeatureRecord> records, std::size_t* skipped = nullptr);

/// Query-document features from the lexical index: BM25 score, fraction of
/// distinct query terms present, mean log(1 + tf) over query terms and
/// log(1 + document length).
std::vector<double> overlap_features(const InvertedIndex& index, const QuerySpec& query, std::uint32_t doc_ordinal,
                                     const BM25Params& params);

inline constexpr std::size_t kOverlapFeatureDim = 4;

}  // namespace rankfuse
