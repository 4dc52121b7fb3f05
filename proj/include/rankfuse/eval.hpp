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

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankfuse/types.hpp"

namespace rankfuse {

// Binary metrics treat grade >= 1 as relevant; unjudged documents are non-relevant.

/// Relevant documents in the top k over k, even when fewer than k were retrieved.
double precision_at_k(const Run& run, const Qrels& qrels, std::size_t k, TopicNumber topic);

/// nullopt when the topic has no relevant documents.
std::optional<double> average_precision(const Run& run, const Qrels& qrels, TopicNumber topic);

/// Linear gain grade / log2(rank + 1). nullopt when the ideal DCG is 0.
std::optional<double> ndcg_at_k(const Run& run, const Qrels& qrels, std::size_t k, TopicNumber topic);

std::optional<double> recall_at_k(const Run& run, const Qrels& qrels, std::size_t k, TopicNumber topic);

struct EvalCutoffs {
  std::size_t ndcg = 20;
  std::size_t precision = 20;
  std::size_t recall = 1000;
};

struct EvalResult {
  std::string metric;
  std::map<TopicNumber, double> per_topic;
  double mean = 0.0;
};

struct EvalReport {
  std::vector<EvalResult> metrics;  // nDCG@k, P@k, MAP, Recall@k
  /// Run topics left out because the qrels hold no relevant document for them.
  std::vector<TopicNumber> excluded_topics;

  const EvalResult& metric(std::string_view name) const;
};

/// Scores every run topic that has at least one relevant judgment.
/// Throws when no topic qualifies.
EvalReport evaluate(const Run& run, const Qrels& qrels, const EvalCutoffs& cutoffs = {});

/// Removes, per topic, every document judged (any grade) in `prior`. Ranks
/// are reassigned from 1; scores are kept.
Run residual_filter(const Run& run, const Qrels& prior);

/// Drops judgments that `prior` already covers, so residual runs are scored
/// only against new judgments.
Qrels residual_filter_qrels(const Qrels& current, const Qrels& prior);

/// Tab-separated `metric topic value` lines followed by `metric all mean`.
std::string format_report_tsv(const EvalReport& report);
std::string format_report_json(const EvalReport& report);

/// Reads the per-topic values of one metric back from a TSV report.
std::map<TopicNumber, double> parse_report_metric(std::string_view tsv, std::string_view metric);

}  // namespace rankfuse
