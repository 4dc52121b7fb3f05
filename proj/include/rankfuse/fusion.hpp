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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankfuse/types.hpp"

namespace rankfuse {

struct FusionParams {
  /// Reciprocal rank constant, must be positive.
  double k = 60.0;
  /// Keep at most this many documents per topic in the final output; 0 keeps all.
  std::size_t depth = 0;

  void validate() const;
};

/// All runs produced by one system.
struct RunPool {
  std::string system_name;
  std::vector<Run> runs;
  double weight = 1.0;
  bool uses_relevance_judgments = false;
};

/// Reciprocal rank fusion. Per topic a document scores sum_r 1/(k + rank_r(d))
/// over the runs that retrieve it; documents no run retrieves never appear.
/// Output is sorted by score, ties by ascending doc_id, and re-ranked from 1.
/// The topic set is the union of the inputs' topics.
Run rrf_fuse(std::span<const Run> runs, const FusionParams& params, std::string tag);

/// rrf_fuse over one pool's runs, tagged with the system name.
Run pool_fuse(const RunPool& pool, const FusionParams& params);

/// Fuses each pool on its own, then fuses the per-pool runs, so a system with
/// many runs carries no more weight than one with a single run.
Run hierarchical_fuse(std::span<const RunPool> pools, const FusionParams& params, std::string tag);

/// As hierarchical_fuse, but the second stage scores w_S / (k + rank) per pool.
Run weighted_hierarchical_fuse(std::span<const RunPool> pools, const FusionParams& params, std::string tag);

/// Weight 2 for pools built from prior relevance judgments, 1 otherwise.
std::vector<RunPool> default_weights(std::vector<RunPool> pools);

/// Score for a (topic, doc) pair, or nullopt when the scorer cannot score it.
using TopicDocScorer = std::function<std::optional<double>(TopicNumber, const std::string&)>;

/// Re-orders each topic's top n documents by `scorer` (descending, ties by
/// doc_id) and drops the rest. Output scores are the scorer's values.
Run rescore_top(const Run& run, std::size_t n, const TopicDocScorer& scorer);

/// Keeps the first `depth` entries of every topic.
Run truncate_run(Run run, std::size_t depth);

/// Weighted reciprocal rank fusion of arbitrary runs; the kernel behind every
/// public fusion entry point. Topics are processed in parallel. Each document's
/// contributions are summed in ascending order, so the output does not depend
/// on input order or on the thread schedule.
Run weighted_rrf(std::span<const Run* const> runs, std::span<const double> weights, double k, std::string tag);

/// Single-threaded reference for weighted_rrf.
Run weighted_rrf_serial(std::span<const Run* const> runs, std::span<const double> weights, double k,
                        std::string tag);

}  // namespace rankfuse
