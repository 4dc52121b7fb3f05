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

#include "rankfuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string_view>
#include <unordered_map>

#include "rankfuse/corpus_io.hpp"

namespace rankfuse {

void FusionParams::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw Error("fusion constant k must be positive, got " + std::to_string(k));
}

namespace {

using Fused = std::vector<RunEntry>;

Fused fuse_topic(TopicNumber topic, std::span<const Run* const> runs, std::span<const double> weights, double k) {
  std::unordered_map<std::string_view, std::vector<double>> contributions;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    auto it = runs[i]->topics.find(topic);
    if (it == runs[i]->topics.end()) continue;
    for (const auto& e : it->second) contributions[e.doc_id].push_back(weights[i] / (k + e.rank));
  }

  struct Scored {
    std::string_view doc;
    double score;
  };
  std::vector<Scored> docs;
  docs.reserve(contributions.size());
  for (auto& [doc, parts] : contributions) {
    std::sort(parts.begin(), parts.end());
    double s = 0.0;
    for (double p : parts) s += p;
    docs.push_back({doc, s});
  }
  std::sort(docs.begin(), docs.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc < b.doc;
  });

  Fused out;
  out.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i)
    out.push_back({std::string(docs[i].doc), static_cast<int>(i) + 1, docs[i].score});
  return out;
}

std::vector<TopicNumber> topic_union(std::span<const Run* const> runs) {
  std::set<TopicNumber> topics;
  for (const auto* r : runs)
    for (const auto& [t, _] : r->topics) topics.insert(t);
  return {topics.begin(), topics.end()};
}

void check_inputs(std::span<const Run* const> runs, std::span<const double> weights, double k) {
  if (runs.empty()) throw Error("fusion needs at least one run");
  if (runs.size() != weights.size()) throw Error("fusion weights do not match the run count");
  if (!(k > 0.0) || !std::isfinite(k)) throw Error("fusion constant k must be positive");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw Error("fusion weights must be positive and finite");
}

std::vector<const Run*> pointers(std::span<const Run> runs) {
  std::vector<const Run*> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(&r);
  return out;
}

void check_pools(std::span<const RunPool> pools) {
  if (pools.empty()) throw Error("fusion needs at least one pool");
  std::set<std::string_view> names;
  for (const auto& p : pools) {
    if (!names.insert(p.system_name).second) throw Error("duplicate system name '" + p.system_name + "'");
    if (p.runs.empty()) throw Error("pool '" + p.system_name + "' has no runs");
  }
}

Run pool_fuse_untruncated(const RunPool& pool, double k) {
  for (const auto& r : pool.runs) validate_run(r);
  auto ptrs = pointers(pool.runs);
  std::vector<double> ones(ptrs.size(), 1.0);
  return weighted_rrf(ptrs, ones, k, pool.system_name);
}

Run two_stage(std::span<const RunPool> pools, const FusionParams& params, std::string tag, bool weighted) {
  params.validate();
  check_pools(pools);
  std::vector<Run> per_pool;
  std::vector<double> weights;
  per_pool.reserve(pools.size());
  for (const auto& p : pools) {
    if (weighted && (!(p.weight > 0.0) || !std::isfinite(p.weight)))
      throw Error("pool '" + p.system_name + "' has non-positive weight");
    per_pool.push_back(pool_fuse_untruncated(p, params.k));
    weights.push_back(weighted ? p.weight : 1.0);
  }
  auto ptrs = pointers(per_pool);
  return truncate_run(weighted_rrf(ptrs, weights, params.k, std::move(tag)), params.depth);
}

}  // namespace

Run weighted_rrf(std::span<const Run* const> runs, std::span<const double> weights, double k, std::string tag) {
  check_inputs(runs, weights, k);
  const auto topics = topic_union(runs);
  std::vector<Fused> fused(topics.size());
  const auto n = static_cast<std::int64_t>(topics.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    fused[idx] = fuse_topic(topics[idx], runs, weights, k);
  }
  Run out;
  out.tag = std::move(tag);
  for (std::size_t i = 0; i < topics.size(); ++i) out.topics.emplace(topics[i], std::move(fused[i]));
  return out;
}

Run weighted_rrf_serial(std::span<const Run* const> runs, std::span<const double> weights, double k,
                        std::string tag) {
  check_inputs(runs, weights, k);
  Run out;
  out.tag = std::move(tag);
  for (auto t : topic_union(runs)) out.topics.emplace(t, fuse_topic(t, runs, weights, k));
  return out;
}

Run rrf_fuse(std::span<const Run> runs, const FusionParams& params, std::string tag) {
  params.validate();
  if (runs.empty()) throw Error("fusion needs at least one run");
  for (const auto& r : runs) validate_run(r);
  auto ptrs = pointers(runs);
  std::vector<double> ones(ptrs.size(), 1.0);
  return truncate_run(weighted_rrf(ptrs, ones, params.k, std::move(tag)), params.depth);
}

Run pool_fuse(const RunPool& pool, const FusionParams& params) {
  params.validate();
  if (pool.runs.empty()) throw Error("pool '" + pool.system_name + "' has no runs");
  return truncate_run(pool_fuse_untruncated(pool, params.k), params.depth);
}

Run hierarchical_fuse(std::span<const RunPool> pools, const FusionParams& params, std::string tag) {
  return two_stage(pools, params, std::move(tag), false);
}

Run weighted_hierarchical_fuse(std::span<const RunPool> pools, const FusionParams& params, std::string tag) {
  return two_stage(pools, params, std::move(tag), true);
}

std::vector<RunPool> default_weights(std::vector<RunPool> pools) {
  for (auto& p : pools) p.weight = p.uses_relevance_judgments ? 2.0 : 1.0;
  return pools;
}

Run rescore_top(const Run& run, std::size_t n, const TopicDocScorer& scorer) {
  if (n == 0) throw Error("rescore depth must be at least 1");
  Run out;
  out.tag = run.tag;
  for (const auto& [topic, entries] : run.topics) {
    struct Scored {
      const std::string* doc;
      double score;
    };
    std::vector<Scored> top;
    const auto limit = std::min(n, entries.size());
    top.reserve(limit);
    for (std::size_t i = 0; i < limit; ++i) {
      auto s = scorer(topic, entries[i].doc_id);
      if (!s)
        throw Error("scorer cannot score document " + entries[i].doc_id + " for topic " + std::to_string(topic));
      top.push_back({&entries[i].doc_id, *s});
    }
    std::sort(top.begin(), top.end(), [](const Scored& a, const Scored& b) {
      if (a.score != b.score) return a.score > b.score;
      return *a.doc < *b.doc;
    });
    auto& dst = out.topics[topic];
    dst.reserve(top.size());
    for (std::size_t i = 0; i < top.size(); ++i) dst.push_back({*top[i].doc, static_cast<int>(i) + 1, top[i].score});
  }
  return out;
}

Run truncate_run(Run run, std::size_t depth) {
  if (depth == 0) return run;
  for (auto& [_, entries] : run.topics)
    if (entries.size() > depth) entries.resize(depth);
  return run;
}

}  // namespace rankfuse
