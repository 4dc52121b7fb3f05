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


// OpenMP kernels against their serial references. Set OMP_NUM_THREADS to
// vary the thread count.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "rankfuse/dense.hpp"
#include "rankfuse/fusion.hpp"
#include "rankfuse/lexical.hpp"

using namespace rankfuse;

namespace {

const DenseStore& store() {
  static const DenseStore s = [] {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    const std::size_t dim = 128;
    std::map<std::string, std::vector<double>> docs;
    for (int i = 0; i < 50000; ++i) {
      std::vector<double> v(dim);
      for (auto& x : v) x = g(rng);
      docs["d" + std::to_string(i)] = std::move(v);
    }
    std::vector<double> q(dim);
    for (auto& x : q) x = g(rng);
    return DenseStore(dim, std::move(docs), {{1, q}});
  }();
  return s;
}

const InvertedIndex& index() {
  static const InvertedIndex idx = [] {
    // Zipf-like vocabulary so common query terms have long postings.
    std::mt19937_64 rng(2);
    std::vector<double> weights(5000);
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = 1.0 / static_cast<double>(i + 1);
    std::discrete_distribution<int> word(weights.begin(), weights.end());
    std::uniform_int_distribution<int> len(50, 300);
    std::vector<Doc> docs;
    for (int d = 0; d < 50000; ++d) {
      std::string text;
      for (int i = len(rng); i > 0; --i) text += "t" + std::to_string(word(rng)) + " ";
      docs.push_back(Doc{"d" + std::to_string(d), "", text, ""});
    }
    return build_index(docs, FieldSource::Abstract);
  }();
  return idx;
}

QuerySpec query() {
  QuerySpec q;
  for (int t : {0, 1, 3, 7, 20, 45, 110, 400}) q.terms.push_back("t" + std::to_string(t));
  return q;
}

// 102 runs of depth 1000 over 50 topics, drawn from 5000 candidates per topic.
const std::vector<Run>& runs() {
  static const std::vector<Run> r = [] {
    std::mt19937_64 rng(3);
    std::vector<Run> out(102);
    std::vector<int> pool(5000);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].tag = "r" + std::to_string(i);
      for (int t = 1; t <= 50; ++t) {
        for (int j = 0; j < 5000; ++j) pool[static_cast<std::size_t>(j)] = j;
        std::shuffle(pool.begin(), pool.end(), rng);
        auto& e = out[i].topics[t];
        for (int j = 0; j < 1000; ++j) e.push_back({"d" + std::to_string(pool[static_cast<std::size_t>(j)]), j + 1, -j * 1.0});
      }
    }
    return out;
  }();
  return r;
}

void BM_DenseScores(benchmark::State& state) {
  const auto q = store().topic_vector(1);
  for (auto _ : state) benchmark::DoNotOptimize(dense_scores(store(), q));
}
void BM_DenseScoresSerial(benchmark::State& state) {
  const auto q = store().topic_vector(1);
  for (auto _ : state) benchmark::DoNotOptimize(dense_scores_serial(store(), q));
}

void BM_Bm25ScoreAll(benchmark::State& state) {
  const auto q = query();
  index();  // build outside the timed loop
  for (auto _ : state) benchmark::DoNotOptimize(bm25_score_all(q, index(), BM25Params{}));
}
void BM_Bm25ScoreAllSerial(benchmark::State& state) {
  const auto q = query();
  index();
  for (auto _ : state) benchmark::DoNotOptimize(bm25_score_all_serial(q, index(), BM25Params{}));
}

std::pair<std::vector<const Run*>, std::vector<double>> rrf_inputs() {
  std::vector<const Run*> ptrs;
  for (const auto& r : runs()) ptrs.push_back(&r);
  return {ptrs, std::vector<double>(ptrs.size(), 1.0)};
}
void BM_WeightedRrf(benchmark::State& state) {
  const auto [ptrs, w] = rrf_inputs();
  for (auto _ : state) benchmark::DoNotOptimize(weighted_rrf(ptrs, w, 60.0, "RRF"));
}
void BM_WeightedRrfSerial(benchmark::State& state) {
  const auto [ptrs, w] = rrf_inputs();
  for (auto _ : state) benchmark::DoNotOptimize(weighted_rrf_serial(ptrs, w, 60.0, "RRF"));
}

}  // namespace

BENCHMARK(BM_DenseScores)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_DenseScoresSerial)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_Bm25ScoreAll)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_Bm25ScoreAllSerial)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_WeightedRrf)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_WeightedRrfSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
