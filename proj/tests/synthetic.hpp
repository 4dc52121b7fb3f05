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
#include <random>
#include <string>
#include <vector>

#include "rankfuse/corpus_io.hpp"
#include "rankfuse/ltr.hpp"
#include "strings.hpp"

namespace rankfuse::testing {

// Small synthetic collection with a known topical structure. Every random
// draw goes through uniform_below so the files are identical on any
// platform for a given seed.
struct SyntheticCollection {
  std::filesystem::path corpus, topics, qrels, train_qrels, vectors;
};

inline SyntheticCollection write_synthetic_collection(const std::filesystem::path& dir, std::size_t n_docs = 100,
                                                      int n_topics = 5, std::uint64_t seed = 11) {
  static const std::vector<std::string> filler = {
      "patient", "cohort",  "sample",  "method", "result", "analysis", "clinical", "model",   "outcome", "trial",
      "measure", "report",  "season",  "region", "survey", "hospital", "baseline", "control", "signal",  "factor",
      "protein", "network", "cluster", "vector", "marker", "exposure", "variant",  "series",  "window",  "dataset"};
  static const std::vector<std::vector<std::string>> topical = {
      {"antibody", "immunity", "reinfection", "serology"},   {"ventilator", "oxygen", "intubation", "respiratory"},
      {"transmission", "aerosol", "droplet", "distancing"},  {"vaccine", "efficacy", "dose", "adjuvant"},
      {"mortality", "comorbidity", "diabetes", "obesity"},   {"genome", "sequencing", "mutation", "lineage"},
      {"children", "school", "pediatric", "kawasaki"},       {"remdesivir", "antiviral", "inhibitor", "protease"}};

  std::mt19937_64 rng(seed);
  auto below = [&](std::uint64_t n) { return uniform_below(rng, n); };
  auto words = [&](std::size_t n, int topic, std::uint64_t topical_pct) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
      if (!s.empty()) s += ' ';
      if (topic > 0 && below(100) < topical_pct) s += topical[static_cast<std::size_t>(topic - 1)][below(4)];
      else s += filler[below(filler.size())];
    }
    return s;
  };

  std::string corpus, qrels, train, vectors;
  std::vector<int> doc_topic(n_docs), doc_strength(n_docs);
  for (std::size_t i = 0; i < n_docs; ++i) {
    // Roughly half the documents belong to a topic, at one of two strengths.
    doc_topic[i] = below(2) == 0 ? static_cast<int>(below(static_cast<std::uint64_t>(n_topics))) + 1 : 0;
    doc_strength[i] = doc_topic[i] ? static_cast<int>(below(2)) + 1 : 0;
    const std::uint64_t pct = doc_strength[i] == 2 ? 35 : 12;
    const std::string id = "doc" + std::to_string(1000 + i);
    corpus += R"({"doc_id": ")" + id + R"(", "title": ")" + words(4, doc_topic[i], pct) + R"(", "abstract": ")" +
              words(20 + below(20), doc_topic[i], pct) + R"(", "full_text": ")" + words(60 + below(60), doc_topic[i], pct) +
              "\"}\n";
    vectors += "doc:" + id + " 8";
    for (int d = 0; d < 8; ++d) {
      double v = static_cast<double>(below(2001)) / 1000.0 - 1.0;
      if (doc_topic[i] && d == doc_topic[i] % 8) v += 1.5 * doc_strength[i];
      vectors += " " + detail::format_fixed(v, 3);
    }
    vectors += "\n";
  }

  std::string xml = "<?xml version=\"1.0\"?>\n<topics>\n";
  for (int t = 1; t <= n_topics; ++t) {
    const auto& w = topical[static_cast<std::size_t>(t - 1)];
    xml += "<topic number=\"" + std::to_string(t) + "\">\n  <query>" + w[0] + " " + w[1] + "</query>\n  <question>what is known about " +
           w[2] + " and " + w[3] + "?</question>\n  <narrative>studies of " + w[0] + " " + w[3] + "</narrative>\n</topic>\n";
    vectors += "topic:" + std::to_string(t) + " 8";
    for (int d = 0; d < 8; ++d) vectors += d == t % 8 ? " 1.000" : " 0.000";
    vectors += "\n";
    for (std::size_t i = 0; i < n_docs; ++i) {
      const int grade = doc_topic[i] == t ? doc_strength[i] : 0;
      // Judge all on-topic documents and a quarter of the rest; a third of the
      // judgments form the earlier round used for training.
      if (grade == 0 && below(4) != 0) continue;
      const std::string line = std::to_string(t) + " 0 doc" + std::to_string(1000 + i) + " " + std::to_string(grade) + "\n";
      qrels += line;
      if (below(3) == 0) train += line;
    }
  }
  xml += "</topics>\n";

  SyntheticCollection c{dir / "corpus.jsonl", dir / "topics.xml", dir / "qrels.txt", dir / "train_qrels.txt",
                        dir / "vectors.txt"};
  std::filesystem::create_directories(dir);
  write_file(c.corpus, corpus);
  write_file(c.topics, xml);
  write_file(c.qrels, qrels);
  write_file(c.train_qrels, train);
  write_file(c.vectors, vectors);
  return c;
}

// Experiment config over a synthetic collection: two BM25 runs, one dense
// run, LTR rescoring of the top 50.
inline std::string synthetic_experiment_json(const std::string& output_dir, bool residual = false) {
  return R"({
  "corpus": "corpus.jsonl", "topics": "topics.xml", "qrels": "qrels.txt", "train_qrels": "train_qrels.txt",
  "vectors": "vectors.txt", "output_dir": ")" + output_dir + R"(", "residual": )" + (residual ? "true" : "false") + R"(,
  "retrieval": [
    {"kind": "bm25", "system": "bm25", "tag": "bm25.abs.q", "index": "abstract", "fields": "query"},
    {"kind": "bm25", "system": "bm25", "tag": "bm25.full.qq.prf", "index": "full_text", "fields": "query+question", "expand": "pseudo:5,10"},
    {"kind": "dense", "system": "dense", "tag": "dense"}
  ],
  "rescore": {"depth": 50, "steps": 200, "learning_rate": 0.1, "seed": 3}
})";
}

}  // namespace rankfuse::testing
