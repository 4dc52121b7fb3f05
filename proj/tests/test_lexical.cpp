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


#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "rankfuse/corpus_io.hpp"
#include "rankfuse/lexical.hpp"
#include "rankfuse/text.hpp"
#include "test_support.hpp"

using namespace rankfuse;
using Catch::Approx;

namespace {

std::vector<Doc> docs_from(std::initializer_list<const char*> abstracts) {
  std::vector<Doc> out;
  int i = 0;
  for (const char* a : abstracts) out.push_back(Doc{testing::doc_name(i++), "", a, ""});
  return out;
}

// Random corpus over words "wa".."w?" chosen so the tokenizer keeps them unchanged.
std::vector<Doc> random_corpus(std::mt19937_64& rng, int n_docs, int vocab) {
  std::uniform_int_distribution<int> len(0, 40);
  std::uniform_int_distribution<int> word(0, vocab - 1);
  std::vector<Doc> docs;
  for (int d = 0; d < n_docs; ++d) {
    std::string text;
    for (int i = len(rng); i > 0; --i) text += "x" + std::to_string(word(rng)) + " ";
    if (text.empty()) text = " ";
    docs.push_back(Doc{testing::doc_name(d), "", text, ""});
  }
  return docs;
}

// The weighting written out again from its definition, sharing nothing with the library.
double oracle_weight(double cnt, double df, double n, double m, double m_avg, double k, double b) {
  if (cnt == 0) return 0.0;
  const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
  return idf * cnt * (k + 1.0) / (cnt + k * (1.0 - b + b * m / m_avg));
}

// Both sides of the dot product materialized over the full vocabulary.
std::vector<double> materialized_scores(const std::vector<Doc>& docs, const std::vector<std::string>& query,
                                        double k, double b) {
  std::vector<std::map<std::string, int>> counts(docs.size());
  std::vector<double> lens(docs.size());
  std::set<std::string> vocab;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& t : tokenize(docs[d].abstract)) {
      ++counts[d][t];
      vocab.insert(t);
    }
    lens[d] = static_cast<double>(tokenize(docs[d].abstract).size());
  }
  double avg = 0;
  for (double l : lens) avg += l;
  avg /= static_cast<double>(docs.size());

  const std::vector<std::string> dims(vocab.begin(), vocab.end());
  std::vector<double> q(dims.size(), 0.0);
  for (const auto& t : query) {
    auto it = std::lower_bound(dims.begin(), dims.end(), t);
    if (it != dims.end() && *it == t) q[static_cast<std::size_t>(it - dims.begin())] += 1.0;
  }
  std::vector<double> scores(docs.size(), 0.0);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (std::size_t i = 0; i < dims.size(); ++i) {
      double df = 0;
      for (const auto& c : counts) df += c.count(dims[i]) ? 1 : 0;
      auto it = counts[d].find(dims[i]);
      const double cnt = it == counts[d].end() ? 0.0 : it->second;
      scores[d] += q[i] * oracle_weight(cnt, df, static_cast<double>(docs.size()), lens[d], avg, k, b);
    }
  }
  return scores;
}

}  // namespace

TEST_CASE("build_index on a single document", "[lexical][index]") {
  auto idx = build_index(docs_from({"Covid covid spread"}), FieldSource::Abstract);
  CHECK(idx.n_docs() == 1);
  CHECK(idx.doc_len(0) == 3);
  CHECK(idx.vocabulary_size() == 2);
  auto covid = idx.term_id("covid");
  auto spread = idx.term_id("spread");
  REQUIRE(covid);
  REQUIRE(spread);
  CHECK(std::vector<Posting>(idx.postings(*covid).begin(), idx.postings(*covid).end()) ==
        std::vector<Posting>{{0, 2}});
  CHECK(std::vector<Posting>(idx.postings(*spread).begin(), idx.postings(*spread).end()) ==
        std::vector<Posting>{{0, 1}});
}

TEST_CASE("build_index field selection and lengths", "[lexical][index]") {
  std::vector<Doc> docs{{"a", "", "masks reduce spread", ""}, {"b", "", "", "full text document"}};
  auto abs = build_index(docs, FieldSource::Abstract);
  CHECK(abs.doc_len(1) == 0);
  CHECK(abs.doc_terms(1).empty());
  CHECK(abs.avg_doc_len() == Approx((3.0 + 0.0) / 2.0));
  auto full = build_index(docs, FieldSource::FullText);
  CHECK(full.doc_len(0) == 0);
  CHECK(full.doc_len(1) == 3);  // "only" and "here" are stopwords? no: "full text document" minus stopwords
  CHECK(full.field_source() == FieldSource::FullText);

  CHECK_THROWS_AS(build_index(std::vector<Doc>{}, FieldSource::Abstract), Error);
  CHECK_THROWS_AS(abs.doc_len(7), Error);
}

TEST_CASE("index invariants on random corpora", "[lexical][index]") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    auto docs = random_corpus(rng, 30, 50);
    auto idx = build_index(docs, FieldSource::Abstract);
    double total = 0;
    for (std::uint32_t d = 0; d < idx.n_docs(); ++d) total += idx.doc_len(d);
    CHECK(idx.avg_doc_len() == Approx(total / static_cast<double>(idx.n_docs())).epsilon(1e-9));
    for (std::uint32_t t = 0; t < idx.vocabulary_size(); ++t) {
      CHECK(idx.doc_freq(t) == idx.postings(t).size());
      for (const auto& p : idx.postings(t)) CHECK(p.doc < idx.n_docs());
    }
  }
}

TEST_CASE("bm25_term_weight", "[lexical][bm25]") {
  auto idx = build_index(docs_from({"alpha beta", "beta gamma", "gamma delta"}), FieldSource::Abstract);
  BM25Params p;
  CHECK(bm25_term_weight("alpha", 1, idx, p) == 0.0);
  CHECK(bm25_term_weight("unknown", 0, idx, p) == 0.0);
  // cnt = 1 and m = m_avg collapse the saturation factor to one.
  for (double k : {0.0, 0.5, 1.2, 3.0})
    for (double b : {0.0, 0.3, 0.75, 1.0}) {
      BM25Params q{k, b};
      CHECK(bm25_term_weight("alpha", 0, idx, q) == bm25_idf(1, 3));
    }
  CHECK(bm25_idf(1, 3) == std::log(1.0 + (3 - 1 + 0.5) / (1 + 0.5)));
  CHECK_THROWS_AS(bm25_term_weight("alpha", 9, idx, p), Error);
}

TEST_CASE("bm25_term_weight matches a transcription of the formula", "[lexical][bm25]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> kd(0.0, 3.0);
  std::uniform_real_distribution<double> bd(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    auto docs = random_corpus(rng, 20, 30);
    auto idx = build_index(docs, FieldSource::Abstract);
    BM25Params p{kd(rng), bd(rng)};
    for (std::uint32_t d = 0; d < idx.n_docs(); ++d)
      for (const auto& tp : idx.doc_terms(d)) {
        const auto& term = idx.term(tp.doc);
        double want = oracle_weight(tp.count, idx.doc_freq(tp.doc), static_cast<double>(idx.n_docs()),
                                    idx.doc_len(d), idx.avg_doc_len(), p.k, p.b);
        CHECK(std::abs(bm25_term_weight(term, d, idx, p) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
      }
  }
}

TEST_CASE("bm25_term_weight grows with the count", "[lexical][bm25]") {
  // Same length, different counts of "covid".
  auto idx = build_index(docs_from({"covid mask mask mask", "covid covid mask mask", "covid covid covid mask",
                                    "other words entirely here"}),
                         FieldSource::Abstract);
  BM25Params p;
  double w1 = bm25_term_weight("covid", 0, idx, p);
  double w2 = bm25_term_weight("covid", 1, idx, p);
  double w3 = bm25_term_weight("covid", 2, idx, p);
  CHECK(w1 < w2);
  CHECK(w2 < w3);
}

TEST_CASE("bm25_score equals the materialized dot product", "[lexical][bm25]") {
  auto docs = docs_from({"covid vaccine trial", "vaccine efficacy trial results", "masks reduce covid spread",
                         "covid covid covid", "hospital capacity planning"});
  auto idx = build_index(docs, FieldSource::Abstract);
  BM25Params p;
  QuerySpec q;
  q.terms = tokenize("covid vaccine spread");
  auto want = materialized_scores(docs, q.terms, p.k, p.b);
  for (std::uint32_t d = 0; d < idx.n_docs(); ++d) CHECK(std::abs(bm25_score(q, d, idx, p) - want[d]) <= 1e-12);

  CHECK(bm25_score(QuerySpec{}, 0, idx, p) == 0.0);
  QuerySpec single;
  single.terms = {"vaccin"};
  CHECK(bm25_score(single, 1, idx, p) == bm25_term_weight("vaccin", 1, idx, p));
}

TEST_CASE("bm25 score-all kernels agree with per-document scores", "[lexical][bm25]") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> w(0, 199);
  for (int rep = 0; rep < 5; ++rep) {
    auto docs = random_corpus(rng, 300, 200);
    auto idx = build_index(docs, FieldSource::Abstract);
    BM25Params p{1.2, 0.75};
    QuerySpec q;
    for (int i = 0; i < 6; ++i) q.terms.push_back("x" + std::to_string(w(rng)));
    auto par = bm25_score_all(q, idx, p);
    auto ser = bm25_score_all_serial(q, idx, p);
    CHECK(par == ser);
    for (std::uint32_t d = 0; d < idx.n_docs(); ++d) CHECK(std::abs(par[d] - bm25_score(q, d, idx, p)) <= 1e-12);
  }
}

TEST_CASE("search ordering", "[lexical][search]") {
  auto idx = build_index(docs_from({"covid spread", "rare zoonotic origin", "covid masks", "masks covid"}),
                         FieldSource::Abstract);
  BM25Params p;
  QuerySpec q;
  q.terms = {"zoonot"};
  auto one = search(idx, q, p, 10);
  REQUIRE(one.size() == 1);
  CHECK(one[0].doc_id == "d1");
  CHECK(one[0].rank == 1);

  QuerySpec cm;
  cm.terms = {"covid", "mask"};
  auto all = search(idx, cm, p, 10);
  REQUIRE(all.size() == 3);
  // d2 and d3 tie exactly; ascending doc_id breaks it.
  CHECK(all[0].doc_id == "d2");
  CHECK(all[1].doc_id == "d3");
  CHECK(all[0].score == all[1].score);
  auto top1 = search(idx, cm, p, 1);
  REQUIRE(top1.size() == 1);
  CHECK(top1[0] == all[0]);
  CHECK_THROWS_AS(search(idx, cm, p, 0), Error);
}

TEST_CASE("search equals exhaustive scoring", "[lexical][search]") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> w(0, 39);
  for (int rep = 0; rep < 10; ++rep) {
    auto docs = random_corpus(rng, 60, 40);
    auto idx = build_index(docs, FieldSource::Abstract);
    BM25Params p;
    QuerySpec q;
    for (int i = 0; i < 3; ++i) q.terms.push_back("x" + std::to_string(w(rng)));
    std::vector<std::pair<double, std::string>> brute;
    for (std::uint32_t d = 0; d < idx.n_docs(); ++d) {
      double s = bm25_score(q, d, idx, p);
      if (s > 0) brute.push_back({-s, idx.doc_id(d)});
    }
    std::sort(brute.begin(), brute.end());
    auto got = search(idx, q, p, 15);
    REQUIRE(got.size() == std::min<std::size_t>(15, brute.size()));
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].doc_id == brute[i].second);
      CHECK(got[i].rank == static_cast<int>(i) + 1);
    }
  }
}

TEST_CASE("make_query", "[lexical][query]") {
  auto topic = parse_topics(read_file(testing::data_path("topic49.xml"))).at(0);
  auto q = make_query(topic, FieldCombo::parse("query"));
  CHECK(q.terms == tokenize("post-infection COVID-19 immunity"));
  CHECK(q.weights.empty());

  auto qq = make_query(topic, FieldCombo::parse("query+question"));
  auto want = tokenize(topic.query);
  for (const auto& t : tokenize(topic.question)) want.push_back(t);
  CHECK(qq.terms == want);
  // "immunity" in both fields plus "immune" in the question.
  CHECK(qq.vector().at("immun") == 3.0);

  Topic empty{7, "x", "", ""};
  CHECK_THROWS_AS(make_query(empty, FieldCombo::parse("question+narrative")), Error);
  CHECK_THROWS_AS(FieldCombo::parse("title"), Error);
  CHECK(FieldCombo::parse("query,narrative").to_string() == "query+narrative");
}

TEST_CASE("pseudo feedback picks the most informative terms", "[lexical][expansion]") {
  auto docs = docs_from({"covid vaccine trial vaccine", "covid antibody response", "weather report sunny"});
  auto idx = build_index(docs, FieldSource::Abstract);
  BM25Params p;
  QuerySpec q;
  q.terms = {"covid"};

  // Enumerate every feedback term and score it by hand.
  auto top = search(idx, q, p, 2);
  std::map<std::string, double> fcnt;
  double flen = 0;
  for (const auto& e : top)
    for (const auto& t : tokenize(docs[static_cast<std::size_t>(std::stoi(e.doc_id.substr(1)))].abstract)) {
      fcnt[t] += 1;
      flen += 1;
    }
  std::map<std::string, double> ccnt;
  double clen = 0;
  for (const auto& d : docs)
    for (const auto& t : tokenize(d.abstract)) {
      ccnt[t] += 1;
      clen += 1;
    }
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& [t, c] : fcnt) {
    if (t == "covid") continue;
    double pf = c / flen;
    double s = pf * std::log(pf / (ccnt[t] / clen));
    if (s > 0) scored.push_back({-s, t});
  }
  std::sort(scored.begin(), scored.end());

  auto ex = pseudo_feedback_expand(idx, q, p, 2, 3);
  REQUIRE(ex.added_terms.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(ex.added_terms[i] == scored[i].second);
    CHECK(ex.query.weight(scored[i].second) == Approx(scored[i].first / scored[0].first).epsilon(1e-12));
  }
  CHECK(ex.query.weight(ex.added_terms[0]) == 1.0);
  CHECK(ex.query.weight("covid") == 1.0);
  CHECK(ex.query.terms.front() == "covid");

  // Asking for more terms than exist adds everything available.
  auto all = pseudo_feedback_expand(idx, q, p, 2, 100);
  CHECK(all.added_terms.size() == scored.size());
  for (const auto& t : all.added_terms) CHECK(all.query.weight(t) > 0.0);
}

TEST_CASE("pseudo feedback with nothing new to add", "[lexical][expansion]") {
  auto idx = build_index(docs_from({"covid covid", "masks"}), FieldSource::Abstract);
  QuerySpec q;
  q.terms = {"covid"};
  auto ex = pseudo_feedback_expand(idx, q, BM25Params{}, 5, 10);
  CHECK(ex.added_terms.empty());
  CHECK(ex.query.terms == q.terms);

  QuerySpec none;
  none.terms = {"absent"};
  auto nf = pseudo_feedback_expand(idx, none, BM25Params{}, 5, 10);
  CHECK(nf.no_feedback);
  CHECK(nf.query.terms == none.terms);
  CHECK_THROWS_AS(pseudo_feedback_expand(idx, q, BM25Params{}, 0, 10), Error);
}

TEST_CASE("relevance feedback", "[lexical][expansion]") {
  auto docs = docs_from({"covid vaccine trial", "covid antibody response", "covid weather", "unrelated text"});
  auto idx = build_index(docs, FieldSource::Abstract);
  BM25Params p;
  QuerySpec q;
  q.terms = {"covid"};

  auto none = relevance_feedback_expand(idx, q, p, Qrels{}, 1, 10, 300);
  CHECK(none.no_feedback);
  CHECK(none.query.terms == q.terms);

  Qrels one;
  one.judgments[{1, "d1"}] = 2;
  one.judgments[{1, "d2"}] = 0;
  one.judgments[{2, "d0"}] = 1;  // other topic
  auto ex = relevance_feedback_expand(idx, q, p, one, 1, 10, 300);
  CHECK(ex.feedback_docs == 1);
  std::set<std::string> from_d1;
  for (const auto& t : tokenize(docs[1].abstract)) from_d1.insert(t);
  REQUIRE_FALSE(ex.added_terms.empty());
  for (const auto& t : ex.added_terms) CHECK(from_d1.count(t));

  // Shallow and deep feedback configurations.
  CHECK_NOTHROW(relevance_feedback_expand(idx, q, p, one, 1, 10, 300));
  CHECK_NOTHROW(relevance_feedback_expand(idx, q, p, one, 1, 30, 1000));
}

TEST_CASE("bm25 params validation", "[lexical][bm25]") {
  CHECK_NOTHROW(BM25Params{0.0, 0.0}.validate());
  CHECK_THROWS_AS((BM25Params{-1.0, 0.5}.validate()), Error);
  CHECK_THROWS_AS((BM25Params{1.0, 1.5}.validate()), Error);
}
