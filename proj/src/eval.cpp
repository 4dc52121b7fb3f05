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

#include "rankfuse/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>

#include "json_util.hpp"
#include "strings.hpp"

namespace rankfuse {

namespace {

const std::vector<RunEntry>& entries_of(const Run& run, TopicNumber topic) {
  static const std::vector<RunEntry> kEmpty;
  auto it = run.topics.find(topic);
  return it == run.topics.end() ? kEmpty : it->second;
}

/// Calls fn(doc_id, grade) for every judgment of one topic.
template <typename Fn>
void for_each_judgment(const Qrels& qrels, TopicNumber topic, Fn&& fn) {
  for (auto it = qrels.judgments.lower_bound({topic, std::string()});
       it != qrels.judgments.end() && it->first.first == topic; ++it)
    fn(it->first.second, it->second);
}

std::size_t relevant_count(const Qrels& qrels, TopicNumber topic) {
  std::size_t r = 0;
  for_each_judgment(qrels, topic, [&](const std::string&, int g) { r += g >= 1; });
  return r;
}

bool relevant(const Qrels& qrels, TopicNumber topic, const std::string& doc) { return qrels.grade(topic, doc) >= 1; }

std::string cutoff_name(const char* prefix, std::size_t k) { return prefix + std::to_string(k); }

}  // namespace

double precision_at_k(const Run& run, const Qrels& qrels, std::size_t k, TopicNumber topic) {
  if (k == 0) throw Error("precision cutoff must be at least 1");
  const auto& entries = entries_of(run, topic);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, entries.size()); ++i) hits += relevant(qrels, topic, entries[i].doc_id);
  return static_cast<double>(hits) / static_cast<double>(k);
}

std::optional<double> average_precision(const Run& run, const Qrels& qrels, TopicNumber topic) {
  const auto r = relevant_count(qrels, topic);
  if (r == 0) return std::nullopt;
  const auto& entries = entries_of(run, topic);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!relevant(qrels, topic, entries[i].doc_id)) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(r);
}

std::optional<double> ndcg_at_k(const Run& run, const Qrels& qrels, std::size_t k, TopicNumber topic) {
  if (k == 0) throw Error("nDCG cutoff must be at least 1");
  std::vector<int> ideal;
  for_each_judgment(qrels, topic, [&](const std::string&, int g) {
    if (g > 0) ideal.push_back(g);
  });
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) idcg += ideal[i] / std::log2(static_cast<double>(i) + 2.0);
  if (idcg == 0.0) return std::nullopt;

  const auto& entries = entries_of(run, topic);
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, entries.size()); ++i) {
    const int g = qrels.grade(topic, entries[i].doc_id);
    if (g > 0) dcg += g / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg / idcg;
}

std::optional<double> recall_at_k(const Run& run, const Qrels& qrels, std::size_t k, TopicNumber topic) {
  if (k == 0) throw Error("recall cutoff must be at least 1");
  const auto r = relevant_count(qrels, topic);
  if (r == 0) return std::nullopt;
  const auto& entries = entries_of(run, topic);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, entries.size()); ++i) hits += relevant(qrels, topic, entries[i].doc_id);
  return static_cast<double>(hits) / static_cast<double>(r);
}

const EvalResult& EvalReport::metric(std::string_view name) const {
  for (const auto& m : metrics)
    if (m.metric == name) return m;
  throw Error("report has no metric '" + std::string(name) + "'");
}

EvalReport evaluate(const Run& run, const Qrels& qrels, const EvalCutoffs& cutoffs) {
  EvalReport report;
  std::vector<TopicNumber> topics;
  for (const auto& [t, _] : run.topics) {
    if (relevant_count(qrels, t) > 0) topics.push_back(t);
    else report.excluded_topics.push_back(t);
  }
  if (topics.empty()) throw Error("no evaluable topics: no run topic has a relevant judgment");

  constexpr std::size_t kMetrics = 4;
  std::vector<std::array<double, kMetrics>> values(topics.size());
  const auto n = static_cast<std::int64_t>(topics.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto t = topics[static_cast<std::size_t>(i)];
    values[static_cast<std::size_t>(i)] = {*ndcg_at_k(run, qrels, cutoffs.ndcg, t),
                                           precision_at_k(run, qrels, cutoffs.precision, t),
                                           *average_precision(run, qrels, t),
                                           *recall_at_k(run, qrels, cutoffs.recall, t)};
  }

  const std::string names[kMetrics] = {cutoff_name("ndcg_cut_", cutoffs.ndcg), cutoff_name("P_", cutoffs.precision),
                                       "map", cutoff_name("recall_", cutoffs.recall)};
  for (std::size_t m = 0; m < kMetrics; ++m) {
    EvalResult r;
    r.metric = names[m];
    double sum = 0.0;
    for (std::size_t i = 0; i < topics.size(); ++i) {
      r.per_topic.emplace(topics[i], values[i][m]);
      sum += values[i][m];
    }
    r.mean = sum / static_cast<double>(topics.size());
    report.metrics.push_back(std::move(r));
  }
  return report;
}

Run residual_filter(const Run& run, const Qrels& prior) {
  Run out;
  out.tag = run.tag;
  for (const auto& [topic, entries] : run.topics) {
    auto& dst = out.topics[topic];
    for (const auto& e : entries) {
      if (prior.grade(topic, e.doc_id) >= 0) continue;
      dst.push_back({e.doc_id, static_cast<int>(dst.size()) + 1, e.score});
    }
  }
  return out;
}

Qrels residual_filter_qrels(const Qrels& current, const Qrels& prior) {
  Qrels out;
  for (const auto& [key, grade] : current.judgments)
    if (!prior.judgments.count(key)) out.judgments.emplace(key, grade);
  return out;
}

std::string format_report_tsv(const EvalReport& report) {
  std::string out;
  for (const auto& m : report.metrics) {
    for (const auto& [t, v] : m.per_topic) out += m.metric + "\t" + std::to_string(t) + "\t" + detail::format_fixed(v, 6) + "\n";
    out += m.metric + "\tall\t" + detail::format_fixed(m.mean, 6) + "\n";
  }
  return out;
}

std::string format_report_json(const EvalReport& report) {
  detail::json j;
  j["metrics"] = detail::json::array();
  for (const auto& m : report.metrics) {
    detail::json per_topic = detail::json::object();
    for (const auto& [t, v] : m.per_topic) per_topic[std::to_string(t)] = v;
    j["metrics"].push_back({{"metric", m.metric}, {"mean", m.mean}, {"per_topic", per_topic}});
  }
  j["excluded_topics"] = report.excluded_topics;
  return j.dump(2) + "\n";
}

std::map<TopicNumber, double> parse_report_metric(std::string_view tsv, std::string_view metric) {
  std::map<TopicNumber, double> out;
  detail::for_each_line(tsv, [&](std::string_view line, std::size_t lineno) {
    auto cols = detail::split_ws(line);
    if (cols.empty()) return;
    if (cols.size() != 3) throw ParseError("expected `metric topic value`", lineno);
    if (cols[0] != metric || cols[1] == "all") return;
    auto t = detail::parse_int<TopicNumber>(cols[1]);
    auto v = detail::parse_double(cols[2]);
    if (!t || !v) throw ParseError("bad report line", lineno);
    out[*t] = *v;
  });
  if (out.empty()) throw Error("report has no per-topic values for metric '" + std::string(metric) + "'");
  return out;
}

}  // namespace rankfuse
