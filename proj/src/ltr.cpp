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

#include "rankfuse/ltr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "json_util.hpp"
#include "strings.hpp"

namespace rankfuse {

void LinearScorer::validate() const {
  for (double w : weights)
    if (!std::isfinite(w)) throw ValidationError("scorer has a non-finite weight");
  if (!std::isfinite(bias)) throw ValidationError("scorer has a non-finite bias");
}

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double pre_activation(const LinearScorer& scorer, std::span<const double> features) {
  if (features.size() != scorer.feature_dim())
    throw Error("feature vector has " + std::to_string(features.size()) + " components, scorer expects " +
                std::to_string(scorer.feature_dim()));
  double z = scorer.bias;
  for (std::size_t i = 0; i < features.size(); ++i) z += scorer.weights[i] * features[i];
  return z;
}

double linear_score(const LinearScorer& scorer, std::span<const double> features) {
  return logistic(pre_activation(scorer, features));
}

namespace {

double label_sum(std::span<const double> scores, std::span<const double> labels) {
  if (scores.empty()) throw Error("ranking loss needs at least one candidate");
  if (scores.size() != labels.size()) throw Error("scores and labels differ in length");
  double total = 0.0;
  for (double y : labels) {
    if (y < 0.0) throw Error("labels must be non-negative");
    total += y;
  }
  if (!(total > 0.0)) throw Error("ranking loss needs at least one positive label");
  return total;
}

// log softmax(s)_i, computed as (s_i - max) - log(sum exp(s_j - max)) so equal
// scores give exactly -log(n).
std::vector<double> log_softmax(std::span<const double> s) {
  const double m = *std::max_element(s.begin(), s.end());
  double acc = 0.0;
  for (double x : s) acc += std::exp(x - m);
  const double log_z = std::log(acc);
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = (s[i] - m) - log_z;
  return out;
}

}  // namespace

double softmax_ranking_loss(std::span<const double> scores, std::span<const double> labels) {
  const double total = label_sum(scores, labels);
  const auto log_p = log_softmax(scores);
  double loss = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (labels[i] > 0.0) loss -= labels[i] / total * log_p[i];
  return loss;
}

std::vector<double> loss_gradient(std::span<const double> scores, std::span<const double> labels) {
  const double total = label_sum(scores, labels);
  const auto log_p = log_softmax(scores);
  std::vector<double> g(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) g[i] = std::exp(log_p[i]) - labels[i] / total;
  return g;
}

void TrainingExample::validate() const {
  if (candidates.empty()) throw ValidationError("topic " + std::to_string(topic) + ": no candidates");
  const auto dim = candidates.front().features.size();
  bool positive = false;
  for (const auto& c : candidates) {
    if (c.features.size() != dim)
      throw ValidationError("topic " + std::to_string(topic) + ": inconsistent feature dimension for " + c.doc_id);
    if (c.label < 0.0) throw ValidationError("topic " + std::to_string(topic) + ": negative label for " + c.doc_id);
    positive = positive || c.label > 0.0;
  }
  if (!positive) throw ValidationError("topic " + std::to_string(topic) + ": no positive candidate");
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw Error("uniform_below: empty range");
  // Rejection sampling over the largest multiple of n.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

SampledCandidates sample_candidates(const TrainingExample& example, std::size_t l, std::uint64_t seed) {
  if (l < 2) throw Error("candidate subset size l must be at least 2");
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < example.candidates.size(); ++i)
    (example.candidates[i].label > 0.0 ? positives : negatives).push_back(i);
  if (positives.empty()) throw Error("topic " + std::to_string(example.topic) + ": no positive candidate");

  std::mt19937_64 rng(seed);
  SampledCandidates out;
  out.example.topic = example.topic;
  out.example.candidates.push_back(example.candidates[positives[uniform_below(rng, positives.size())]]);

  // Partial Fisher-Yates: the first `take` slots become a uniform sample without replacement.
  const std::size_t take = std::min(l - 1, negatives.size());
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = i + uniform_below(rng, negatives.size() - i);
    std::swap(negatives[i], negatives[j]);
    out.example.candidates.push_back(example.candidates[negatives[i]]);
  }
  out.no_negatives = negatives.empty();
  return out;
}

namespace {

std::vector<double> candidate_scores(const LinearScorer& scorer, const TrainingExample& ex, LossInput input) {
  std::vector<double> s;
  s.reserve(ex.candidates.size());
  for (const auto& c : ex.candidates) {
    const double z = pre_activation(scorer, c.features);
    s.push_back(input == LossInput::Sigmoid ? logistic(z) : z);
  }
  return s;
}

std::vector<double> candidate_labels(const TrainingExample& ex) {
  std::vector<double> y;
  y.reserve(ex.candidates.size());
  for (const auto& c : ex.candidates) y.push_back(c.label);
  return y;
}

}  // namespace

LinearScorer train_linear(std::span<const TrainingExample> examples, const TrainOptions& options) {
  if (examples.empty()) throw Error("training needs at least one example");
  if (options.steps == 0) throw Error("training needs at least one step");
  if (!std::isfinite(options.learning_rate)) throw Error("learning rate must be finite");
  for (const auto& ex : examples) ex.validate();
  const auto dim = examples.front().candidates.front().features.size();
  for (const auto& ex : examples)
    if (ex.candidates.front().features.size() != dim)
      throw ValidationError("topic " + std::to_string(ex.topic) + ": feature dimension differs from other examples");

  LinearScorer scorer;
  scorer.weights.assign(dim, 0.0);
  std::mt19937_64 rng(options.seed);
  for (std::size_t step = 0; step < options.steps; ++step) {
    const auto& ex = examples[uniform_below(rng, examples.size())];
    const auto subset = sample_candidates(ex, options.l, rng()).example;

    std::vector<double> z;
    for (const auto& c : subset.candidates) z.push_back(pre_activation(scorer, c.features));
    std::vector<double> s = z;
    if (options.loss_input == LossInput::Sigmoid)
      for (auto& v : s) v = logistic(v);
    auto g = loss_gradient(s, candidate_labels(subset));

    std::vector<double> grad_w(dim, 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < subset.candidates.size(); ++i) {
      double dz = g[i];
      if (options.loss_input == LossInput::Sigmoid) dz *= s[i] * (1.0 - s[i]);
      for (std::size_t j = 0; j < dim; ++j) grad_w[j] += dz * subset.candidates[i].features[j];
      grad_b += dz;
    }
    for (std::size_t j = 0; j < dim; ++j) scorer.weights[j] -= options.learning_rate * grad_w[j];
    scorer.bias -= options.learning_rate * grad_b;
  }
  return scorer;
}

double mean_loss(const LinearScorer& scorer, std::span<const TrainingExample> examples, LossInput input) {
  if (examples.empty()) throw Error("mean_loss needs at least one example");
  double total = 0.0;
  for (const auto& ex : examples) total += softmax_ranking_loss(candidate_scores(scorer, ex, input), candidate_labels(ex));
  return total / static_cast<double>(examples.size());
}

std::string scorer_to_json(const LinearScorer& scorer) {
  detail::json j;
  j["feature_dim"] = scorer.feature_dim();
  j["W"] = scorer.weights;
  j["bias"] = scorer.bias;
  return j.dump() + "\n";
}

LinearScorer scorer_from_json(std::string_view text) {
  auto j = detail::parse_json(text, "scorer");
  if (!j.is_object()) throw ValidationError("scorer: expected a JSON object");
  LinearScorer s;
  const auto dim = detail::get_as<std::size_t>(j, "feature_dim", "scorer");
  s.weights = detail::get_as<std::vector<double>>(j, "W", "scorer");
  s.bias = detail::get_as<double>(j, "bias", "scorer");
  if (s.weights.size() != dim)
    throw ValidationError("scorer: W has " + std::to_string(s.weights.size()) + " entries but feature_dim is " +
                          std::to_string(dim));
  s.validate();
  return s;
}

std::vector<FeatureRecord> parse_feature_file(std::string_view jsonl) {
  std::vector<FeatureRecord> out;
  detail::for_each_line(jsonl, [&](std::string_view line, std::size_t lineno) {
    if (detail::split_ws(line).empty()) return;
    detail::json j;
    try {
      j = detail::json::parse(line);
    } catch (const detail::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    const std::string where = "line " + std::to_string(lineno);
    if (!j.is_object()) throw ParseError("expected a JSON object", lineno);
    FeatureRecord r;
    r.topic = detail::get_as<TopicNumber>(j, "topic", where);
    r.doc_id = detail::get_as<std::string>(j, "doc_id", where);
    r.features = detail::get_as<std::vector<double>>(j, "features", where);
    r.label = detail::get_or<double>(j, "label", 0.0, where);
    if (r.label < 0.0) throw ParseError("negative label", lineno);
    if (!out.empty() && out.front().features.size() != r.features.size())
      throw ParseError("feature dimension " + std::to_string(r.features.size()) + " differs from first record (" +
                           std::to_string(out.front().features.size()) + ")",
                       lineno);
    for (double f : r.features)
      if (!std::isfinite(f)) throw ParseError("non-finite feature", lineno);
    out.push_back(std::move(r));
  });
  return out;
}

std::string write_feature_file(std::span<const FeatureRecord> records) {
  std::string out;
  for (const auto& r : records) {
    detail::json j;
    j["topic"] = r.topic;
    j["doc_id"] = r.doc_id;
    j["features"] = r.features;
    j["label"] = r.label;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<TrainingExample> group_examples(std::span<const FeatureRecord> records, std::size_t* skipped) {
  std::map<TopicNumber, TrainingExample> by_topic;
  for (const auto& r : records) {
    auto& ex = by_topic[r.topic];
    ex.topic = r.topic;
    ex.candidates.push_back({r.doc_id, r.features, r.label});
  }
  std::vector<TrainingExample> out;
  std::size_t dropped = 0;
  for (auto& [_, ex] : by_topic) {
    const bool positive =
        std::any_of(ex.candidates.begin(), ex.candidates.end(), [](const Candidate& c) { return c.label > 0.0; });
    if (positive) out.push_back(std::move(ex));
    else ++dropped;
  }
  if (skipped) *skipped = dropped;
  return out;
}

std::vector<double> overlap_features(const InvertedIndex& index, const QuerySpec& query, std::uint32_t doc_ordinal,
                                     const BM25Params& params) {
  const auto len = index.doc_len(doc_ordinal);
  const auto qvec = query.vector();
  std::size_t present = 0;
  double log_tf = 0.0;
  for (const auto& [term, _] : qvec) {
    auto id = index.term_id(term);
    if (!id) continue;
    const auto c = index.count(*id, doc_ordinal);
    if (c > 0) ++present;
    log_tf += std::log1p(static_cast<double>(c));
  }
  const double distinct = qvec.empty() ? 1.0 : static_cast<double>(qvec.size());
  return {bm25_score(query, doc_ordinal, index, params), static_cast<double>(present) / distinct, log_tf / distinct,
          std::log1p(static_cast<double>(len))};
}

}  // namespace rankfuse
