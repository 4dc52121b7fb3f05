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

#include "rankfuse/pipeline.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>

#include "json_util.hpp"
#include "rankfuse/corpus_io.hpp"
#include "rankfuse/stats.hpp"
#include "strings.hpp"

namespace rankfuse {

FusionMode parse_fusion_mode(std::string_view name) {
  if (name == "flat") return FusionMode::Flat;
  if (name == "hierarchical") return FusionMode::Hierarchical;
  if (name == "weighted") return FusionMode::Weighted;
  throw Error("unknown fusion mode '" + std::string(name) + "' (expected flat, hierarchical or weighted)");
}

std::string_view to_string(FusionMode mode) {
  switch (mode) {
    case FusionMode::Flat: return "flat";
    case FusionMode::Hierarchical: return "hierarchical";
    case FusionMode::Weighted: return "weighted";
  }
  return "";
}

std::string_view default_fusion_tag(FusionMode mode) {
  switch (mode) {
    case FusionMode::Flat: return "RRF";
    case FusionMode::Hierarchical: return "h-RRF";
    case FusionMode::Weighted: return "h_w-RRF";
  }
  return "";
}

Run fuse_pools(std::span<const RunPool> pools, FusionMode mode, const FusionParams& params, std::string tag) {
  switch (mode) {
    case FusionMode::Flat: {
      std::vector<Run> all;
      for (const auto& p : pools) all.insert(all.end(), p.runs.begin(), p.runs.end());
      return rrf_fuse(all, params, std::move(tag));
    }
    case FusionMode::Hierarchical:
      return hierarchical_fuse(pools, params, std::move(tag));
    case FusionMode::Weighted:
      return weighted_hierarchical_fuse(pools, params, std::move(tag));
  }
  throw Error("unknown fusion mode");
}

ExpansionSpec ExpansionSpec::parse(std::string_view text) {
  auto colon = text.find(':');
  auto comma = text.find(',', colon == std::string_view::npos ? 0 : colon);
  if (colon == std::string_view::npos || comma == std::string_view::npos)
    throw Error("expansion must look like pseudo:DOCS,TERMS or relevance:DOCS,TERMS, got '" + std::string(text) + "'");
  ExpansionSpec s;
  auto kind = text.substr(0, colon);
  if (kind == "pseudo") s.kind = Kind::Pseudo;
  else if (kind == "relevance") s.kind = Kind::Relevance;
  else throw Error("unknown expansion kind '" + std::string(kind) + "'");
  auto docs = detail::parse_int<std::size_t>(text.substr(colon + 1, comma - colon - 1));
  auto terms = detail::parse_int<std::size_t>(text.substr(comma + 1));
  if (!docs || !terms || *docs == 0 || *terms == 0)
    throw Error("expansion document and term counts must be positive integers in '" + std::string(text) + "'");
  s.n_docs = *docs;
  s.n_terms = *terms;
  return s;
}

Run batch_search(const InvertedIndex& index, std::span<const Topic> topics, const SearchOptions& options,
                 const Qrels* qrels) {
  options.bm25.validate();
  if (options.k == 0) throw Error("search depth must be at least 1");
  if (options.expand && options.expand->kind == ExpansionSpec::Kind::Relevance && !qrels)
    throw Error("relevance feedback needs qrels");

  std::vector<QuerySpec> queries;
  queries.reserve(topics.size());
  for (const auto& t : topics) queries.push_back(make_query(t, options.fields));

  std::vector<std::vector<RunEntry>> results(topics.size());
  const auto n = static_cast<std::int64_t>(topics.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    QuerySpec q = queries[idx];
    if (options.expand) {
      const auto& e = *options.expand;
      q = e.kind == ExpansionSpec::Kind::Pseudo
              ? pseudo_feedback_expand(index, q, options.bm25, e.n_docs, e.n_terms).query
              : relevance_feedback_expand(index, q, options.bm25, *qrels, topics[idx].number, e.n_docs, e.n_terms)
                    .query;
    }
    results[idx] = search(index, q, options.bm25, options.k);
  }

  Run run;
  run.tag = options.tag;
  for (std::size_t i = 0; i < topics.size(); ++i) run.topics.emplace(topics[i].number, std::move(results[i]));
  return run;
}

Run batch_dense_search(const DenseStore& store, std::size_t k, std::string tag) {
  Run run;
  run.tag = std::move(tag);
  for (const auto& [t, _] : store.topics()) run.topics.emplace(t, dense_search(store, t, k));
  return run;
}

Run batch_hybrid_search(const DenseStore& store, const InvertedIndex& index, std::span<const Topic> topics,
                        const FieldCombo& fields, const HybridParams& params, std::size_t k, std::string tag) {
  params.validate();
  Run run;
  run.tag = std::move(tag);
  for (const auto& t : topics) run.topics.emplace(t.number, hybrid_search(store, index, t, fields, params, k).entries);
  return run;
}

namespace {

const Topic& find_topic(std::span<const Topic> topics, TopicNumber number) {
  for (const auto& t : topics)
    if (t.number == number) return t;
  throw Error("run references topic " + std::to_string(number) + " which is not in the topic file");
}

}  // namespace

std::vector<FeatureRecord> build_features(const InvertedIndex& index, std::span<const Topic> topics,
                                          const FieldCombo& fields, const BM25Params& bm25, const Run& candidates,
                                          std::size_t depth, const Qrels* labels) {
  std::vector<FeatureRecord> out;
  for (const auto& [topic, entries] : candidates.topics) {
    const auto query = make_query(find_topic(topics, topic), fields);
    for (std::size_t i = 0; i < std::min(depth, entries.size()); ++i) {
      const auto& doc = entries[i].doc_id;
      auto ord = index.ordinal(doc);
      if (!ord) throw Error("document " + doc + " of topic " + std::to_string(topic) + " is not in the index");
      FeatureRecord r;
      r.topic = topic;
      r.doc_id = doc;
      r.features = overlap_features(index, query, *ord, bm25);
      if (labels) r.label = std::max(0, labels->grade(topic, doc));
      out.push_back(std::move(r));
    }
  }
  return out;
}

Run score_features(const LinearScorer& scorer, std::span<const FeatureRecord> records, std::string tag) {
  std::map<TopicNumber, std::vector<ScoredDoc>> by_topic;
  std::set<std::pair<TopicNumber, std::string>> seen;
  for (const auto& r : records) {
    if (!seen.insert({r.topic, r.doc_id}).second)
      throw Error("duplicate feature record for topic " + std::to_string(r.topic) + ", document " + r.doc_id);
    by_topic[r.topic].push_back({r.doc_id, linear_score(scorer, r.features)});
  }
  Run run;
  run.tag = std::move(tag);
  for (auto& [t, docs] : by_topic) {
    rank_top_k(docs, docs.size());
    run.topics.emplace(t, to_run_entries(docs));
  }
  return run;
}

Run rescore_with_features(const Run& run, std::size_t depth, const LinearScorer& scorer,
                          std::span<const FeatureRecord> records, std::string tag) {
  std::map<std::pair<TopicNumber, std::string>, const FeatureRecord*> lookup;
  for (const auto& r : records) lookup[{r.topic, r.doc_id}] = &r;
  auto out = rescore_top(run, depth, [&](TopicNumber t, const std::string& doc) -> std::optional<double> {
    auto it = lookup.find({t, doc});
    if (it == lookup.end()) return std::nullopt;
    return linear_score(scorer, it->second->features);
  });
  out.tag = std::move(tag);
  return out;
}

AblationConfig parse_ablation_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  using detail::get_as;
  using detail::get_or;
  auto j = detail::parse_json(json_text, "ablation config");
  if (!j.is_object()) throw ValidationError("ablation config: expected a JSON object");
  AblationConfig c;
  c.base_dir = base_dir;
  if (!j.contains("pools")) throw ValidationError("ablation config: missing 'pools'");
  c.pools = detail::pool_specs_from_json(j.at("pools"), "pools");
  c.fusion.k = get_or<double>(j, "k", 60.0, "config");
  c.fusion.depth = get_or<std::size_t>(j, "depth", 0, "config");
  c.qrels = base_dir / get_as<std::string>(j, "qrels", "config");
  if (j.contains("prior_qrels") && !j.at("prior_qrels").is_null())
    c.prior_qrels = base_dir / get_as<std::string>(j, "prior_qrels", "config");
  if (j.contains("cutoffs")) {
    const auto& cj = j.at("cutoffs");
    c.cutoffs.ndcg = get_or<std::size_t>(cj, "ndcg", 20, "cutoffs");
    c.cutoffs.precision = get_or<std::size_t>(cj, "precision", 20, "cutoffs");
    c.cutoffs.recall = get_or<std::size_t>(cj, "recall", 1000, "cutoffs");
  }
  if (!j.contains("ablations") || !j.at("ablations").is_array() || j.at("ablations").empty())
    throw ValidationError("ablation config: 'ablations' must be a non-empty array");
  std::set<std::string> pool_names;
  for (const auto& p : c.pools) pool_names.insert(p.system_name);
  std::set<std::string> row_names;
  for (std::size_t i = 0; i < j.at("ablations").size(); ++i) {
    const auto& rj = j.at("ablations")[i];
    const auto where = "ablations[" + std::to_string(i) + "]";
    AblationRow row;
    row.name = get_as<std::string>(rj, "name", where);
    row.pools = get_as<std::vector<std::string>>(rj, "pools", where);
    row.mode = parse_fusion_mode(get_or<std::string>(rj, "mode", "weighted", where));
    if (row.pools.empty()) throw ValidationError(where + ".pools: empty");
    for (const auto& p : row.pools)
      if (!pool_names.count(p)) throw ValidationError(where + ".pools: unknown pool '" + p + "'");
    if (!row_names.insert(row.name).second) throw ValidationError(where + ".name: duplicate '" + row.name + "'");
    c.rows.push_back(std::move(row));
  }
  c.baseline = get_or<std::string>(j, "baseline", c.rows.front().name, "config");
  if (!row_names.count(c.baseline)) throw ValidationError("config.baseline: no row named '" + c.baseline + "'");
  return c;
}

AblationResult run_ablation(std::span<const RunPool> pools, std::span<const AblationRow> rows,
                            const std::string& baseline, const FusionParams& fusion, const Qrels& qrels,
                            const EvalCutoffs& cutoffs, double alpha, const Qrels* prior) {
  std::map<std::string, const RunPool*> by_name;
  for (const auto& p : pools) by_name[p.system_name] = &p;

  const Qrels eval_qrels = prior ? residual_filter_qrels(qrels, *prior) : qrels;
  AblationResult result;
  std::vector<EvalReport> reports;
  for (const auto& row : rows) {
    std::vector<RunPool> selected;
    std::size_t n_runs = 0;
    for (const auto& name : row.pools) {
      auto it = by_name.find(name);
      if (it == by_name.end()) throw Error("ablation row '" + row.name + "' names unknown pool '" + name + "'");
      selected.push_back(*it->second);
      n_runs += it->second->runs.size();
    }
    auto fused = fuse_pools(selected, row.mode, fusion, row.name);
    if (prior) fused = residual_filter(fused, *prior);
    reports.push_back(evaluate(fused, eval_qrels, cutoffs));
    AblationResult::Row r;
    r.name = row.name;
    r.mode = row.mode;
    r.n_runs = n_runs;
    for (const auto& m : reports.back().metrics) r.means.push_back(m.mean);
    result.rows.push_back(std::move(r));
  }
  for (const auto& m : reports.front().metrics) result.metrics.push_back(m.metric);

  std::size_t base = rows.size();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].name == baseline) base = i;
  if (base == rows.size()) throw Error("ablation baseline '" + baseline + "' is not a row");

  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = result.rows[i];
    row.significant.assign(result.metrics.size(), false);
    if (i == base) continue;
    for (std::size_t m = 0; m < result.metrics.size(); ++m) {
      const auto& a = reports[i].metrics[m].per_topic;
      const auto& b = reports[base].metrics[m].per_topic;
      std::map<TopicNumber, double> ca;
      std::map<TopicNumber, double> cb;
      for (const auto& [t, v] : a) {
        auto it = b.find(t);
        if (it == b.end()) continue;
        ca.emplace(t, v);
        cb.emplace(t, it->second);
      }
      if (ca.size() < 2) continue;
      row.significant[m] = paired_t_test(ca, cb).p_value < alpha;
    }
  }
  return result;
}

std::string format_ablation_table(const AblationResult& result) {
  std::string out = "name\tmode\truns";
  for (const auto& m : result.metrics) out += "\t" + m;
  out += "\n";
  for (const auto& row : result.rows) {
    out += row.name + "\t" + std::string(default_fusion_tag(row.mode)) + "\t" + std::to_string(row.n_runs);
    for (std::size_t m = 0; m < row.means.size(); ++m) {
      out += "\t" + detail::format_fixed(row.means[m], 4);
      if (row.significant[m]) out += "*";
    }
    out += "\n";
  }
  return out;
}

ExperimentConfig parse_experiment_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  using detail::get_as;
  using detail::get_or;
  auto j = detail::parse_json(json_text, "experiment config");
  if (!j.is_object()) throw ValidationError("experiment config: expected a JSON object");
  auto path = [&](const char* key) { return base_dir / get_as<std::string>(j, key, "config"); };

  ExperimentConfig c;
  c.corpus = path("corpus");
  c.topics = path("topics");
  c.qrels = path("qrels");
  c.train_qrels = path("train_qrels");
  if (j.contains("vectors")) c.vectors = path("vectors");
  c.output_dir = path("output_dir");
  c.residual = get_or<bool>(j, "residual", false, "config");
  c.fusion.k = get_or<double>(j, "fusion_k", 60.0, "config");
  c.fusion.depth = get_or<std::size_t>(j, "depth", 1000, "config");
  c.k = get_or<std::size_t>(j, "k", 1000, "config");
  c.bm25.k = get_or<double>(j, "bm25_k", 1.2, "config");
  c.bm25.b = get_or<double>(j, "bm25_b", 0.75, "config");
  if (j.contains("cutoffs")) {
    const auto& cj = j.at("cutoffs");
    c.cutoffs.ndcg = get_or<std::size_t>(cj, "ndcg", 20, "cutoffs");
    c.cutoffs.precision = get_or<std::size_t>(cj, "precision", 20, "cutoffs");
    c.cutoffs.recall = get_or<std::size_t>(cj, "recall", 1000, "cutoffs");
  }

  if (!j.contains("retrieval") || !j.at("retrieval").is_array() || j.at("retrieval").empty())
    throw ValidationError("config.retrieval: must be a non-empty array");
  std::set<std::string> tags;
  for (std::size_t i = 0; i < j.at("retrieval").size(); ++i) {
    const auto& rj = j.at("retrieval")[i];
    const auto where = "retrieval[" + std::to_string(i) + "]";
    RetrievalSpec r;
    const auto kind = get_or<std::string>(rj, "kind", "bm25", where);
    if (kind == "bm25") r.kind = RetrievalSpec::Kind::Bm25;
    else if (kind == "dense") r.kind = RetrievalSpec::Kind::Dense;
    else if (kind == "hybrid") r.kind = RetrievalSpec::Kind::Hybrid;
    else throw ValidationError(where + ".kind: unknown '" + kind + "'");
    r.system = get_as<std::string>(rj, "system", where);
    r.tag = get_as<std::string>(rj, "tag", where);
    if (!tags.insert(r.tag).second) throw ValidationError(where + ".tag: duplicate '" + r.tag + "'");
    r.index = parse_field_source(get_or<std::string>(rj, "index", "abstract", where));
    r.fields = FieldCombo::parse(get_or<std::string>(rj, "fields", "query", where));
    if (rj.contains("expand")) r.expand = ExpansionSpec::parse(get_as<std::string>(rj, "expand", where));
    r.lambda = get_or<double>(rj, "lambda", 1.0, where);
    if (r.kind != RetrievalSpec::Kind::Bm25 && !c.vectors)
      throw ValidationError(where + ": dense and hybrid retrieval need 'vectors'");
    c.retrieval.push_back(std::move(r));
  }

  if (j.contains("rescore")) {
    const auto& sj = j.at("rescore");
    c.rescore.system = get_or<std::string>(sj, "system", "ltr", "rescore");
    c.rescore.depth = get_or<std::size_t>(sj, "depth", 50, "rescore");
    c.rescore.index = parse_field_source(get_or<std::string>(sj, "index", "abstract", "rescore"));
    c.rescore.fields = FieldCombo::parse(get_or<std::string>(sj, "fields", "query+question", "rescore"));
    c.rescore.train.l = get_or<std::size_t>(sj, "l", 12, "rescore");
    c.rescore.train.steps = get_or<std::size_t>(sj, "steps", 500, "rescore");
    c.rescore.train.learning_rate = get_or<double>(sj, "learning_rate", 0.1, "rescore");
    c.rescore.train.seed = get_or<std::uint64_t>(sj, "seed", 0, "rescore");
  }
  return c;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result;
  const auto& out = config.output_dir;
  auto emit = [&](const std::filesystem::path& rel, const std::string& text) {
    write_file(out / rel, text);
    result.written.push_back(out / rel);
  };

  const auto corpus = load_corpus(read_file(config.corpus));
  const auto topics = parse_topics(read_file(config.topics));
  const auto qrels = parse_qrels(read_file(config.qrels)).qrels;
  const auto train_qrels = parse_qrels(read_file(config.train_qrels)).qrels;
  std::optional<DenseStore> store;
  if (config.vectors) store = load_vectors(*config.vectors);

  std::map<FieldSource, InvertedIndex> indices;
  auto index_for = [&](FieldSource f) -> const InvertedIndex& {
    auto it = indices.find(f);
    if (it != indices.end()) return it->second;
    auto& idx = indices.emplace(f, build_index(corpus, f)).first->second;
    emit("index." + std::string(to_string(f)) + ".bin", serialize_index(idx));
    return idx;
  };

  // First stage: every configured retrieval run, grouped into pools by system.
  std::vector<RunPool> pools;
  auto pool_for = [&](const std::string& system) -> RunPool& {
    for (auto& p : pools)
      if (p.system_name == system) return p;
    pools.push_back(RunPool{system, {}, 1.0, false});
    return pools.back();
  };
  for (const auto& spec : config.retrieval) {
    Run run;
    switch (spec.kind) {
      case RetrievalSpec::Kind::Bm25: {
        SearchOptions opts;
        opts.fields = spec.fields;
        opts.bm25 = config.bm25;
        opts.k = config.k;
        opts.tag = spec.tag;
        opts.expand = spec.expand;
        run = batch_search(index_for(spec.index), topics, opts, &train_qrels);
        break;
      }
      case RetrievalSpec::Kind::Dense:
        run = batch_dense_search(*store, config.k, spec.tag);
        break;
      case RetrievalSpec::Kind::Hybrid:
        run = batch_hybrid_search(*store, index_for(spec.index), topics, spec.fields,
                                  HybridParams{spec.lambda, config.bm25}, config.k, spec.tag);
        break;
    }
    emit("runs/" + spec.tag + ".run", write_run(run));
    auto& pool = pool_for(spec.system);
    pool.runs.push_back(std::move(run));
    if (spec.expand && spec.expand->kind == ExpansionSpec::Kind::Relevance) pool.uses_relevance_judgments = true;
  }

  // Candidate run for the rescorer.
  const auto candidates = hierarchical_fuse(pools, config.fusion, "h-RRF");
  emit("runs/h-RRF.run", write_run(candidates));

  const auto& rescore_index = index_for(config.rescore.index);
  const auto features = build_features(rescore_index, topics, config.rescore.fields, config.bm25, candidates,
                                        config.rescore.depth, &train_qrels);
  emit("features.jsonl", write_feature_file(features));
  const auto examples = group_examples(features);
  if (examples.empty()) throw Error("no topic has a judged-relevant candidate to train the rescorer on");
  const auto scorer = train_linear(examples, config.rescore.train);
  emit("scorer.json", scorer_to_json(scorer));
  auto rescored = rescore_with_features(candidates, config.rescore.depth, scorer, features, config.rescore.system);
  emit("runs/" + config.rescore.system + ".run", write_run(rescored));

  RunPool ltr_pool{config.rescore.system, {std::move(rescored)}, 1.0, true};
  pools.push_back(std::move(ltr_pool));
  pools = default_weights(std::move(pools));
  result.final_run = weighted_hierarchical_fuse(pools, config.fusion, "h_w-RRF");
  emit("final.run", write_run(result.final_run));

  Run evaluated = result.final_run;
  Qrels eval_qrels = qrels;
  if (config.residual) {
    evaluated = residual_filter(evaluated, train_qrels);
    eval_qrels = residual_filter_qrels(qrels, train_qrels);
  }
  result.report = evaluate(evaluated, eval_qrels, config.cutoffs);
  emit("report.tsv", format_report_tsv(result.report));
  return result;
}

}  // namespace rankfuse
