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


#include "rankfuse/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rankfuse/corpus_io.hpp"
#include "rankfuse/pipeline.hpp"
#include "rankfuse/stats.hpp"
#include "strings.hpp"

namespace rankfuse {

namespace {

namespace fs = std::filesystem;

// Bad flag values that CLI11 validators cannot see.
class UsageError : public Error {
 public:
  using Error::Error;
};

template <class F>
auto with_path(const fs::path& path, F&& load) {
  try {
    return load(read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::vector<Topic> read_topics(const fs::path& p) {
  return with_path(p, [](const std::string& s) { return parse_topics(s); });
}

Run read_run(const fs::path& p) {
  return with_path(p, [](const std::string& s) { return parse_run(s); });
}

Qrels read_qrels(const fs::path& p, std::ostream& err) {
  auto r = with_path(p, [](const std::string& s) { return parse_qrels(s); });
  if (r.dropped_negative)
    err << "warning: " << p.string() << ": dropped " << r.dropped_negative << " negative judgments\n";
  if (r.duplicates)
    err << "warning: " << p.string() << ": " << r.duplicates << " duplicate judgments, last one kept\n";
  return r.qrels;
}

std::vector<FeatureRecord> read_features(const fs::path& p) {
  return with_path(p, [](const std::string& s) { return parse_feature_file(s); });
}

LinearScorer read_scorer(const fs::path& p) {
  return with_path(p, [](const std::string& s) { return scorer_from_json(s); });
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") out << text;
  else write_file(path, text);
}

// CLI11 validators reporting bad values as parse errors, so they exit with 2.
template <class Parse>
CLI::Validator parses_as(std::string name, Parse parse) {
  return CLI::Validator(
      [parse](std::string& value) -> std::string {
        try {
          parse(value);
          return {};
        } catch (const std::exception& e) {
          return e.what();
        }
      },
      "", std::move(name));
}

const auto kFieldSource = parses_as("FIELD", [](const std::string& v) { parse_field_source(v); });
const auto kFieldCombo = parses_as("FIELDS", [](const std::string& v) {
  if (FieldCombo::parse(v).empty()) throw Error("no topic field selected");
});
const auto kExpansion = parses_as("SPEC", [](const std::string& v) { ExpansionSpec::parse(v); });
const auto kFusionMode = parses_as("MODE", [](const std::string& v) { parse_fusion_mode(v); });

struct Bm25Flags {
  double k = 1.2;
  double b = 0.75;

  void add(CLI::App* cmd) {
    cmd->add_option("--bm25-k", k, "BM25 term-frequency saturation")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--bm25-b", b, "BM25 length normalization")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  }
  BM25Params params() const { return BM25Params{k, b}; }
};

void add_cutoffs(CLI::App* cmd, EvalCutoffs& c) {
  cmd->add_option("--ndcg-k", c.ndcg, "nDCG cutoff")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--p-k", c.precision, "precision cutoff")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--recall-k", c.recall, "recall cutoff")->capture_default_str()->check(CLI::PositiveNumber);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"rankfuse: lexical, dense and hybrid retrieval with hierarchical reciprocal rank fusion"};
  app.require_subcommand(1);
  std::function<void()> action;

  // index
  std::string corpus, field = "abstract", index_out;
  {
    auto* c = app.add_subcommand("index", "build an inverted index over one document field");
    c->add_option("--corpus", corpus, "JSONL corpus")->required()->check(CLI::ExistingFile);
    c->add_option("--field", field, "abstract or full_text")->capture_default_str()->check(kFieldSource);
    c->add_option("--out", index_out, "index file")->required();
    c->callback([&] {
      action = [&] {
        const auto docs = with_path(corpus, [](const std::string& s) { return load_corpus(s); });
        const auto idx = build_index(docs, parse_field_source(field));
        save_index(idx, index_out);
        err << "indexed " << idx.n_docs() << " documents, " << idx.vocabulary_size() << " terms\n";
      };
    });
  }

  // Shared by the retrieval commands.
  std::string index_path, topics_path, fields = "query", tag, run_out, expand, feedback_qrels, vectors;
  std::size_t k = 1000;
  Bm25Flags bm25;
  double lambda = 1.0;
  auto add_output = [&](CLI::App* c, const char* default_tag) {
    // The tag variable is shared, so each subcommand sets its own default when chosen.
    c->preparse_callback([&tag, default_tag](std::size_t) { tag = default_tag; });
    c->add_option("--tag", tag, "run tag")->default_str(default_tag);
    c->add_option("--out", run_out, "output file (default stdout)");
  };

  {
    auto* c = app.add_subcommand("search", "BM25 search over all topics");
    c->add_option("--index", index_path, "index file")->required()->check(CLI::ExistingFile);
    c->add_option("--topics", topics_path, "topics XML")->required()->check(CLI::ExistingFile);
    c->add_option("--fields", fields, "topic fields, e.g. query+question")->capture_default_str()->check(kFieldCombo);
    c->add_option("-k,--depth", k, "documents per topic")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--expand", expand, "pseudo:DOCS,TERMS or relevance:DOCS,TERMS")->check(kExpansion);
    c->add_option("--qrels", feedback_qrels, "judgments for relevance feedback")->check(CLI::ExistingFile);
    bm25.add(c);
    add_output(c, "bm25");
    c->callback([&] {
      action = [&] {
        SearchOptions o;
        o.fields = FieldCombo::parse(fields);
        o.bm25 = bm25.params();
        o.k = k;
        o.tag = tag;
        if (!expand.empty()) o.expand = ExpansionSpec::parse(expand);
        if (o.expand && o.expand->kind == ExpansionSpec::Kind::Relevance && feedback_qrels.empty())
          throw UsageError("--expand relevance:... needs --qrels");
        std::optional<Qrels> q;
        if (!feedback_qrels.empty()) q = read_qrels(feedback_qrels, err);
        const auto idx = load_index(index_path);
        const auto topics = read_topics(topics_path);
        emit(run_out, write_run(batch_search(idx, topics, o, q ? &*q : nullptr)), out);
      };
    });
  }

  {
    auto* c = app.add_subcommand("dense-search", "exact inner-product search over precomputed vectors");
    c->add_option("--vectors", vectors, "vector file")->required()->check(CLI::ExistingFile);
    c->add_option("-k,--depth", k, "documents per topic")->capture_default_str()->check(CLI::PositiveNumber);
    add_output(c, "dense");
    c->callback([&] {
      action = [&] { emit(run_out, write_run(batch_dense_search(load_vectors(vectors), k, tag)), out); };
    });
  }

  {
    auto* c = app.add_subcommand("hybrid-search", "lambda * dense + BM25 over documents in both stores");
    c->add_option("--vectors", vectors, "vector file")->required()->check(CLI::ExistingFile);
    c->add_option("--index", index_path, "index file")->required()->check(CLI::ExistingFile);
    c->add_option("--topics", topics_path, "topics XML")->required()->check(CLI::ExistingFile);
    c->add_option("--fields", fields, "topic fields")->capture_default_str()->check(kFieldCombo);
    c->add_option("--lambda", lambda, "dense weight")->capture_default_str()->check(CLI::NonNegativeNumber);
    c->add_option("-k,--depth", k, "documents per topic")->capture_default_str()->check(CLI::PositiveNumber);
    bm25.add(c);
    add_output(c, "hybrid");
    c->callback([&] {
      action = [&] {
        const auto store = load_vectors(vectors);
        const auto idx = load_index(index_path);
        const auto topics = read_topics(topics_path);
        HybridParams hp{lambda, bm25.params()};
        emit(run_out, write_run(batch_hybrid_search(store, idx, topics, FieldCombo::parse(fields), hp, k, tag)), out);
      };
    });
  }

  // fuse
  std::string config_path, mode = "weighted";
  FusionParams fusion;
  {
    auto* c = app.add_subcommand("fuse", "fuse run pools described by a JSON config");
    c->add_option("--config", config_path, "pool config")->required()->check(CLI::ExistingFile);
    c->add_option("--mode", mode, "flat, hierarchical or weighted")->capture_default_str()->check(kFusionMode);
    c->add_option("--rrf-k", fusion.k, "RRF constant")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--depth", fusion.depth, "keep this many documents per topic (0 keeps all)")->capture_default_str();
    c->preparse_callback([&tag](std::size_t) { tag.clear(); });
    c->add_option("--tag", tag, "run tag (default RRF, h-RRF or h_w-RRF)");
    c->add_option("--out", run_out, "output file (default stdout)");
    c->callback([&] {
      action = [&] {
        const auto m = parse_fusion_mode(mode);
        const auto pools = load_pool_config(config_path);
        const auto t = tag.empty() ? std::string(default_fusion_tag(m)) : tag;
        emit(run_out, write_run(fuse_pools(pools, m, fusion, t)), out);
      };
    });
  }

  // features / rescore / ltr
  std::string run_path, features_path, scorer_path, labels_path;
  std::size_t depth = 50;
  {
    auto* c = app.add_subcommand("features", "overlap features for the top documents of a run");
    c->add_option("--run", run_path, "candidate run")->required()->check(CLI::ExistingFile);
    c->add_option("--index", index_path, "index file")->required()->check(CLI::ExistingFile);
    c->add_option("--topics", topics_path, "topics XML")->required()->check(CLI::ExistingFile);
    c->add_option("--fields", fields, "topic fields")->default_val("query+question")->check(kFieldCombo);
    c->add_option("--depth", depth, "documents per topic")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--qrels", labels_path, "labels for training")->check(CLI::ExistingFile);
    bm25.add(c);
    c->add_option("--out", run_out, "output file (default stdout)");
    c->callback([&] {
      action = [&] {
        std::optional<Qrels> labels;
        if (!labels_path.empty()) labels = read_qrels(labels_path, err);
        const auto idx = load_index(index_path);
        const auto recs = build_features(idx, read_topics(topics_path), FieldCombo::parse(fields), bm25.params(),
                                         read_run(run_path), depth, labels ? &*labels : nullptr);
        emit(run_out, write_feature_file(recs), out);
      };
    });
  }

  TrainOptions train;
  std::string loss_input = "pre-activation";
  {
    auto* c = app.add_subcommand("ltr-train", "train the linear scorer on a feature file");
    c->add_option("--features", features_path, "labelled feature file")->required()->check(CLI::ExistingFile);
    c->add_option("--candidates", train.l, "candidates sampled per topic")->capture_default_str()->check(CLI::Range(2, 1 << 20));
    c->add_option("--steps", train.steps, "gradient steps")->capture_default_str();
    c->add_option("--lr", train.learning_rate, "learning rate")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--seed", train.seed, "sampling seed")->capture_default_str();
    c->add_option("--loss-input", loss_input, "pre-activation or sigmoid")
        ->capture_default_str()
        ->check(CLI::IsMember({"pre-activation", "sigmoid"}));
    c->add_option("--out", run_out, "scorer JSON (default stdout)");
    c->callback([&] {
      action = [&] {
        train.loss_input = loss_input == "sigmoid" ? LossInput::Sigmoid : LossInput::PreActivation;
        const auto recs = read_features(features_path);
        std::size_t skipped = 0;
        const auto examples = group_examples(recs, &skipped);
        if (skipped) err << "skipped " << skipped << " topics without a relevant candidate\n";
        if (examples.empty()) throw Error("no topic has a relevant candidate to train on");
        const auto scorer = train_linear(examples, train);
        err << "loss " << detail::format_g(mean_loss(LinearScorer{std::vector<double>(scorer.feature_dim()), 0.0},
                                                     examples, train.loss_input), 6)
            << " -> " << detail::format_g(mean_loss(scorer, examples, train.loss_input), 6) << "\n";
        emit(run_out, scorer_to_json(scorer), out);
      };
    });
  }

  {
    auto* c = app.add_subcommand("ltr-score", "rank feature records with a trained scorer");
    c->add_option("--features", features_path, "feature file")->required()->check(CLI::ExistingFile);
    c->add_option("--scorer", scorer_path, "scorer JSON")->required()->check(CLI::ExistingFile);
    add_output(c, "ltr");
    c->callback([&] {
      action = [&] {
        emit(run_out, write_run(score_features(read_scorer(scorer_path), read_features(features_path), tag)), out);
      };
    });
  }

  {
    auto* c = app.add_subcommand("rescore", "rescore the top of a run with a trained scorer");
    c->add_option("--run", run_path, "run to rescore")->required()->check(CLI::ExistingFile);
    c->add_option("--scorer", scorer_path, "scorer JSON")->required()->check(CLI::ExistingFile);
    c->add_option("--features", features_path, "precomputed feature file")->check(CLI::ExistingFile);
    c->add_option("--index", index_path, "index file (features computed on the fly)")->check(CLI::ExistingFile);
    c->add_option("--topics", topics_path, "topics XML (with --index)")->check(CLI::ExistingFile);
    c->add_option("--fields", fields, "topic fields (with --index)")->default_val("query+question")->check(kFieldCombo);
    c->add_option("--depth", depth, "documents rescored per topic")->capture_default_str()->check(CLI::PositiveNumber);
    bm25.add(c);
    add_output(c, "ltr");
    c->callback([&] {
      action = [&] {
        if (features_path.empty() == (index_path.empty() || topics_path.empty()))
          throw UsageError("give either --features or both --index and --topics");
        const auto run = read_run(run_path);
        const auto recs = features_path.empty()
                              ? build_features(load_index(index_path), read_topics(topics_path),
                                               FieldCombo::parse(fields), bm25.params(), run, depth, nullptr)
                              : read_features(features_path);
        emit(run_out, write_run(rescore_with_features(run, depth, read_scorer(scorer_path), recs, tag)), out);
      };
    });
  }

  // eval
  std::string qrels_path, prior_path;
  EvalCutoffs cutoffs;
  bool json = false;
  {
    auto* c = app.add_subcommand("eval", "nDCG, precision, MAP and recall of a run");
    c->add_option("--run", run_path, "run file")->required()->check(CLI::ExistingFile);
    c->add_option("--qrels", qrels_path, "judgments")->required()->check(CLI::ExistingFile);
    c->add_option("--prior-qrels", prior_path, "earlier judgments; enables residual evaluation")
        ->check(CLI::ExistingFile);
    add_cutoffs(c, cutoffs);
    c->add_flag("--json", json, "JSON report");
    c->add_option("--out", run_out, "output file (default stdout)");
    c->callback([&] {
      action = [&] {
        auto run = read_run(run_path);
        auto qrels = read_qrels(qrels_path, err);
        if (!prior_path.empty()) {
          const auto prior = read_qrels(prior_path, err);
          run = residual_filter(run, prior);
          qrels = residual_filter_qrels(qrels, prior);
        }
        const auto report = evaluate(run, qrels, cutoffs);
        if (!report.excluded_topics.empty()) {
          err << "excluded topics without relevant judgments:";
          for (auto t : report.excluded_topics) err << " " << t;
          err << "\n";
        }
        emit(run_out, json ? format_report_json(report) : format_report_tsv(report), out);
      };
    });
  }

  // ablate
  double alpha = 0.05;
  {
    auto* c = app.add_subcommand("ablate", "metric table over subsets of pools with t-tests against a baseline");
    c->add_option("--config", config_path, "ablation config")->required()->check(CLI::ExistingFile);
    c->add_option("--alpha", alpha, "significance level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    c->add_option("--out", run_out, "output file (default stdout)");
    c->callback([&] {
      action = [&] {
        const fs::path cfg_path = config_path;
        const auto cfg = with_path(cfg_path, [&](const std::string& s) {
          return parse_ablation_config(s, cfg_path.parent_path());
        });
        const auto pools = load_pools(cfg.pools, cfg.base_dir);
        const auto qrels = read_qrels(cfg.qrels, err);
        std::optional<Qrels> prior;
        if (cfg.prior_qrels) prior = read_qrels(*cfg.prior_qrels, err);
        const auto result = run_ablation(pools, cfg.rows, cfg.baseline, cfg.fusion, qrels, cfg.cutoffs, alpha,
                                         prior ? &*prior : nullptr);
        emit(run_out, format_ablation_table(result), out);
      };
    });
  }

  // ttest
  std::string report_a, report_b, metric = "ndcg_cut_20";
  {
    auto* c = app.add_subcommand("ttest", "paired t-test of one metric between two eval reports");
    c->add_option("a", report_a, "first report (TSV)")->required()->check(CLI::ExistingFile);
    c->add_option("b", report_b, "second report (TSV)")->required()->check(CLI::ExistingFile);
    c->add_option("--metric", metric, "metric name")->capture_default_str();
    c->callback([&] {
      action = [&] {
        auto load = [&](const std::string& p) {
          return with_path(p, [&](const std::string& s) { return parse_report_metric(s, metric); });
        };
        const auto r = paired_t_test(load(report_a), load(report_b));
        out << "metric\t" << metric << "\n"
            << "n\t" << r.n_pairs << "\n"
            << "mean_diff\t" << detail::format_fixed(r.mean_difference, 6) << "\n"
            << "t\t" << detail::format_g(r.t_statistic, 6) << "\n"
            << "p\t" << detail::format_g(r.p_value, 6) << "\n";
        if (r.degenerate) err << "warning: differences have zero variance\n";
      };
    });
  }

  // pipeline
  {
    auto* c = app.add_subcommand("pipeline", "run the whole experiment from a JSON config");
    c->add_option("--config", config_path, "experiment config")->required()->check(CLI::ExistingFile);
    c->callback([&] {
      action = [&] {
        const fs::path cfg_path = config_path;
        const auto cfg = with_path(cfg_path, [&](const std::string& s) {
          return parse_experiment_config(s, cfg_path.parent_path());
        });
        const auto result = run_experiment(cfg);
        for (const auto& p : result.written) err << "wrote " << p.string() << "\n";
        out << format_report_tsv(result.report);
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    action();
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rankfuse
