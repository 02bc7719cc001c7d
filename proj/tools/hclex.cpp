// hclex — build, validate and apply a human-capital disclosure lexicon.
//
// Pipeline: prepare -> train -> expand -> review -> cluster/score ->
// aggregate, plus evaldataset/evalmetrics for classifier evaluation. Every
// subcommand writes the effective run_config.ini next to its outputs so a
// run can be reproduced from them.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hclex/cluster.hpp"
#include "hclex/corpus.hpp"
#include "hclex/csv.hpp"
#include "hclex/embedding.hpp"
#include "hclex/error.hpp"
#include "hclex/eval.hpp"
#include "hclex/lexicon.hpp"
#include "hclex/run_config.hpp"
#include "hclex/scorer.hpp"
#include "hclex/text.hpp"

namespace fs = std::filesystem;
using namespace hclex;

namespace {

struct Paths {
  std::string config;
  std::string out = ".";
  std::string corpus;
  std::string streams;
  std::string embeddings;
  std::string seeds;
  std::string candidates;
  std::string ledger;
  std::string lexicon;
  std::string scores;
  std::string dates;
  std::string groups;
  std::string pool;
  std::string dataset;
  std::string probs;
  std::string split = "test";
  bool text_export = false;
};

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw DataError("cannot open input file: " + path);
  return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw DataError("cannot open output file: " + path);
  return out;
}

std::string out_path(const Paths& paths, const std::string& name) {
  return (fs::path(paths.out) / name).string();
}

void write_run_config(const RunConfig& cfg, const Paths& paths) {
  fs::create_directories(paths.out);
  auto out = open_out(out_path(paths, "run_config.ini"));
  cfg.save(out);
}

Corpus load_corpus(const std::string& path, bool print_summary = false) {
  auto in = open_in(path);
  ParseSummary summary;
  Corpus corpus = parse_combined(in, &summary);
  for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
  if (print_summary && (summary.duplicate_ciks_dropped || !summary.rejected_empty_body.empty()))
    std::cerr << "warning: dropped " << summary.duplicate_ciks_dropped << " duplicate cik(s), "
              << summary.rejected_empty_body.size() << " empty document(s)\n";
  return corpus;
}

std::vector<TokenStream> load_streams(const std::string& path) {
  auto in = open_in(path);
  std::vector<TokenStream> streams;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    TokenStream s;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) s.push_back(std::move(tok));
    streams.push_back(std::move(s));
  }
  return streams;
}

// ---- subcommands -----------------------------------------------------------

void run_prepare(const RunConfig& cfg, const Paths& paths) {
  write_run_config(cfg, paths);
  const Corpus corpus = load_corpus(paths.corpus, true);

  std::vector<TokenStream> streams;
  streams.reserve(corpus.documents.size());
  std::uint64_t total_tokens = 0;
  for (const auto& doc : corpus.documents) {
    TokenStream s = tokenize(doc.text);
    total_tokens += s.size();
    for (auto& t : s) t = normalize_token(t);
    streams.push_back(std::move(s));
  }

  const PhraseTable table =
      learn_phrases(streams, cfg.phrase_min_count, cfg.phrase_threshold, cfg.phrase_passes);
  {
    auto out = open_out(out_path(paths, "phrases.tsv"));
    save_phrase_table(table, out);
  }
  {
    auto out = open_out(out_path(paths, "streams.txt"));
    for (const auto& s : streams) {
      TokenStream merged = merge_all(s, table);
      for (std::size_t i = 0; i < merged.size(); ++i) out << (i ? " " : "") << merged[i];
      out << '\n';
    }
  }
  std::cout << "prepare: " << corpus.documents.size() << " documents, " << total_tokens
            << " tokens, " << table.entries.size() << " phrases\n";
}

void run_train(const RunConfig& cfg, const Paths& paths) {
  write_run_config(cfg, paths);
  const auto streams = load_streams(paths.streams);
  const Vocabulary vocab = build_vocab(streams, cfg.min_count);

  TrainConfig tc;
  tc.dimension = cfg.dimension;
  tc.window = cfg.window;
  tc.negatives = cfg.negatives;
  tc.epochs = cfg.epochs;
  tc.initial_lr = cfg.initial_lr;
  tc.min_lr = cfg.min_lr;
  tc.subsample = cfg.subsample;
  tc.seed = stage_seed(cfg, "train");
  tc.workers = cfg.workers;

  TrainStats stats;
  const EmbeddingMatrix matrix = train(streams, vocab, tc, &stats);
  {
    auto out = open_out(out_path(paths, "embeddings.bin"), std::ios::binary);
    save_embeddings(out, matrix, vocab);
  }
  if (paths.text_export) {
    auto out = open_out(out_path(paths, "embeddings.txt"));
    export_embeddings_text(out, matrix, vocab);
  }
  std::cout << "train: vocabulary " << vocab.size() << ", dimension " << tc.dimension;
  for (std::size_t e = 0; e < stats.epoch_mean_loss.size(); ++e)
    std::cout << (e ? " " : ", epoch losses ") << csv::fixed4(stats.epoch_mean_loss[e]);
  std::cout << '\n';
}

void run_expand(const RunConfig& cfg, const Paths& paths) {
  write_run_config(cfg, paths);
  auto ein = open_in(paths.embeddings, std::ios::binary);
  const LoadedEmbeddings loaded = load_embeddings(ein);
  auto sin = open_in(paths.seeds);
  const auto seeds = load_seeds(sin);

  const CandidateSet set = expand(loaded.matrix, loaded.vocab, seeds, cfg.expand_threshold,
                                  cfg.include_antonyms, cfg.workers);
  for (const auto& [category, seed] : set.missing_seeds)
    std::cerr << "warning: seed not in vocabulary: " << seed << " (" << category << ")\n";
  {
    auto out = open_out(out_path(paths, "candidates.csv"));
    save_candidates(set, out);
  }
  {
    const auto bins = similarity_histogram(loaded.matrix, loaded.vocab, seeds);
    auto out = open_out(out_path(paths, "histogram.csv"));
    write_histogram_csv(bins, out);
  }
  std::cout << "expand: " << set.candidates.size() << " candidates at threshold "
            << csv::dtos(cfg.expand_threshold) << (cfg.include_antonyms ? " (antonyms on)" : "")
            << ", " << set.missing_seeds.size() << " seeds missing\n";
}

void run_review(const RunConfig& cfg, const Paths& paths) {
  write_run_config(cfg, paths);
  auto cin_ = open_in(paths.candidates);
  const CandidateSet set = load_candidates(cin_);
  ReviewLedger ledger;
  if (!paths.ledger.empty()) {
    auto lin = open_in(paths.ledger);
    ledger = load_review_ledger(lin);
  }
  const ReviewResult result = apply_review(set, ledger);
  for (const auto& term : result.unknown_terms)
    std::cerr << "warning: ledger term not among candidates: " << term << '\n';
  auto out = open_out(out_path(paths, "lexicon.csv"));
  save_lexicon(result.lexicon, out);
  std::cout << "review: " << result.lexicon.entries.size() << " lexicon entries from "
            << set.candidates.size() << " candidates\n";
}

void run_cluster(const RunConfig& cfg, const Paths& paths) {
  write_run_config(cfg, paths);
  auto lin = open_in(paths.lexicon);
  const Lexicon lexicon = load_lexicon(lin);
  auto ein = open_in(paths.embeddings, std::ios::binary);
  const LoadedEmbeddings loaded = load_embeddings(ein);

  PointSet points;
  std::size_t missing = 0;
  for (const auto& entry : lexicon.entries) {
    const int id = loaded.vocab.find(entry.term);
    if (id < 0) {
      ++missing;
      continue;
    }
    points.labels.push_back(entry.term);
    points.category_of[entry.term] = entry.category;
    points.points.conservativeResize(points.points.rows() + 1, loaded.matrix.dimension);
    points.points.row(points.points.rows() - 1) =
        loaded.matrix.input.row(id).cast<double>();
  }
  if (missing > 0)
    std::cerr << "warning: " << missing << " lexicon term(s) not in embedding vocabulary\n";
  if (points.labels.size() < 2) throw DataError("cluster: fewer than 2 lexicon terms in vocabulary");

  const auto sweep =
      silhouette_sweep(points.points, cfg.k_min, cfg.k_max, stage_seed(cfg, "cluster_sweep"),
                       cfg.workers);
  {
    auto out = open_out(out_path(paths, "sweep.csv"));
    write_sweep_csv(sweep, out);
  }
  const ClusterReport report =
      kmeans(points.points, cfg.cluster_k, stage_seed(cfg, "cluster"), cfg.kmeans_max_iters,
             cfg.kmeans_restarts, cfg.workers);
  {
    const CompositionReport comp = composition_report(report, points.labels, points.category_of);
    auto out = open_out(out_path(paths, "composition.csv"));
    write_composition_csv(comp, out);
  }
  {
    const PcaResult pca = pca_project(points.points, 3);
    auto out = open_out(out_path(paths, "points3d.csv"));
    export_3d(points.labels, pca.projected, points.category_of, out);
  }
  const auto* best = &sweep.front();
  for (const auto& e : sweep)
    if (e.silhouette_score > best->silhouette_score) best = &e;
  std::cout << "cluster: " << points.labels.size() << " terms, sweep best k " << best->k
            << ", composition at k " << cfg.cluster_k << " (silhouette "
            << csv::fixed4(report.silhouette_score) << ")\n";
}

void run_score(const RunConfig& cfg, const Paths& paths) {
  write_run_config(cfg, paths);
  auto lin = open_in(paths.lexicon);
  const Lexicon lexicon = load_lexicon(lin);
  const CompiledMatcher matcher = compile_matcher(lexicon, cfg.exclude_subcategories);
  const Corpus corpus = load_corpus(paths.corpus, true);

  const ScoreTable table = score_corpus(matcher, corpus, cfg.workers);
  for (const auto& [doc_id, error] : table.failures)
    std::cerr << "warning: failed to score document " << doc_id << ": " << error << '\n';
  auto out = open_out(out_path(paths, "scores.csv"));
  write_scores_csv(table, out);
  std::cout << "score: " << table.docs.size() << " documents scored, " << table.failures.size()
            << " failed, " << matcher.pattern_length.size() << " patterns\n";
}

void run_aggregate(const RunConfig& cfg, const Paths& paths) {
  write_run_config(cfg, paths);
  auto sin = open_in(paths.scores);
  const ScoreTable table = load_scores_csv(sin);

  bool wrote = false;
  if (!paths.corpus.empty() || !paths.dates.empty()) {
    std::map<std::string, CivilDate> dates;
    if (!paths.dates.empty()) {
      auto din = open_in(paths.dates);
      dates = load_dates_csv(din);
    } else {
      dates = dates_from_corpus(load_corpus(paths.corpus));
    }
    const PeriodReport report = aggregate_by_period(table, dates, parse_bucket(cfg.bucket));
    for (const auto& d : report.undated_docs)
      std::cerr << "warning: no date for doc " << d << ", excluded\n";
    auto out = open_out(out_path(paths, "by_period.csv"));
    write_period_csv(report, out);
    std::cout << "aggregate: " << report.rows.size() << " period bucket(s) [" << cfg.bucket
              << "]\n";
    wrote = true;
  }
  if (!paths.groups.empty()) {
    auto gin = open_in(paths.groups);
    const GroupReport report = aggregate_by_group(table, load_groups_csv(gin));
    auto out = open_out(out_path(paths, "by_group.csv"));
    write_group_csv(report, out);
    std::cout << "aggregate: " << report.rows.size() << " group(s)\n";
    wrote = true;
  }
  if (!wrote)
    throw DataError("aggregate: need --corpus or --dates for periods, and/or --groups for groups");
}

void run_evaldataset(const RunConfig& cfg, const Paths& paths) {
  write_run_config(cfg, paths);
  const Corpus corpus = load_corpus(paths.corpus, true);
  std::vector<std::string> pool;
  {
    auto in = open_in(paths.pool);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) pool.push_back(line);
    }
  }
  const auto data = build_dataset(corpus, pool, cfg.neg_ratio, cfg.train_frac,
                                  stage_seed(cfg, "evaldataset"));
  auto out = open_out(out_path(paths, "dataset.csv"));
  write_dataset_csv(data, out);
  long long train_n = 0;
  for (const auto& s : data) train_n += s.split == "train";
  std::cout << "evaldataset: " << data.size() << " sentences (" << train_n << " train, "
            << data.size() - static_cast<std::size_t>(train_n) << " test)\n";
}

void run_evalmetrics(const RunConfig& cfg, const Paths& paths) {
  write_run_config(cfg, paths);
  if (paths.split != "train" && paths.split != "test" && paths.split != "all")
    throw DataError("evalmetrics: --split must be train, test or all");
  auto din = open_in(paths.dataset);
  const auto data = load_dataset_csv(din);
  auto pin = open_in(paths.probs);
  std::map<std::string, double> prob_of;
  for (auto& [id, p] : load_probabilities_csv(pin)) prob_of[id] = p;

  std::vector<int> labels;
  std::vector<double> probs;
  for (const auto& s : data) {
    if (paths.split != "all" && s.split != paths.split) continue;
    auto it = prob_of.find(s.id);
    if (it == prob_of.end())
      throw DataError("evalmetrics: no probability for sentence id '" + s.id + "'");
    labels.push_back(s.label);
    probs.push_back(it->second);
  }
  if (labels.empty()) throw DataError("evalmetrics: no sentences in split '" + paths.split + "'");

  const ThresholdChoice choice = select_threshold(labels, probs);
  auto out = open_out(out_path(paths, "eval_report.json"));
  write_eval_report(choice, out);
  std::cout << "evalmetrics: threshold " << csv::dtos(choice.threshold) << ", F1 "
            << csv::fixed4(choice.result.f1) << ", precision "
            << csv::fixed4(choice.result.precision) << ", recall "
            << csv::fixed4(choice.result.recall) << ", accuracy "
            << csv::fixed4(choice.result.accuracy) << " on " << labels.size() << " sentences ("
            << paths.split << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hclex: lexicon construction and corpus scoring toolkit"};
  app.require_subcommand(1);

  Paths paths;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::string> exclude_flags;

  // Flags shared by all subcommands map 1:1 onto RunConfig keys; the file
  // loads first, then flags win.
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", paths.config, "run config file (key = value lines)");
    sub->add_option("--out", paths.out, "output directory (default .)");
    auto cfg_opt = [&, sub](const std::string& flag, const std::string& key,
                            const std::string& desc) {
      sub->add_option(
          flag,
          [&overrides, key](const CLI::results_t& res) {
            for (const auto& v : res) overrides.emplace_back(key, v);
            return true;
          },
          desc);
    };
    cfg_opt("--seed", "seed", "master RNG seed");
    cfg_opt("--workers", "workers", "worker threads (1 = fully deterministic)");
    cfg_opt("--threshold", "expand_threshold", "expansion cosine threshold");
    cfg_opt("--dimension", "dimension", "embedding dimension");
    cfg_opt("--min-count", "min_count", "vocabulary frequency floor");
    cfg_opt("--window", "window", "context window");
    cfg_opt("--negatives", "negatives", "negative samples per pair");
    cfg_opt("--epochs", "epochs", "training epochs");
    cfg_opt("--phrase-passes", "phrase_passes", "phrase learning passes");
    cfg_opt("--phrase-threshold", "phrase_threshold", "collocation score threshold");
    cfg_opt("--phrase-min-count", "phrase_min_count", "collocation count floor");
    cfg_opt("--bucket", "bucket", "aggregation bucket: days:<n> or year");
    cfg_opt("--k", "cluster_k", "k for the composition report");
    cfg_opt("--k-min", "k_min", "silhouette sweep lower bound");
    cfg_opt("--k-max", "k_max", "silhouette sweep upper bound");
    cfg_opt("--neg-ratio", "neg_ratio", "negative sentences per HC sentence");
    cfg_opt("--train-frac", "train_frac", "training fraction of the dataset");
    sub->add_flag(
        "--antonyms",
        [&overrides](std::int64_t) { overrides.emplace_back("include_antonyms", "true"); },
        "capture strongly negative cosines");
    sub->add_flag(
        "--no-antonyms",
        [&overrides](std::int64_t) { overrides.emplace_back("include_antonyms", "false"); },
        "positive similarities only");
    sub->add_option("--exclude-subcategory", exclude_flags,
                    "drop a lexicon subcategory at compile time (repeatable)");
  };

  CLI::App* prepare = app.add_subcommand("prepare", "corpus -> token streams + phrase table");
  add_common(prepare);
  prepare->add_option("--corpus", paths.corpus, "combined corpus file")->required();

  CLI::App* train = app.add_subcommand("train", "token streams -> embeddings");
  add_common(train);
  train->add_option("--streams", paths.streams, "streams.txt from prepare")->required();
  train->add_flag("--text-export", paths.text_export, "also write embeddings.txt");

  CLI::App* expand_cmd = app.add_subcommand("expand", "embeddings + seeds -> candidates");
  add_common(expand_cmd);
  expand_cmd->add_option("--embeddings", paths.embeddings, "embeddings.bin")->required();
  expand_cmd->add_option("--seeds", paths.seeds, "seed CSV (category,seed)")->required();

  CLI::App* review = app.add_subcommand("review", "candidates + ledger -> lexicon");
  add_common(review);
  review->add_option("--candidates", paths.candidates, "candidates.csv from expand")->required();
  review->add_option("--ledger", paths.ledger, "review ledger CSV (optional)");

  CLI::App* cluster = app.add_subcommand("cluster", "lexicon + embeddings -> cluster reports");
  add_common(cluster);
  cluster->add_option("--lexicon", paths.lexicon, "lexicon CSV")->required();
  cluster->add_option("--embeddings", paths.embeddings, "embeddings.bin")->required();

  CLI::App* score = app.add_subcommand("score", "lexicon + corpus -> per-document scores");
  add_common(score);
  score->add_option("--lexicon", paths.lexicon, "lexicon CSV")->required();
  score->add_option("--corpus", paths.corpus, "combined corpus file")->required();

  CLI::App* aggregate = app.add_subcommand("aggregate", "scores + metadata -> reports");
  add_common(aggregate);
  aggregate->add_option("--scores", paths.scores, "scores.csv from score")->required();
  aggregate->add_option("--corpus", paths.corpus, "corpus file for filing dates");
  aggregate->add_option("--dates", paths.dates, "dates CSV (doc_id,date)");
  aggregate->add_option("--groups", paths.groups, "groups CSV (doc_id,group)");

  CLI::App* evaldataset = app.add_subcommand("evaldataset", "HC corpus + pool -> labeled dataset");
  add_common(evaldataset);
  evaldataset->add_option("--corpus", paths.corpus, "HC disclosure corpus")->required();
  evaldataset->add_option("--pool", paths.pool, "non-HC sentence pool (one per line)")->required();

  CLI::App* evalmetrics = app.add_subcommand("evalmetrics", "dataset + probabilities -> report");
  add_common(evalmetrics);
  evalmetrics->add_option("--dataset", paths.dataset, "dataset.csv from evaldataset")->required();
  evalmetrics->add_option("--probs", paths.probs, "classifier scores CSV (id,probability)")
      ->required();
  evalmetrics->add_option("--split", paths.split, "evaluate train, test or all (default test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    std::cerr << "ERROR 2: " << e.what() << '\n';
    return 2;
  }

  try {
    RunConfig cfg;
    if (!paths.config.empty()) {
      auto in = open_in(paths.config);
      cfg.load(in);
    }
    for (const auto& [key, value] : overrides) cfg.apply(key, value);
    if (!exclude_flags.empty()) cfg.exclude_subcategories = exclude_flags;

    if (app.got_subcommand(prepare)) run_prepare(cfg, paths);
    else if (app.got_subcommand(train)) run_train(cfg, paths);
    else if (app.got_subcommand(expand_cmd)) run_expand(cfg, paths);
    else if (app.got_subcommand(review)) run_review(cfg, paths);
    else if (app.got_subcommand(cluster)) run_cluster(cfg, paths);
    else if (app.got_subcommand(score)) run_score(cfg, paths);
    else if (app.got_subcommand(aggregate)) run_aggregate(cfg, paths);
    else if (app.got_subcommand(evaldataset)) run_evaldataset(cfg, paths);
    else if (app.got_subcommand(evalmetrics)) run_evalmetrics(cfg, paths);
    return 0;
  } catch (const DataError& e) {
    std::cerr << "ERROR 3: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "ERROR 4: " << e.what() << '\n';
    return 4;
  }
}
