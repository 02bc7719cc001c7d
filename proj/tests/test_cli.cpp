#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hclex/eval.hpp"
#include "hclex/lexicon.hpp"

namespace fs = std::filesystem;
using namespace hclex;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "hclex_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  const fs::path out_file = workdir() / "stdout.tmp";
  const fs::path err_file = workdir() / "stderr.tmp";
  const std::string cmd = std::string(HCLEX_BIN) + " " + args + " >" + out_file.string() +
                          " 2>" + err_file.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

std::string mini(const std::string& name) {
  return std::string(HCLEX_ROOT) + "/data/mini/" + name;
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK_EQ(run_cli("--help").code, 0);
  const RunResult bare = run_cli("");
  CHECK_EQ(bare.code, 2);
  CHECK(contains(bare.err, "ERROR 2"));
  const RunResult unknown = run_cli("frobnicate");
  CHECK_EQ(unknown.code, 2);
  const RunResult bad_flag = run_cli("prepare --corpus x --bogus-flag");
  CHECK_EQ(bad_flag.code, 2);
  CHECK(contains(bad_flag.err, "ERROR 2"));
}

TEST_CASE("missing input file reports a data error") {
  const RunResult r =
      run_cli("prepare --corpus /nonexistent/corpus.txt --out " + (workdir() / "x").string());
  CHECK_EQ(r.code, 3);
  CHECK_EQ(r.err.rfind("ERROR 3:", 0), 0);
}

TEST_CASE("invalid parameters report a usage error") {
  const RunResult r = run_cli("evaldataset --corpus " + mini("eval_corpus.txt") + " --pool " +
                              mini("pool.txt") + " --neg-ratio 0 --out " +
                              (workdir() / "x").string());
  CHECK_EQ(r.code, 4);
  CHECK(contains(r.err, "ERROR 4"));
}

TEST_CASE("full pipeline on the bundled mini corpus") {
  const std::string cfg = " --config " + mini("run.ini");
  const fs::path w = workdir();

  // prepare
  const RunResult prep = run_cli("prepare --corpus " + mini("corpus.txt") + cfg + " --out " +
                                 (w / "prep").string());
  CHECK_EQ(prep.code, 0);
  CHECK(contains(prep.out, "prepare: 50 documents, 20862 tokens, 9 phrases"));
  CHECK(fs::exists(w / "prep" / "run_config.ini"));
  CHECK(fs::exists(w / "prep" / "streams.txt"));
  CHECK(fs::exists(w / "prep" / "phrases.tsv"));

  // train
  const RunResult train = run_cli("train --streams " + (w / "prep" / "streams.txt").string() +
                                  cfg + " --out " + (w / "train").string());
  CHECK_EQ(train.code, 0);
  CHECK(contains(train.out, "train: vocabulary 354, dimension 48"));
  REQUIRE(fs::exists(w / "train" / "embeddings.bin"));

  // expand (twice: the second run must be byte-identical)
  const std::string expand_args = "expand --embeddings " +
                                  (w / "train" / "embeddings.bin").string() + " --seeds " +
                                  mini("seeds.csv") + cfg;
  const RunResult exp1 = run_cli(expand_args + " --out " + (w / "exp").string());
  CHECK_EQ(exp1.code, 0);
  CHECK(contains(exp1.out, "expand: 67 candidates at threshold 0.93 (antonyms on), 1 seeds missing"));
  CHECK(contains(exp1.err, "telecommuting"));
  const RunResult exp2 = run_cli(expand_args + " --out " + (w / "exp2").string());
  CHECK_EQ(exp2.code, 0);
  CHECK_EQ(slurp(w / "exp" / "candidates.csv"), slurp(w / "exp2" / "candidates.csv"));
  CHECK_EQ(slurp(w / "exp" / "histogram.csv"), slurp(w / "exp2" / "histogram.csv"));

  {
    std::ifstream in(w / "exp" / "candidates.csv");
    const CandidateSet set = load_candidates(in);
    REQUIRE_EQ(set.candidates.size(), 67);
    for (const auto& c : set.candidates) {
      CHECK(c.max_abs_similarity >= 0.93);
      CHECK((c.source == "seed" || c.source == "expanded"));
    }
  }

  // review
  const RunResult review = run_cli("review --candidates " +
                                   (w / "exp" / "candidates.csv").string() + " --ledger " +
                                   mini("ledger.csv") + cfg + " --out " + (w / "rev").string());
  CHECK_EQ(review.code, 0);
  CHECK(contains(review.out, "review: 66 lexicon entries from 67 candidates"));
  CHECK(contains(review.err, "zzznotacandidate"));

  {
    std::ifstream in(w / "rev" / "lexicon.csv");
    const Lexicon lex = load_lexicon(in);
    REQUIRE_EQ(lex.entries.size(), 66);
    std::map<std::string, int> per_category;
    int covid = 0, seed_total = 0;
    for (const auto& e : lex.entries) {
      ++per_category[e.category];
      if (e.subcategory == "covid") {
        ++covid;
        CHECK((e.term == "quarantine" || e.term == "distancing"));
      }
      if (e.source == "seed") {
        ++seed_total;
        REQUIRE(e.similarity.has_value());
        CHECK(*e.similarity > 0.9999999);  // own-vector cosine, up to rounding
      }
    }
    CHECK_EQ(covid, 2);
    CHECK(seed_total >= 10);
    CHECK_EQ(per_category.at("Diversity, Equity, and Inclusion (DEI)"), 12);
    CHECK_EQ(per_category.at("Health and Safety"), 16);
    CHECK_EQ(per_category.at("Labor Relations and Culture"), 13);
    CHECK_EQ(per_category.at("Compensation and Benefits"), 13);
    CHECK_EQ(per_category.at("Demographics and Others"), 12);
  }

  // cluster
  const RunResult cluster = run_cli("cluster --lexicon " + (w / "rev" / "lexicon.csv").string() +
                                    " --embeddings " + (w / "train" / "embeddings.bin").string() +
                                    cfg + " --out " + (w / "clst").string());
  CHECK_EQ(cluster.code, 0);
  CHECK(contains(cluster.out, "cluster: 66 terms, sweep best k 5"));
  {
    std::ifstream in(w / "clst" / "sweep.csv");
    std::string line;
    std::getline(in, line);  // header
    int best_k = 0;
    double best_sil = -2.0;
    while (std::getline(in, line)) {
      const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
      const int k = std::stoi(line.substr(0, c1));
      const double sil = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
      if (sil > best_sil) {
        best_sil = sil;
        best_k = k;
      }
    }
    CHECK_EQ(best_k, 5);
    CHECK(best_sil > 0.7);
    CHECK(best_sil < 0.9);
  }
  {
    std::ifstream in(w / "clst" / "composition.csv");
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      CHECK(contains(line, ",1.0000"));  // every cluster is single-category
    }
    CHECK_EQ(rows, 5);
  }
  CHECK(fs::exists(w / "clst" / "points3d.csv"));

  // score, with and without the covid subcategory
  const RunResult score = run_cli("score --lexicon " + (w / "rev" / "lexicon.csv").string() +
                                  " --corpus " + mini("corpus.txt") + cfg + " --out " +
                                  (w / "score").string());
  CHECK_EQ(score.code, 0);
  CHECK(contains(score.out, "score: 50 documents scored, 0 failed, 66 patterns"));
  CHECK(contains(first_line(w / "score" / "scores.csv"), "count_health_and_safety_covid"));

  const RunResult trimmed = run_cli("score --lexicon " + (w / "rev" / "lexicon.csv").string() +
                                    " --corpus " + mini("corpus.txt") + cfg +
                                    " --exclude-subcategory covid --out " +
                                    (w / "score_nc").string());
  CHECK_EQ(trimmed.code, 0);
  CHECK(contains(trimmed.out, "64 patterns"));
  const std::string trimmed_header = first_line(w / "score_nc" / "scores.csv");
  CHECK(contains(trimmed_header, "count_health_and_safety_general"));
  CHECK_FALSE(contains(trimmed_header, "covid"));

  // aggregate by period and group
  const RunResult agg = run_cli("aggregate --scores " + (w / "score" / "scores.csv").string() +
                                " --corpus " + mini("corpus.txt") + " --groups " +
                                mini("groups.csv") + cfg + " --out " + (w / "agg").string());
  CHECK_EQ(agg.code, 0);
  CHECK(contains(agg.out, "aggregate: 6 period bucket(s) [days:30]"));
  CHECK(contains(agg.out, "aggregate: 3 group(s)"));
  CHECK(fs::exists(w / "agg" / "by_period.csv"));
  CHECK(fs::exists(w / "agg" / "by_group.csv"));

  const RunResult agg_none = run_cli("aggregate --scores " +
                                     (w / "score" / "scores.csv").string() + cfg + " --out " +
                                     (w / "agg_none").string());
  CHECK_EQ(agg_none.code, 3);  // neither periods nor groups requested

  // evaluation dataset + metrics with synthetic perfect probabilities
  const RunResult evald = run_cli("evaldataset --corpus " + mini("eval_corpus.txt") + " --pool " +
                                  mini("pool.txt") + cfg + " --out " + (w / "eval").string());
  CHECK_EQ(evald.code, 0);
  CHECK(contains(evald.out, "evaldataset: 180 sentences (144 train, 36 test)"));

  {
    std::ifstream in(w / "eval" / "dataset.csv");
    const auto data = load_dataset_csv(in);
    REQUIRE_EQ(data.size(), 180);
    std::ofstream probs(w / "probs.csv");
    probs << "id,probability\n";
    for (const auto& s : data) probs << s.id << "," << (s.label ? "0.9" : "0.1") << "\n";
  }
  const RunResult metrics = run_cli("evalmetrics --dataset " +
                                    (w / "eval" / "dataset.csv").string() + " --probs " +
                                    (w / "probs.csv").string() + cfg + " --out " +
                                    (w / "metrics").string());
  CHECK_EQ(metrics.code, 0);
  CHECK(contains(metrics.out, "evalmetrics: threshold 0.9, F1 1.0000"));
  CHECK(contains(metrics.out, "on 36 sentences (test)"));
  CHECK(fs::exists(w / "metrics" / "eval_report.json"));
  CHECK(fs::exists(w / "metrics" / "run_config.ini"));

  const RunResult bad_split = run_cli("evalmetrics --dataset " +
                                      (w / "eval" / "dataset.csv").string() + " --probs " +
                                      (w / "probs.csv").string() + cfg +
                                      " --split bogus --out " + (w / "metrics2").string());
  CHECK_EQ(bad_split.code, 3);
  CHECK(contains(bad_split.err, "ERROR 3"));
}
