#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hclex/corpus.hpp"

namespace hclex {

// Rule-based splitter: terminator runs of . ! ? end a sentence unless a
// lone '.' follows a guarded abbreviation ("Inc.", "No.", "U.S.", single
// initials) or sits between digits. Never returns empty sentences;
// concatenating the output reproduces the input up to collapsed whitespace.
std::vector<std::string> split_sentences(const std::string& text);

struct LabeledSentence {
  std::string id;
  std::string text;
  int label = 0;      // 1 = hc, 0 = non_hc
  std::string split;  // "train" | "test"
  std::string source_doc;
  bool operator==(const LabeledSentence&) const = default;
};

// HC sentences come from splitting hc_docs; negatives are drawn from the
// pool without replacement at neg_ratio per HC sentence. The 80/20-style
// split is stratified per class (rounded per class), all seeded.
std::vector<LabeledSentence> build_dataset(const Corpus& hc_docs,
                                           const std::vector<std::string>& non_hc_pool,
                                           int neg_ratio, double train_frac, std::uint64_t seed);

struct EvalResult {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long tp = 0, fp = 0, tn = 0, fn = 0;
  // Undefined denominators yield value 0 with the flag cleared.
  bool precision_defined = true;
  bool recall_defined = true;
  bool f1_defined = true;
};

EvalResult evaluate(const std::vector<int>& labels, const std::vector<int>& predictions);

// Sweeps distinct probabilities plus {0,1}, predicting 1 at prob >= t.
// Maximal F1 wins; exact ties go to the higher threshold.
struct ThresholdChoice {
  double threshold = 0.0;
  EvalResult result;
};
ThresholdChoice select_threshold(const std::vector<int>& labels,
                                 const std::vector<double>& probabilities);

// Dataset CSV `id,split,label,source_doc,text` with label hc|non_hc.
void write_dataset_csv(const std::vector<LabeledSentence>& data, std::ostream& out);
std::vector<LabeledSentence> load_dataset_csv(std::istream& in);

// Classifier scores CSV `id,probability`.
std::vector<std::pair<std::string, double>> load_probabilities_csv(std::istream& in);

// JSON report: confusion counts, metrics, flags, chosen threshold.
void write_eval_report(const ThresholdChoice& choice, std::ostream& out);

}  // namespace hclex
