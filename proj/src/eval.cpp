#include "hclex/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "hclex/csv.hpp"
#include "hclex/error.hpp"
#include "hclex/rng.hpp"

namespace hclex {
namespace {

const std::set<std::string>& abbreviation_guards() {
  static const std::set<std::string> kGuards = {
      "inc",  "no",  "mr",  "mrs", "ms",  "dr",   "jr",  "sr",     "st",  "co",  "corp",
      "ltd",  "vs",  "etc", "fig", "dept", "est", "approx", "e.g", "i.e", "u.s", "u.k",
      "u.s.a",
  };
  return kGuards;
}

bool is_terminator(char c) {
  return c == '.' || c == '!' || c == '?';
}

// The maximal run of letters/digits/dots/hyphens ending at `end` (exclusive),
// lowercased — the "word" a candidate '.' attaches to.
std::string word_before(const std::string& text, std::size_t end) {
  std::size_t begin = end;
  while (begin > 0) {
    const unsigned char c = static_cast<unsigned char>(text[begin - 1]);
    if (std::isalnum(c) || c == '.' || c == '-')
      --begin;
    else
      break;
  }
  std::string word = text.substr(begin, end - begin);
  std::transform(word.begin(), word.end(), word.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return word;
}

std::string trimmed(const std::string& text, std::size_t begin, std::size_t end) {
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

bool blank_row(const std::vector<std::string>& row) {
  return row.size() == 1 && row[0].empty();
}

}  // namespace

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    const std::size_t run_begin = i;
    while (i < n && is_terminator(text[i])) ++i;
    std::size_t end = i;
    while (end < n && (text[end] == '"' || text[end] == '\'' || text[end] == ')' ||
                       text[end] == ']'))
      ++end;

    bool boundary = true;
    if (i - run_begin == 1 && text[run_begin] == '.') {
      const bool digit_before =
          run_begin > 0 && std::isdigit(static_cast<unsigned char>(text[run_begin - 1]));
      const bool digit_after = end < n && std::isdigit(static_cast<unsigned char>(text[end]));
      if (digit_before && digit_after) {
        boundary = false;  // decimal like 3.5
      } else {
        const std::string word = word_before(text, run_begin);
        if (abbreviation_guards().count(word) ||
            (word.size() == 1 && std::isalpha(static_cast<unsigned char>(word[0]))))
          boundary = false;
      }
    }
    if (boundary) {
      auto s = trimmed(text, start, end);
      if (!s.empty()) sentences.push_back(std::move(s));
      start = end;
    }
    i = end;
  }
  auto tail = trimmed(text, start, n);
  if (!tail.empty()) sentences.push_back(std::move(tail));
  return sentences;
}

std::vector<LabeledSentence> build_dataset(const Corpus& hc_docs,
                                           const std::vector<std::string>& non_hc_pool,
                                           int neg_ratio, double train_frac, std::uint64_t seed) {
  if (neg_ratio < 1) throw std::invalid_argument("build_dataset: neg_ratio must be >= 1");
  if (train_frac <= 0.0 || train_frac >= 1.0)
    throw std::invalid_argument("build_dataset: train_frac must be in (0, 1)");

  std::vector<LabeledSentence> data;
  for (const auto& doc : hc_docs.documents)
    for (auto& s : split_sentences(doc.text))
      data.push_back({"", std::move(s), 1, "", doc.header.cik});
  const std::size_t hc_count = data.size();
  if (hc_count == 0) throw DataError("build_dataset: no HC sentences");

  const std::size_t need = hc_count * static_cast<std::size_t>(neg_ratio);
  if (non_hc_pool.size() < need)
    throw DataError("build_dataset: non-HC pool too small: need " + std::to_string(need) +
                    ", have " + std::to_string(non_hc_pool.size()));
  std::vector<std::size_t> pool_idx(non_hc_pool.size());
  for (std::size_t i = 0; i < pool_idx.size(); ++i) pool_idx[i] = i;
  Rng neg_rng(mix_seed(seed, "negatives"));
  neg_rng.shuffle(pool_idx);
  for (std::size_t i = 0; i < need; ++i)
    data.push_back({"", non_hc_pool[pool_idx[i]], 0, "", "pool"});

  // Stratified split: shuffle within each class, first chunk trains.
  for (int cls : {1, 0}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.size(); ++i)
      if (data[i].label == cls) idx.push_back(i);
    Rng split_rng(mix_seed(seed, cls ? "split_hc" : "split_non_hc"));
    split_rng.shuffle(idx);
    const auto train_n = static_cast<std::size_t>(
        std::llround(train_frac * static_cast<double>(idx.size())));
    for (std::size_t r = 0; r < idx.size(); ++r)
      data[idx[r]].split = r < train_n ? "train" : "test";
  }
  for (std::size_t i = 0; i < data.size(); ++i) data[i].id = std::to_string(i);
  return data;
}

EvalResult evaluate(const std::vector<int>& labels, const std::vector<int>& predictions) {
  if (labels.size() != predictions.size())
    throw std::invalid_argument("evaluate: length mismatch");
  if (labels.empty()) throw std::invalid_argument("evaluate: empty input");
  EvalResult r;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1)
      ++(predictions[i] == 1 ? r.tp : r.fn);
    else
      ++(predictions[i] == 1 ? r.fp : r.tn);
  }
  const auto total = static_cast<double>(labels.size());
  r.accuracy = static_cast<double>(r.tp + r.tn) / total;
  r.precision_defined = r.tp + r.fp > 0;
  r.precision = r.precision_defined ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp)
                                    : 0.0;
  r.recall_defined = r.tp + r.fn > 0;
  r.recall =
      r.recall_defined ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
  r.f1_defined = r.precision + r.recall > 0.0;
  r.f1 = r.f1_defined ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

ThresholdChoice select_threshold(const std::vector<int>& labels,
                                 const std::vector<double>& probabilities) {
  if (labels.size() != probabilities.size())
    throw std::invalid_argument("select_threshold: length mismatch");
  if (labels.empty()) throw std::invalid_argument("select_threshold: empty input");
  for (double p : probabilities)
    if (!(p >= 0.0 && p <= 1.0))
      throw DataError("select_threshold: probability out of [0,1]: " + csv::dtos(p));
  if (std::count(labels.begin(), labels.end(), 1) == 0)
    throw DataError("select_threshold: no positive labels");

  std::set<double> candidates(probabilities.begin(), probabilities.end());
  candidates.insert(0.0);
  candidates.insert(1.0);

  ThresholdChoice best;
  bool first = true;
  std::vector<int> preds(labels.size());
  for (double t : candidates) {  // ascending, so ties land on the higher threshold
    for (std::size_t i = 0; i < preds.size(); ++i) preds[i] = probabilities[i] >= t ? 1 : 0;
    EvalResult r = evaluate(labels, preds);
    if (first || r.f1 >= best.result.f1) {
      best = {t, r};
      first = false;
    }
  }
  return best;
}

void write_dataset_csv(const std::vector<LabeledSentence>& data, std::ostream& out) {
  csv::write_row(out, {"id", "split", "label", "source_doc", "text"});
  for (const auto& s : data)
    csv::write_row(out, {s.id, s.split, s.label ? "hc" : "non_hc", s.source_doc, s.text});
}

std::vector<LabeledSentence> load_dataset_csv(std::istream& in) {
  auto rows = csv::read_all(in);
  if (rows.empty() ||
      rows[0] != std::vector<std::string>{"id", "split", "label", "source_doc", "text"})
    throw DataError("dataset file: expected header 'id,split,label,source_doc,text'");
  std::vector<LabeledSentence> data;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (blank_row(rows[i])) continue;
    if (rows[i].size() != 5)
      throw DataError("dataset file row " + std::to_string(i + 1) + ": expected 5 fields");
    LabeledSentence s;
    s.id = rows[i][0];
    s.split = rows[i][1];
    if (rows[i][2] == "hc")
      s.label = 1;
    else if (rows[i][2] == "non_hc")
      s.label = 0;
    else
      throw DataError("dataset file row " + std::to_string(i + 1) + ": bad label '" + rows[i][2] +
                      "'");
    if (s.split != "train" && s.split != "test")
      throw DataError("dataset file row " + std::to_string(i + 1) + ": bad split '" + s.split +
                      "'");
    s.source_doc = rows[i][3];
    s.text = rows[i][4];
    if (s.text.empty())
      throw DataError("dataset file row " + std::to_string(i + 1) + ": empty text");
    data.push_back(std::move(s));
  }
  return data;
}

std::vector<std::pair<std::string, double>> load_probabilities_csv(std::istream& in) {
  auto rows = csv::read_all(in);
  if (rows.empty() || rows[0] != std::vector<std::string>{"id", "probability"})
    throw DataError("probability file: expected header 'id,probability'");
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (blank_row(rows[i])) continue;
    if (rows[i].size() != 2)
      throw DataError("probability file row " + std::to_string(i + 1) + ": expected 2 fields");
    try {
      std::size_t used = 0;
      const double p = std::stod(rows[i][1], &used);
      if (used != rows[i][1].size()) throw std::invalid_argument(rows[i][1]);
      out.emplace_back(rows[i][0], p);
    } catch (const std::exception&) {
      throw DataError("probability file row " + std::to_string(i + 1) + ": bad probability '" +
                      rows[i][1] + "'");
    }
  }
  return out;
}

void write_eval_report(const ThresholdChoice& choice, std::ostream& out) {
  nlohmann::json j;
  j["threshold"] = choice.threshold;
  j["confusion"] = {{"tp", choice.result.tp},
                    {"fp", choice.result.fp},
                    {"tn", choice.result.tn},
                    {"fn", choice.result.fn}};
  j["metrics"] = {{"accuracy", choice.result.accuracy},
                  {"precision", choice.result.precision},
                  {"recall", choice.result.recall},
                  {"f1", choice.result.f1}};
  j["defined"] = {{"precision", choice.result.precision_defined},
                  {"recall", choice.result.recall_defined},
                  {"f1", choice.result.f1_defined}};
  out << j.dump(2) << '\n';
}

}  // namespace hclex
