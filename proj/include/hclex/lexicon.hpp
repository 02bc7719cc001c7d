#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hclex/embedding.hpp"

namespace hclex {

struct SeedList {
  std::string category;
  std::vector<std::string> seeds;
};

// CSV `category,seed`; category order = first appearance. A seed listed under
// two categories is an error.
std::vector<SeedList> load_seeds(std::istream& in);
void save_seeds(const std::vector<SeedList>& seeds, std::ostream& out);

struct Candidate {
  std::string term;
  // Mean signed cosine against all in-vocab seeds of each category, aligned
  // with CandidateSet::categories; NaN where a category has no in-vocab seeds.
  std::vector<double> category_means;
  double signed_best_similarity = 0.0;  // cosine with the largest |value|
  double max_abs_similarity = 0.0;
  std::string proposed_category;  // argmax of means, ties by category order
  std::string source;             // "seed" | "expanded"
  bool negative_polarity = false;
};

struct CandidateSet {
  std::vector<std::string> categories;  // seed-file order
  std::vector<Candidate> candidates;    // vocab-id order
  std::vector<std::pair<std::string, std::string>> missing_seeds;  // (category, seed)
};

// A vocab term qualifies iff cosine >= threshold against some seed, or
// <= -threshold when include_antonyms; in-vocab seeds always qualify with
// source "seed". Workers split the vocab; results are merged in id order, so
// output is identical for any worker count.
CandidateSet expand(const EmbeddingMatrix& matrix, const Vocabulary& vocab,
                    const std::vector<SeedList>& seeds, double threshold = 0.5,
                    bool include_antonyms = true, int workers = 1);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  long long count_max_abs = 0;  // statistic: max-by-|.| signed cosine over seeds
  long long count_mean = 0;     // statistic: mean signed cosine over seeds
};

// 40 bins of width 0.05 spanning [-1, 1]; every vocab term contributes to
// both statistic columns.
std::vector<HistogramBin> similarity_histogram(const EmbeddingMatrix& matrix,
                                               const Vocabulary& vocab,
                                               const std::vector<SeedList>& seeds);
void write_histogram_csv(const std::vector<HistogramBin>& bins, std::ostream& out);

struct ReviewEntry {
  std::string decision;         // accept | reject | reassign
  std::string target_category;  // reassign only; "Category" or "Category:subcategory"
  std::string note;
};

struct ReviewLedger {
  std::map<std::string, ReviewEntry> entries;  // term -> decision
};

// CSV `term,decision,target_category,note`.
ReviewLedger load_review_ledger(std::istream& in);

struct LexiconEntry {
  std::string term;
  std::string category;
  std::string subcategory;  // only Health and Safety declares {general, covid}
  std::string source;
  std::optional<double> similarity;
  bool operator==(const LexiconEntry&) const = default;
};

struct Lexicon {
  std::vector<LexiconEntry> entries;
  bool operator==(const Lexicon&) const = default;
};

struct ReviewResult {
  Lexicon lexicon;
  std::vector<std::string> unknown_terms;  // ledger terms absent from candidates
};

// Rejected candidates drop out; reassigned ones move; the rest keep their
// proposed category. A category that had candidates but ends empty is an
// error; reassign targets must be declared categories.
ReviewResult apply_review(const CandidateSet& candidates, const ReviewLedger& ledger);

// CSV `term,category,subcategory,source,similarity`. Duplicate terms and
// undeclared subcategories are errors.
Lexicon load_lexicon(std::istream& in);
void save_lexicon(const Lexicon& lexicon, std::ostream& out);

// CSV `acronym,full_spelling`.
std::map<std::string, std::string> load_acronyms(std::istream& in);
void save_acronyms(const std::map<std::string, std::string>& acronyms, std::ostream& out);

// Candidate export: header `term,source,proposed_category,signed_best_similarity,
// max_abs_similarity,negative_polarity` followed by one `mean:<category>` column
// per category (full names, so the set round-trips).
void save_candidates(const CandidateSet& set, std::ostream& out);
CandidateSet load_candidates(std::istream& in);

}  // namespace hclex
