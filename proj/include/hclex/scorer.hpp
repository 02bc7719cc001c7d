#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "hclex/corpus.hpp"
#include "hclex/dates.hpp"
#include "hclex/lexicon.hpp"
#include "hclex/text.hpp"

namespace hclex {

struct CategoryKey {
  std::string category;
  std::string subcategory;
  auto operator<=>(const CategoryKey&) const = default;
};

// Column name used across all score/aggregate CSVs, e.g.
// "health_and_safety_covid", "diversity_equity_and_inclusion_dei".
std::string category_slug(const CategoryKey& key);

// Token-sequence Aho-Corasick automaton over interned pattern tokens. Terms
// split on '_' and normalized; two terms reducing to the same sequence merge
// when they share a (category, subcategory) and are an error otherwise.
struct CompiledMatcher {
  struct Node {
    std::unordered_map<int, int> next;
    int fail = 0;
    int out = -1;      // nearest suffix state that ends a pattern
    int pattern = -1;  // pattern ending exactly here
  };
  std::vector<Node> nodes;
  std::unordered_map<std::string, int> token_ids;

  std::vector<int> pattern_length;        // tokens per pattern
  std::vector<int> pattern_category;      // index into category_keys
  std::vector<std::string> pattern_term;  // representative source term

  std::vector<CategoryKey> category_keys;  // lexicon first-appearance order
  std::vector<std::string> column_slugs;   // category_slug of each key
};

CompiledMatcher compile_matcher(const Lexicon& lexicon,
                                const std::vector<std::string>& exclude_subcategories = {});

struct Match {
  std::size_t start = 0;  // token index
  int length = 0;         // in tokens
  int pattern = 0;
  bool operator==(const Match&) const = default;
};

// Leftmost-longest non-overlapping matches over an already-normalized stream.
std::vector<Match> find_matches(const CompiledMatcher& matcher, const TokenStream& tokens);

struct DocumentScore {
  std::string doc_id;
  long long total_tokens = 0;      // raw token count (denominator)
  std::vector<long long> counts;   // aligned with column slugs
  bool operator==(const DocumentScore&) const = default;
};

// Tokenizes + normalizes doc.text, then counts matches per category; every
// match counts once regardless of its token length.
DocumentScore score_document(const CompiledMatcher& matcher, const Document& doc);

struct ScoreTable {
  std::vector<std::string> column_slugs;
  std::vector<DocumentScore> docs;                          // corpus order
  std::vector<std::pair<std::string, std::string>> failures;  // (doc_id, error)
};

// Order-preserving; identical output for any worker count.
ScoreTable score_corpus(const CompiledMatcher& matcher, const Corpus& corpus, int workers = 1);

void write_scores_csv(const ScoreTable& table, std::ostream& out);
ScoreTable load_scores_csv(std::istream& in);

struct PeriodBucket {
  enum class Kind { days, calendar_year };
  Kind kind = Kind::days;
  int n = 10;  // days mode only
};

// "days:10" or "year".
PeriodBucket parse_bucket(const std::string& text);

struct PeriodRow {
  std::string bucket;  // start date (days mode) or year
  long long doc_count = 0;
  std::vector<double> mean_percent;  // mean over docs of 100*count/total
  std::vector<double> mean_count;
};

struct PeriodReport {
  std::vector<std::string> column_slugs;
  std::vector<PeriodRow> rows;              // chronological
  std::vector<std::string> undated_docs;    // excluded for missing dates
};

PeriodReport aggregate_by_period(const ScoreTable& table,
                                 const std::map<std::string, CivilDate>& dates,
                                 const PeriodBucket& bucket);

struct GroupRow {
  std::string group;
  long long doc_count = 0;
  std::vector<double> share_percent;  // of total keyword hits; sums to ~100
};

struct GroupReport {
  std::vector<std::string> column_slugs;
  std::vector<GroupRow> rows;  // by group key
};

// Every scored doc must have a group key.
GroupReport aggregate_by_group(const ScoreTable& table,
                               const std::map<std::string, std::string>& groups);

void write_period_csv(const PeriodReport& report, std::ostream& out);
void write_group_csv(const GroupReport& report, std::ostream& out);

// Metadata inputs for the aggregate stage.
std::map<std::string, CivilDate> dates_from_corpus(const Corpus& corpus);
std::map<std::string, CivilDate> load_dates_csv(std::istream& in);    // doc_id,date
std::map<std::string, std::string> load_groups_csv(std::istream& in);  // doc_id,group

}  // namespace hclex
