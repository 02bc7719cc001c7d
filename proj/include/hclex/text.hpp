#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hclex {

// Lowercase tokens, no whitespace; internal hyphens and underscores allowed.
using TokenStream = std::vector<std::string>;

// Lowercases, strips punctuation except intra-word hyphens ("work-life",
// "covid-19" stay single tokens), keeps digit-only tokens. Deterministic;
// empty input gives an empty stream.
TokenStream tokenize(std::string_view text);

// Lemma-lite: a fixed suffix-rule table (possessive 's, plural s/es,
// ies->y) guarded by an exception list. Idempotent.
std::string normalize_token(std::string_view token);

TokenStream normalize_stream(const TokenStream& tokens);

// Collocation scores for adjacent token pairs:
//   score(a,b) = (count(ab) - min_count) * N / (count(a) * count(b))
// with N the number of distinct tokens. Pairs scoring > threshold are kept.
// Entries from later passes reference already-merged tokens, so building
// trigrams takes as many merge passes as learning passes.
struct PhraseTable {
  std::map<std::pair<std::string, std::string>, double> entries;
  int passes = 1;

  bool contains(const std::string& a, const std::string& b) const {
    return entries.find({a, b}) != entries.end();
  }
};

PhraseTable learn_phrases(const std::vector<TokenStream>& streams, int min_count = 5,
                          double threshold = 10.0, int passes = 2);

// One greedy left-to-right pass: an adjacent pair present in the table is
// joined with '_' and the scan resumes after it (no overlapping merges).
TokenStream merge_phrases(const TokenStream& stream, const PhraseTable& table);

// merge_phrases applied table.passes times.
TokenStream merge_all(const TokenStream& stream, const PhraseTable& table);

// TSV: token_a<TAB>token_b<TAB>score, sorted descending by score.
void save_phrase_table(const PhraseTable& table, std::ostream& out);
PhraseTable load_phrase_table(std::istream& in);

}  // namespace hclex
