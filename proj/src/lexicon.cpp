#include "hclex/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <thread>
#include <unordered_set>

#include "hclex/csv.hpp"
#include "hclex/error.hpp"

namespace hclex {
namespace {

constexpr const char* kHealthSafety = "Health and Safety";
const std::set<std::string> kHealthSafetySubcategories = {"general", "covid"};

void require_header(const std::vector<std::string>& row, const std::vector<std::string>& expected,
                    const char* what) {
  if (row != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i)
      want += (i ? "," : "") + expected[i];
    throw DataError(std::string(what) + ": expected header '" + want + "'");
  }
}

bool blank_row(const std::vector<std::string>& row) {
  return row.size() == 1 && row[0].empty();
}

double parse_double(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty())
    throw DataError(std::string(what) + ": bad number '" + s + "'");
  return v;
}

struct SeedIndex {
  std::vector<std::vector<int>> ids_per_category;  // in-vocab seed ids, seed-file order
  std::vector<std::pair<std::string, std::string>> missing;
  std::unordered_set<std::string> seed_terms;  // raw strings across categories
  std::size_t total_in_vocab = 0;
};

SeedIndex index_seeds(const Vocabulary& vocab, const std::vector<SeedList>& seeds) {
  SeedIndex idx;
  idx.ids_per_category.resize(seeds.size());
  for (std::size_t ci = 0; ci < seeds.size(); ++ci) {
    for (const auto& s : seeds[ci].seeds) {
      idx.seed_terms.insert(s);
      if (int id = vocab.find(s); id >= 0) {
        idx.ids_per_category[ci].push_back(id);
        ++idx.total_in_vocab;
      } else {
        idx.missing.emplace_back(seeds[ci].category, s);
      }
    }
  }
  if (idx.total_in_vocab == 0) throw DataError("no seed found in vocabulary");
  return idx;
}

std::string default_subcategory(const std::string& category) {
  return category == kHealthSafety ? "general" : "";
}

void check_subcategory(const std::string& category, const std::string& subcategory,
                       const char* what) {
  if (subcategory.empty()) return;
  if (category != kHealthSafety || !kHealthSafetySubcategories.count(subcategory))
    throw DataError(std::string(what) + ": unknown subcategory '" + subcategory +
                    "' for category '" + category + "'");
}

}  // namespace

std::vector<SeedList> load_seeds(std::istream& in) {
  auto rows = csv::read_all(in);
  if (rows.empty()) throw DataError("seed file: empty");
  require_header(rows[0], {"category", "seed"}, "seed file");
  std::vector<SeedList> out;
  std::map<std::string, std::size_t> index_of;
  std::set<std::string> seen_seeds;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (blank_row(rows[i])) continue;
    if (rows[i].size() != 2)
      throw DataError("seed file row " + std::to_string(i + 1) + ": expected 2 fields");
    const auto& [category, seed] = std::tie(rows[i][0], rows[i][1]);
    if (category.empty() || seed.empty())
      throw DataError("seed file row " + std::to_string(i + 1) + ": empty field");
    if (!seen_seeds.insert(seed).second)
      throw DataError("seed file: seed '" + seed + "' listed more than once");
    auto [it, inserted] = index_of.try_emplace(category, out.size());
    if (inserted) out.push_back({category, {}});
    out[it->second].seeds.push_back(seed);
  }
  if (out.empty()) throw DataError("seed file: no seeds");
  return out;
}

void save_seeds(const std::vector<SeedList>& seeds, std::ostream& out) {
  csv::write_row(out, {"category", "seed"});
  for (const auto& list : seeds)
    for (const auto& s : list.seeds) csv::write_row(out, {list.category, s});
}

CandidateSet expand(const EmbeddingMatrix& matrix, const Vocabulary& vocab,
                    const std::vector<SeedList>& seeds, double threshold, bool include_antonyms,
                    int workers) {
  if (workers < 1) throw std::invalid_argument("expand: workers must be >= 1");
  const SeedIndex idx = index_seeds(vocab, seeds);

  CandidateSet set;
  for (const auto& list : seeds) set.categories.push_back(list.category);
  set.missing_seeds = idx.missing;

  const int v = vocab.size();
  const std::size_t n_cat = seeds.size();
  auto scan = [&](int lo, int hi, std::vector<Candidate>& out_shard) {
    for (int id = lo; id < hi; ++id) {
      Candidate cand;
      cand.category_means.assign(n_cat, std::numeric_limits<double>::quiet_NaN());
      bool qualifies = false;
      double best = 0.0, best_abs = -1.0;
      for (std::size_t ci = 0; ci < n_cat; ++ci) {
        const auto& sids = idx.ids_per_category[ci];
        if (sids.empty()) continue;
        double sum = 0.0;
        for (int sid : sids) {
          const double c = cosine(matrix.input.row(id), matrix.input.row(sid));
          sum += c;
          if (std::abs(c) > best_abs) {
            best_abs = std::abs(c);
            best = c;
          }
          if (c >= threshold || (include_antonyms && c <= -threshold)) qualifies = true;
        }
        cand.category_means[ci] = sum / static_cast<double>(sids.size());
      }
      const bool is_seed = idx.seed_terms.count(vocab.tokens[id]) != 0;
      if (!qualifies && !is_seed) continue;
      cand.term = vocab.tokens[id];
      cand.signed_best_similarity = best;
      cand.max_abs_similarity = best_abs;
      cand.negative_polarity = best < 0.0;
      cand.source = is_seed ? "seed" : "expanded";
      std::size_t best_ci = n_cat;
      for (std::size_t ci = 0; ci < n_cat; ++ci) {
        if (std::isnan(cand.category_means[ci])) continue;
        if (best_ci == n_cat || cand.category_means[ci] > cand.category_means[best_ci])
          best_ci = ci;
      }
      cand.proposed_category = set.categories[best_ci];
      out_shard.push_back(std::move(cand));
    }
  };

  if (workers == 1 || v < 2 * workers) {
    scan(0, v, set.candidates);
  } else {
    std::vector<std::vector<Candidate>> shards(workers);
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
      const int lo = static_cast<int>(static_cast<long long>(v) * w / workers);
      const int hi = static_cast<int>(static_cast<long long>(v) * (w + 1) / workers);
      threads.emplace_back(scan, lo, hi, std::ref(shards[w]));
    }
    for (auto& t : threads) t.join();
    for (auto& shard : shards)
      for (auto& c : shard) set.candidates.push_back(std::move(c));
  }
  return set;
}

std::vector<HistogramBin> similarity_histogram(const EmbeddingMatrix& matrix,
                                               const Vocabulary& vocab,
                                               const std::vector<SeedList>& seeds) {
  const SeedIndex idx = index_seeds(vocab, seeds);
  std::vector<int> all_ids;
  for (const auto& ids : idx.ids_per_category) all_ids.insert(all_ids.end(), ids.begin(), ids.end());

  constexpr int n_bins = 40;
  std::vector<HistogramBin> bins(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    bins[b].lo = -1.0 + 0.05 * b;
    bins[b].hi = bins[b].lo + 0.05;
  }
  auto bin_of = [](double x) {
    int b = static_cast<int>(std::floor((x + 1.0) / 0.05));
    return std::clamp(b, 0, n_bins - 1);
  };
  for (int id = 0; id < vocab.size(); ++id) {
    double best = 0.0, best_abs = -1.0, sum = 0.0;
    for (int sid : all_ids) {
      const double c = cosine(matrix.input.row(id), matrix.input.row(sid));
      sum += c;
      if (std::abs(c) > best_abs) {
        best_abs = std::abs(c);
        best = c;
      }
    }
    ++bins[bin_of(best)].count_max_abs;
    ++bins[bin_of(sum / static_cast<double>(all_ids.size()))].count_mean;
  }
  return bins;
}

void write_histogram_csv(const std::vector<HistogramBin>& bins, std::ostream& out) {
  csv::write_row(out, {"bin_lo", "bin_hi", "count_max_abs", "count_mean"});
  for (const auto& b : bins)
    csv::write_row(out, {csv::fixed4(b.lo), csv::fixed4(b.hi), std::to_string(b.count_max_abs),
                         std::to_string(b.count_mean)});
}

ReviewLedger load_review_ledger(std::istream& in) {
  auto rows = csv::read_all(in);
  if (rows.empty()) throw DataError("review ledger: empty file (header required)");
  require_header(rows[0], {"term", "decision", "target_category", "note"}, "review ledger");
  ReviewLedger ledger;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (blank_row(rows[i])) continue;
    if (rows[i].size() != 4)
      throw DataError("review ledger row " + std::to_string(i + 1) + ": expected 4 fields");
    const auto& term = rows[i][0];
    ReviewEntry e{rows[i][1], rows[i][2], rows[i][3]};
    if (e.decision != "accept" && e.decision != "reject" && e.decision != "reassign")
      throw DataError("review ledger row " + std::to_string(i + 1) + ": unknown decision '" +
                      e.decision + "'");
    if (e.decision == "reassign" && e.target_category.empty())
      throw DataError("review ledger row " + std::to_string(i + 1) +
                      ": reassign requires target_category");
    if (!ledger.entries.emplace(term, std::move(e)).second)
      throw DataError("review ledger: duplicate term '" + term + "'");
  }
  return ledger;
}

ReviewResult apply_review(const CandidateSet& candidates, const ReviewLedger& ledger) {
  const std::set<std::string> declared(candidates.categories.begin(), candidates.categories.end());

  // Pre-validate reassign targets ("Category" or "Category:subcategory").
  std::map<std::string, std::pair<std::string, std::string>> target_of;
  for (const auto& [term, e] : ledger.entries) {
    if (e.decision != "reassign") continue;
    std::string category = e.target_category, subcategory;
    if (auto pos = e.target_category.find(':'); pos != std::string::npos) {
      category = e.target_category.substr(0, pos);
      subcategory = e.target_category.substr(pos + 1);
    }
    if (!declared.count(category))
      throw DataError("review ledger: reassign to undeclared category '" + category + "'");
    if (subcategory.empty()) subcategory = default_subcategory(category);
    check_subcategory(category, subcategory, "review ledger");
    target_of[term] = {category, subcategory};
  }

  std::unordered_set<std::string> candidate_terms;
  for (const auto& c : candidates.candidates) candidate_terms.insert(c.term);

  ReviewResult result;
  for (const auto& [term, e] : ledger.entries)
    if (!candidate_terms.count(term)) result.unknown_terms.push_back(term);

  // Categories that had a fighting chance: proposed for some candidate or a
  // reassign target. Only these must end up nonempty.
  std::set<std::string> relevant;
  std::map<std::string, long long> entry_count;
  for (const auto& c : candidates.candidates) relevant.insert(c.proposed_category);
  for (const auto& [term, target] : target_of)
    if (candidate_terms.count(term)) relevant.insert(target.first);

  for (const auto& c : candidates.candidates) {
    auto it = ledger.entries.find(c.term);
    std::string category = c.proposed_category;
    std::string subcategory = default_subcategory(category);
    if (it != ledger.entries.end()) {
      if (it->second.decision == "reject") continue;
      if (it->second.decision == "reassign") {
        const auto& target = target_of.at(c.term);
        category = target.first;
        subcategory = target.second;
      }
    }
    result.lexicon.entries.push_back({c.term, category, subcategory, c.source,
                                      c.signed_best_similarity});
    ++entry_count[category];
  }
  for (const auto& category : relevant)
    if (entry_count[category] == 0) throw DataError("category empty: " + category);
  return result;
}

Lexicon load_lexicon(std::istream& in) {
  auto rows = csv::read_all(in);
  if (rows.empty()) throw DataError("lexicon file: empty");
  require_header(rows[0], {"term", "category", "subcategory", "source", "similarity"},
                 "lexicon file");
  Lexicon lex;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (blank_row(rows[i])) continue;
    if (rows[i].size() != 5)
      throw DataError("lexicon file row " + std::to_string(i + 1) + ": expected 5 fields");
    LexiconEntry e{rows[i][0], rows[i][1], rows[i][2], rows[i][3], std::nullopt};
    if (e.term.empty() || e.category.empty())
      throw DataError("lexicon file row " + std::to_string(i + 1) + ": empty term or category");
    if (!seen.insert(e.term).second) throw DataError("lexicon file: duplicate term '" + e.term + "'");
    check_subcategory(e.category, e.subcategory, "lexicon file");
    if (!rows[i][4].empty()) e.similarity = parse_double(rows[i][4], "lexicon file similarity");
    lex.entries.push_back(std::move(e));
  }
  return lex;
}

void save_lexicon(const Lexicon& lexicon, std::ostream& out) {
  csv::write_row(out, {"term", "category", "subcategory", "source", "similarity"});
  for (const auto& e : lexicon.entries)
    csv::write_row(out, {e.term, e.category, e.subcategory, e.source,
                         e.similarity ? csv::dtos(*e.similarity) : ""});
}

std::map<std::string, std::string> load_acronyms(std::istream& in) {
  auto rows = csv::read_all(in);
  if (rows.empty()) throw DataError("acronym file: empty");
  require_header(rows[0], {"acronym", "full_spelling"}, "acronym file");
  std::map<std::string, std::string> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (blank_row(rows[i])) continue;
    if (rows[i].size() != 2)
      throw DataError("acronym file row " + std::to_string(i + 1) + ": expected 2 fields");
    if (!out.emplace(rows[i][0], rows[i][1]).second)
      throw DataError("acronym file: duplicate acronym '" + rows[i][0] + "'");
  }
  return out;
}

void save_acronyms(const std::map<std::string, std::string>& acronyms, std::ostream& out) {
  csv::write_row(out, {"acronym", "full_spelling"});
  for (const auto& [a, full] : acronyms) csv::write_row(out, {a, full});
}

void save_candidates(const CandidateSet& set, std::ostream& out) {
  std::vector<std::string> header = {"term",
                                     "source",
                                     "proposed_category",
                                     "signed_best_similarity",
                                     "max_abs_similarity",
                                     "negative_polarity"};
  for (const auto& c : set.categories) header.push_back("mean:" + c);
  csv::write_row(out, header);
  for (const auto& c : set.candidates) {
    std::vector<std::string> row = {c.term,
                                    c.source,
                                    c.proposed_category,
                                    csv::dtos(c.signed_best_similarity),
                                    csv::dtos(c.max_abs_similarity),
                                    c.negative_polarity ? "1" : "0"};
    for (double m : c.category_means) row.push_back(std::isnan(m) ? "" : csv::dtos(m));
    csv::write_row(out, row);
  }
}

CandidateSet load_candidates(std::istream& in) {
  auto rows = csv::read_all(in);
  if (rows.empty()) throw DataError("candidate file: empty");
  const std::vector<std::string> prefix = {"term",
                                           "source",
                                           "proposed_category",
                                           "signed_best_similarity",
                                           "max_abs_similarity",
                                           "negative_polarity"};
  const auto& header = rows[0];
  if (header.size() < prefix.size() ||
      !std::equal(prefix.begin(), prefix.end(), header.begin()))
    throw DataError("candidate file: unexpected header");
  CandidateSet set;
  for (std::size_t i = prefix.size(); i < header.size(); ++i) {
    if (header[i].rfind("mean:", 0) != 0)
      throw DataError("candidate file: expected 'mean:<category>' column, got '" + header[i] + "'");
    set.categories.push_back(header[i].substr(5));
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (blank_row(rows[i])) continue;
    if (rows[i].size() != header.size())
      throw DataError("candidate file row " + std::to_string(i + 1) + ": field count mismatch");
    Candidate c;
    c.term = rows[i][0];
    c.source = rows[i][1];
    c.proposed_category = rows[i][2];
    c.signed_best_similarity = parse_double(rows[i][3], "candidate file");
    c.max_abs_similarity = parse_double(rows[i][4], "candidate file");
    c.negative_polarity = rows[i][5] == "1";
    for (std::size_t j = prefix.size(); j < rows[i].size(); ++j)
      c.category_means.push_back(rows[i][j].empty() ? std::numeric_limits<double>::quiet_NaN()
                                                    : parse_double(rows[i][j], "candidate file"));
    set.candidates.push_back(std::move(c));
  }
  return set;
}

}  // namespace hclex
