#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "hclex/error.hpp"
#include "hclex/rng.hpp"
#include "hclex/scorer.hpp"

using namespace hclex;

namespace {

Lexicon make_lexicon(const std::vector<std::pair<std::string, std::string>>& terms) {
  Lexicon lex;
  for (const auto& [term, category] : terms)
    lex.entries.push_back({term, category, "", "manual", std::nullopt});
  return lex;
}

// Naive occurrence scan plus the documented leftmost-longest selection,
// written without the automaton.
std::vector<Match> brute_matches(const std::vector<std::vector<std::string>>& patterns,
                                 const TokenStream& tokens) {
  std::vector<Match> found;
  for (std::size_t pid = 0; pid < patterns.size(); ++pid) {
    const auto& pat = patterns[pid];
    if (pat.empty() || pat.size() > tokens.size()) continue;
    for (std::size_t start = 0; start + pat.size() <= tokens.size(); ++start) {
      bool ok = true;
      for (std::size_t j = 0; j < pat.size(); ++j)
        if (tokens[start + j] != pat[j]) {
          ok = false;
          break;
        }
      if (ok) found.push_back({start, static_cast<int>(pat.size()), static_cast<int>(pid)});
    }
  }
  std::sort(found.begin(), found.end(), [](const Match& a, const Match& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.length != b.length) return a.length > b.length;
    return a.pattern < b.pattern;
  });
  std::vector<Match> selected;
  std::size_t next_free = 0;
  for (const auto& m : found) {
    if (m.start < next_free) continue;
    selected.push_back(m);
    next_free = m.start + static_cast<std::size_t>(m.length);
  }
  return selected;
}

}  // namespace

TEST_CASE("category slugs") {
  CHECK_EQ(category_slug({"Health and Safety", "covid"}), "health_and_safety_covid");
  CHECK_EQ(category_slug({"Diversity, Equity, and Inclusion (DEI)", ""}),
           "diversity_equity_and_inclusion_dei");
  CHECK_EQ(category_slug({"Labor Relations and Culture", ""}), "labor_relations_and_culture");
}

TEST_CASE("compile_matcher normalizes terms and orders columns") {
  const Lexicon lex = make_lexicon({{"employees", "B Cat"},
                                    {"employee_benefits", "A Cat"},
                                    {"turnover", "B Cat"},
                                    {"pension", "C Cat"}});
  const CompiledMatcher m = compile_matcher(lex);
  // First-appearance order of category keys, not alphabetical.
  CHECK_EQ(m.column_slugs, std::vector<std::string>({"b_cat", "a_cat", "c_cat"}));
  REQUIRE_EQ(m.pattern_length.size(), 4);
  CHECK_EQ(m.pattern_length[0], 1);
  CHECK_EQ(m.pattern_length[1], 2);  // employee_benefits -> two tokens

  // Plural pattern matches the singular surface form after normalization.
  const std::vector<Match> got = find_matches(m, {"employee", "benefit"});
  REQUIRE_EQ(got.size(), 1);
  CHECK_EQ(got[0].length, 2);
  CHECK_EQ(m.pattern_category[static_cast<std::size_t>(got[0].pattern)], 1);
}

TEST_CASE("same-sequence terms merge within a category, clash across") {
  const Lexicon ok = make_lexicon({{"employee", "A"}, {"employees", "A"}});
  const CompiledMatcher m = compile_matcher(ok);
  CHECK_EQ(m.pattern_length.size(), 1);

  const Lexicon clash = make_lexicon({{"employee", "A"}, {"employees", "B"}});
  CHECK_THROWS_AS(compile_matcher(clash), DataError);
}

TEST_CASE("compile_matcher rejects degenerate input") {
  CHECK_THROWS_AS(compile_matcher(Lexicon{}), DataError);
  const Lexicon dashes = make_lexicon({{"-", "A"}});
  CHECK_THROWS_AS(compile_matcher(dashes), DataError);  // normalizes to nothing
}

TEST_CASE("excluded subcategories vanish before column registration") {
  Lexicon lex;
  lex.entries.push_back({"safety", "Health and Safety", "general", "seed", std::nullopt});
  lex.entries.push_back({"quarantine", "Health and Safety", "covid", "expanded", std::nullopt});
  lex.entries.push_back({"salary", "Compensation and Benefits", "", "seed", std::nullopt});

  const CompiledMatcher all = compile_matcher(lex);
  CHECK_EQ(all.column_slugs,
           std::vector<std::string>({"health_and_safety_general", "health_and_safety_covid",
                                     "compensation_and_benefits"}));

  const CompiledMatcher trimmed = compile_matcher(lex, {"covid"});
  CHECK_EQ(trimmed.column_slugs,
           std::vector<std::string>({"health_and_safety_general", "compensation_and_benefits"}));
  CHECK(find_matches(trimmed, {"quarantine"}).empty());
}

TEST_CASE("find_matches picks leftmost-longest non-overlapping") {
  const Lexicon lex = make_lexicon(
      {{"a_b", "X"}, {"b_c", "X"}, {"a_b_c", "X"}, {"c", "X"}, {"b_a", "X"}});
  const CompiledMatcher m = compile_matcher(lex);

  SUBCASE("longest at same start wins") {
    const auto got = find_matches(m, {"a", "b", "c"});
    REQUIRE_EQ(got.size(), 1);
    CHECK_EQ(got[0], Match{0, 3, 2});
  }
  SUBCASE("non-overlapping matches coexist") {
    const auto got = find_matches(m, {"a", "b", "x", "c"});
    REQUIRE_EQ(got.size(), 2);
    CHECK_EQ(got[0], Match{0, 2, 0});
    CHECK_EQ(got[1], Match{3, 1, 3});
  }
  SUBCASE("earlier match blocks an overlapping longer one") {
    const auto got = find_matches(m, {"b", "c", "a", "b", "c"});
    REQUIRE_EQ(got.size(), 2);
    CHECK_EQ(got[0], Match{0, 2, 1});
    CHECK_EQ(got[1], Match{2, 3, 2});
  }
  SUBCASE("alternating overlaps resolve left to right") {
    const auto got = find_matches(m, {"a", "b", "a", "b", "a"});
    REQUIRE_EQ(got.size(), 2);
    CHECK_EQ(got[0], Match{0, 2, 0});
    CHECK_EQ(got[1], Match{2, 2, 0});
  }
  SUBCASE("unknown tokens reset cleanly") {
    CHECK(find_matches(m, {"zz", "zz"}).empty());
    const auto got = find_matches(m, {"a", "zz", "b", "c"});
    REQUIRE_EQ(got.size(), 1);
    CHECK_EQ(got[0], Match{2, 2, 1});
  }
}

TEST_CASE("find_matches equals the naive scan on random streams") {
  Rng rng(4242);
  const std::vector<std::string> alphabet = {"w0", "w1", "w2", "w3", "w4", "w5", "w6", "w7"};
  for (int trial = 0; trial < 50; ++trial) {
    // Distinct random patterns of 1-3 alphabet tokens.
    std::vector<std::vector<std::string>> patterns;
    std::set<std::vector<std::string>> seen;
    while (patterns.size() < 6) {
      std::vector<std::string> pat;
      const auto len = 1 + rng.below(3);
      for (std::uint64_t j = 0; j < len; ++j)
        pat.push_back(alphabet[rng.below(alphabet.size())]);
      if (seen.insert(pat).second) patterns.push_back(pat);
    }
    Lexicon lex;
    for (const auto& pat : patterns) {
      std::string term = pat[0];
      for (std::size_t j = 1; j < pat.size(); ++j) term += "_" + pat[j];
      lex.entries.push_back({term, "X", "", "manual", std::nullopt});
    }
    const CompiledMatcher m = compile_matcher(lex);

    TokenStream stream;
    const auto n = 20 + rng.below(60);
    for (std::uint64_t i = 0; i < n; ++i) {
      if (rng.below(10) == 0)
        stream.push_back("noise");
      else
        stream.push_back(alphabet[rng.below(alphabet.size())]);
    }
    CHECK_EQ(find_matches(m, stream), brute_matches(patterns, stream));
  }
}

TEST_CASE("score_document counts matches against raw token total") {
  const Lexicon lex = make_lexicon({{"employee", "People"}, {"employee_benefit", "Pay"}});
  const CompiledMatcher m = compile_matcher(lex);
  Document doc;
  doc.header.cik = "7";
  doc.text =
      "Employees received employee benefits. Benefit costs rose; employee benefit plans "
      "expanded.";
  const DocumentScore score = score_document(m, doc);
  CHECK_EQ(score.doc_id, "7");
  CHECK_EQ(score.total_tokens, 11);
  REQUIRE_EQ(score.counts.size(), 2);
  CHECK_EQ(score.counts[0], 1);  // bare "employees"
  CHECK_EQ(score.counts[1], 2);  // two "employee benefit(s)" bigrams
}

TEST_CASE("score_corpus is order-preserving and worker-invariant") {
  const Lexicon lex =
      make_lexicon({{"alpha", "A"}, {"beta_gamma", "B"}, {"delta", "A"}});
  const CompiledMatcher m = compile_matcher(lex);
  Rng rng(11);
  const std::vector<std::string> words = {"alpha", "beta",  "gamma", "delta",
                                          "echo",  "filler", "words", "here"};
  Corpus corpus;
  for (int i = 0; i < 13; ++i) {
    Document doc;
    doc.header.cik = std::to_string(100 + i);
    for (int j = 0; j < 40; ++j)
      doc.text += words[rng.below(words.size())] + " ";
    corpus.documents.push_back(doc);
  }
  const ScoreTable base = score_corpus(m, corpus, 1);
  REQUIRE_EQ(base.docs.size(), 13);
  for (int i = 0; i < 13; ++i) CHECK_EQ(base.docs[static_cast<std::size_t>(i)].doc_id,
                                        std::to_string(100 + i));
  for (int workers : {2, 3, 5}) {
    const ScoreTable other = score_corpus(m, corpus, workers);
    CHECK_EQ(other.docs, base.docs);
    CHECK(other.failures.empty());
  }
  CHECK_THROWS_AS(score_corpus(m, corpus, 0), std::invalid_argument);
}

TEST_CASE("scores CSV round trip") {
  ScoreTable table;
  table.column_slugs = {"cat_a", "cat_b"};
  table.docs.push_back({"1001", 200, {4, 0}});
  table.docs.push_back({"1002", 0, {0, 0}});  // zero tokens: pct written as 0
  std::ostringstream out;
  write_scores_csv(table, out);
  std::istringstream check(out.str());
  std::string header, row;
  std::getline(check, header);
  CHECK_EQ(header, "doc_id,total_tokens,count_cat_a,count_cat_b,pct_cat_a,pct_cat_b");
  std::getline(check, row);
  CHECK_EQ(row, "1001,200,4,0,2.0000,0.0000");
  std::getline(check, row);
  CHECK_EQ(row, "1002,0,0,0,0.0000,0.0000");

  std::istringstream in(out.str());
  const ScoreTable back = load_scores_csv(in);
  CHECK_EQ(back.column_slugs, table.column_slugs);
  CHECK_EQ(back.docs, table.docs);

  std::istringstream bad_header("doc_id,total_tokens,count_a,pct_b\n");
  CHECK_THROWS_AS(load_scores_csv(bad_header), DataError);
  std::istringstream bad_int("doc_id,total_tokens,count_a,pct_a\nx,12,oops,0.1\n");
  CHECK_THROWS_AS(load_scores_csv(bad_int), DataError);
  std::istringstream short_row("doc_id,total_tokens,count_a,pct_a\nx,12,1\n");
  CHECK_THROWS_AS(load_scores_csv(short_row), DataError);
}

TEST_CASE("bucket specs") {
  CHECK_EQ(parse_bucket("year").kind, PeriodBucket::Kind::calendar_year);
  const PeriodBucket days = parse_bucket("days:30");
  CHECK_EQ(days.kind, PeriodBucket::Kind::days);
  CHECK_EQ(days.n, 30);
  CHECK_THROWS_AS(parse_bucket("days:0"), DataError);
  CHECK_THROWS_AS(parse_bucket("days:abc"), DataError);
  CHECK_THROWS_AS(parse_bucket("weekly"), DataError);
}

namespace {

ScoreTable period_fixture() {
  ScoreTable table;
  table.column_slugs = {"t"};
  table.docs.push_back({"d1", 100, {2}});
  table.docs.push_back({"d2", 50, {1}});
  table.docs.push_back({"d3", 10, {1}});
  table.docs.push_back({"d4", 20, {0}});
  table.docs.push_back({"d5", 30, {3}});  // no date on purpose
  return table;
}

std::map<std::string, CivilDate> period_dates() {
  return {{"d1", {2020, 1, 1}},
          {"d2", {2020, 1, 9}},
          {"d3", {2020, 1, 11}},
          {"d4", {2021, 3, 5}}};
}

}  // namespace

TEST_CASE("aggregate_by_period bins by day windows from the earliest date") {
  const PeriodReport report =
      aggregate_by_period(period_fixture(), period_dates(), parse_bucket("days:10"));
  CHECK_EQ(report.undated_docs, std::vector<std::string>{"d5"});
  REQUIRE_EQ(report.rows.size(), 3);

  CHECK_EQ(report.rows[0].bucket, "2020-01-01");
  CHECK_EQ(report.rows[0].doc_count, 2);
  CHECK_EQ(doctest::Approx(report.rows[0].mean_percent[0]).epsilon(1e-12), 2.0);
  CHECK_EQ(doctest::Approx(report.rows[0].mean_count[0]).epsilon(1e-12), 1.5);

  CHECK_EQ(report.rows[1].bucket, "2020-01-11");
  CHECK_EQ(report.rows[1].doc_count, 1);
  CHECK_EQ(doctest::Approx(report.rows[1].mean_percent[0]).epsilon(1e-12), 10.0);

  // 429 days after the origin lands in window 42, which starts at day 420.
  CHECK_EQ(report.rows[2].bucket, "2021-02-24");
  CHECK_EQ(report.rows[2].doc_count, 1);
  CHECK_EQ(report.rows[2].mean_count[0], 0.0);

  std::ostringstream out;
  write_period_csv(report, out);
  std::istringstream check(out.str());
  std::string header, row;
  std::getline(check, header);
  CHECK_EQ(header, "bucket,pct_t,count_t,doc_count");
  std::getline(check, row);
  CHECK_EQ(row, "2020-01-01,2.0000,1.5000,2");
}

TEST_CASE("aggregate_by_period calendar year mode") {
  const PeriodReport report =
      aggregate_by_period(period_fixture(), period_dates(), parse_bucket("year"));
  REQUIRE_EQ(report.rows.size(), 2);
  CHECK_EQ(report.rows[0].bucket, "2020");
  CHECK_EQ(report.rows[0].doc_count, 3);
  CHECK_EQ(report.rows[1].bucket, "2021");
  CHECK_EQ(report.rows[1].doc_count, 1);
  const double want = (2.0 + 2.0 + 10.0) / 3.0;
  CHECK_EQ(doctest::Approx(report.rows[0].mean_percent[0]).epsilon(1e-12), want);
}

TEST_CASE("aggregate_by_group computes hit shares") {
  ScoreTable table;
  table.column_slugs = {"a", "b"};
  table.docs.push_back({"d1", 100, {3, 1}});
  table.docs.push_back({"d2", 100, {1, 0}});
  table.docs.push_back({"d3", 100, {0, 0}});
  const std::map<std::string, std::string> groups = {
      {"d1", "g1"}, {"d2", "g1"}, {"d3", "g2"}};

  const GroupReport report = aggregate_by_group(table, groups);
  REQUIRE_EQ(report.rows.size(), 2);
  CHECK_EQ(report.rows[0].group, "g1");
  CHECK_EQ(report.rows[0].doc_count, 2);
  CHECK_EQ(doctest::Approx(report.rows[0].share_percent[0]).epsilon(1e-12), 80.0);
  CHECK_EQ(doctest::Approx(report.rows[0].share_percent[1]).epsilon(1e-12), 20.0);
  CHECK_EQ(doctest::Approx(report.rows[0].share_percent[0] + report.rows[0].share_percent[1])
               .epsilon(1e-12),
           100.0);
  CHECK_EQ(report.rows[1].group, "g2");  // zero hits: shares all zero
  CHECK_EQ(report.rows[1].share_percent[0], 0.0);
  CHECK_EQ(report.rows[1].share_percent[1], 0.0);

  std::ostringstream out;
  write_group_csv(report, out);
  std::istringstream check(out.str());
  std::string header, row;
  std::getline(check, header);
  CHECK_EQ(header, "group,share_a,share_b,doc_count");
  std::getline(check, row);
  CHECK_EQ(row, "g1,80.0000,20.0000,2");

  const std::map<std::string, std::string> partial = {{"d1", "g1"}};
  CHECK_THROWS_AS(aggregate_by_group(table, partial), DataError);
}

TEST_CASE("date and group metadata loaders") {
  Corpus corpus;
  corpus.documents.push_back({{"9", "Acme", "2020-05-06", "2020-03-31"}, "text"});
  const auto from_corpus = dates_from_corpus(corpus);
  CHECK_EQ(from_corpus.at("9"), CivilDate{2020, 5, 6});
  corpus.documents.push_back({{"10", "Bad", "2020-13-01", "2020-03-31"}, "text"});
  CHECK_THROWS_AS(dates_from_corpus(corpus), DataError);

  std::istringstream dates_in("doc_id,date\n7,1999-12-31\n");
  const auto dates = load_dates_csv(dates_in);
  CHECK_EQ(dates.at("7"), CivilDate{1999, 12, 31});
  std::istringstream bad_date("doc_id,date\n7,1999-02-31\n");
  CHECK_THROWS_AS(load_dates_csv(bad_date), DataError);
  std::istringstream bad_header("id,when\n");
  CHECK_THROWS_AS(load_dates_csv(bad_header), DataError);

  std::istringstream groups_in("doc_id,group\n7,tech\n8,energy\n");
  const auto groups = load_groups_csv(groups_in);
  CHECK_EQ(groups.at("7"), "tech");
  CHECK_EQ(groups.at("8"), "energy");
  std::istringstream bad_groups("doc_id,team\n");
  CHECK_THROWS_AS(load_groups_csv(bad_groups), DataError);
}
