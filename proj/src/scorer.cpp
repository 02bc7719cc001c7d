#include "hclex/scorer.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include "hclex/csv.hpp"
#include "hclex/error.hpp"

namespace hclex {
namespace {

std::vector<std::string> split_term(const std::string& term) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= term.size()) {
    const std::size_t pos = term.find('_', start);
    parts.push_back(term.substr(start, pos == std::string::npos ? pos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<std::string> pattern_tokens(const std::string& term) {
  std::vector<std::string> seq;
  for (const auto& part : split_term(term))
    for (const auto& tok : tokenize(part)) {
      auto norm = normalize_token(tok);
      if (!norm.empty()) seq.push_back(std::move(norm));
    }
  return seq;
}

bool blank_row(const std::vector<std::string>& row) {
  return row.size() == 1 && row[0].empty();
}

long long parse_ll(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string(what) + ": bad integer '" + s + "'");
  }
}

}  // namespace

std::string category_slug(const CategoryKey& key) {
  std::string slug = csv::slugify(key.category);
  if (!key.subcategory.empty()) slug += "_" + csv::slugify(key.subcategory);
  return slug;
}

CompiledMatcher compile_matcher(const Lexicon& lexicon,
                                const std::vector<std::string>& exclude_subcategories) {
  const std::set<std::string> excluded(exclude_subcategories.begin(),
                                       exclude_subcategories.end());
  CompiledMatcher m;
  m.nodes.emplace_back();  // root

  std::map<CategoryKey, int> key_index;
  std::map<std::vector<int>, int> pattern_of_seq;
  for (const auto& entry : lexicon.entries) {
    if (excluded.count(entry.subcategory)) continue;

    std::vector<int> seq;
    for (const auto& tok : pattern_tokens(entry.term)) {
      auto [it, inserted] = m.token_ids.try_emplace(tok, static_cast<int>(m.token_ids.size()));
      seq.push_back(it->second);
    }
    if (seq.empty())
      throw DataError("compile: term normalizes to empty sequence: '" + entry.term + "'");

    const CategoryKey key{entry.category, entry.subcategory};
    auto [ki, key_new] = key_index.try_emplace(key, static_cast<int>(m.category_keys.size()));
    if (key_new) {
      m.category_keys.push_back(key);
      m.column_slugs.push_back(category_slug(key));
    }

    auto [pi, pattern_new] =
        pattern_of_seq.try_emplace(seq, static_cast<int>(m.pattern_length.size()));
    if (!pattern_new) {
      // Singular/plural style duplicates merge if the category agrees.
      if (m.pattern_category[static_cast<std::size_t>(pi->second)] != ki->second)
        throw DataError("compile: terms '" + m.pattern_term[static_cast<std::size_t>(pi->second)] +
                        "' and '" + entry.term +
                        "' normalize to the same sequence in different categories");
      continue;
    }
    m.pattern_length.push_back(static_cast<int>(seq.size()));
    m.pattern_category.push_back(ki->second);
    m.pattern_term.push_back(entry.term);

    int state = 0;
    for (int id : seq) {
      auto next = m.nodes[static_cast<std::size_t>(state)].next.find(id);
      if (next == m.nodes[static_cast<std::size_t>(state)].next.end()) {
        m.nodes.emplace_back();
        m.nodes[static_cast<std::size_t>(state)].next.emplace(id,
                                                              static_cast<int>(m.nodes.size()) - 1);
        state = static_cast<int>(m.nodes.size()) - 1;
      } else {
        state = next->second;
      }
    }
    m.nodes[static_cast<std::size_t>(state)].pattern = pi->second;
  }
  if (m.pattern_length.empty()) throw DataError("compile: empty lexicon");

  // Breadth-first failure and output links.
  std::deque<int> queue;
  for (const auto& [id, v] : m.nodes[0].next) {
    m.nodes[static_cast<std::size_t>(v)].fail = 0;
    m.nodes[static_cast<std::size_t>(v)].out = -1;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const auto& [id, v] : m.nodes[static_cast<std::size_t>(u)].next) {
      int f = m.nodes[static_cast<std::size_t>(u)].fail;
      while (f != 0 && !m.nodes[static_cast<std::size_t>(f)].next.count(id))
        f = m.nodes[static_cast<std::size_t>(f)].fail;
      const auto hop = m.nodes[static_cast<std::size_t>(f)].next.find(id);
      const int fail =
          (hop != m.nodes[static_cast<std::size_t>(f)].next.end() && hop->second != v)
              ? hop->second
              : 0;
      m.nodes[static_cast<std::size_t>(v)].fail = fail;
      m.nodes[static_cast<std::size_t>(v)].out =
          m.nodes[static_cast<std::size_t>(fail)].pattern != -1
              ? fail
              : m.nodes[static_cast<std::size_t>(fail)].out;
      queue.push_back(v);
    }
  }
  return m;
}

std::vector<Match> find_matches(const CompiledMatcher& matcher, const TokenStream& tokens) {
  std::vector<Match> found;
  int state = 0;
  for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
    const auto it = matcher.token_ids.find(tokens[pos]);
    if (it == matcher.token_ids.end()) {
      state = 0;
      continue;
    }
    const int id = it->second;
    while (state != 0 && !matcher.nodes[static_cast<std::size_t>(state)].next.count(id))
      state = matcher.nodes[static_cast<std::size_t>(state)].fail;
    const auto hop = matcher.nodes[static_cast<std::size_t>(state)].next.find(id);
    state = hop != matcher.nodes[static_cast<std::size_t>(state)].next.end() ? hop->second : 0;
    for (int s = state; s != -1; s = matcher.nodes[static_cast<std::size_t>(s)].out) {
      const int pid = matcher.nodes[static_cast<std::size_t>(s)].pattern;
      if (pid == -1) continue;  // only possible for the entry state itself
      const int len = matcher.pattern_length[static_cast<std::size_t>(pid)];
      found.push_back({pos + 1 - static_cast<std::size_t>(len), len, pid});
    }
  }
  // Leftmost-longest, non-overlapping.
  std::sort(found.begin(), found.end(), [](const Match& a, const Match& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.length != b.length) return a.length > b.length;
    return a.pattern < b.pattern;
  });
  std::vector<Match> selected;
  std::size_t next_free = 0;
  for (const auto& match : found) {
    if (match.start < next_free) continue;
    selected.push_back(match);
    next_free = match.start + static_cast<std::size_t>(match.length);
  }
  return selected;
}

DocumentScore score_document(const CompiledMatcher& matcher, const Document& doc) {
  DocumentScore score;
  score.doc_id = doc.header.cik;
  score.counts.assign(matcher.category_keys.size(), 0);
  TokenStream tokens = tokenize(doc.text);
  score.total_tokens = static_cast<long long>(tokens.size());
  for (auto& t : tokens) t = normalize_token(t);
  for (const auto& match : find_matches(matcher, tokens))
    ++score.counts[static_cast<std::size_t>(
        matcher.pattern_category[static_cast<std::size_t>(match.pattern)])];
  return score;
}

ScoreTable score_corpus(const CompiledMatcher& matcher, const Corpus& corpus, int workers) {
  if (workers < 1) throw std::invalid_argument("score_corpus: workers must be >= 1");
  const std::size_t n = corpus.documents.size();
  ScoreTable table;
  table.column_slugs = matcher.column_slugs;

  std::vector<DocumentScore> results(n);
  std::vector<std::string> errors(n);
  auto run = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      try {
        results[i] = score_document(matcher, corpus.documents[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        if (errors[i].empty()) errors[i] = "unknown error";
      }
    }
  };
  if (workers == 1 || n < 2 * static_cast<std::size_t>(workers)) {
    run(0, n);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w)
      threads.emplace_back(run, n * static_cast<std::size_t>(w) / static_cast<std::size_t>(workers),
                           n * static_cast<std::size_t>(w + 1) / static_cast<std::size_t>(workers));
    for (auto& t : threads) t.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i].empty())
      table.docs.push_back(std::move(results[i]));
    else
      table.failures.emplace_back(corpus.documents[i].header.cik, errors[i]);
  }
  return table;
}

void write_scores_csv(const ScoreTable& table, std::ostream& out) {
  std::vector<std::string> header = {"doc_id", "total_tokens"};
  for (const auto& slug : table.column_slugs) header.push_back("count_" + slug);
  for (const auto& slug : table.column_slugs) header.push_back("pct_" + slug);
  csv::write_row(out, header);
  for (const auto& d : table.docs) {
    std::vector<std::string> row = {d.doc_id, std::to_string(d.total_tokens)};
    for (long long c : d.counts) row.push_back(std::to_string(c));
    for (long long c : d.counts)
      row.push_back(csv::fixed4(d.total_tokens > 0
                                    ? 100.0 * static_cast<double>(c) /
                                          static_cast<double>(d.total_tokens)
                                    : 0.0));
    csv::write_row(out, row);
  }
}

ScoreTable load_scores_csv(std::istream& in) {
  auto rows = csv::read_all(in);
  if (rows.empty()) throw DataError("scores file: empty");
  const auto& header = rows[0];
  if (header.size() < 2 || header[0] != "doc_id" || header[1] != "total_tokens")
    throw DataError("scores file: unexpected header");
  ScoreTable table;
  std::size_t i = 2;
  for (; i < header.size() && header[i].rfind("count_", 0) == 0; ++i)
    table.column_slugs.push_back(header[i].substr(6));
  const std::size_t n_cat = table.column_slugs.size();
  if (header.size() != 2 + 2 * n_cat)
    throw DataError("scores file: count/pct column mismatch");
  for (std::size_t c = 0; c < n_cat; ++c)
    if (header[2 + n_cat + c] != "pct_" + table.column_slugs[c])
      throw DataError("scores file: count/pct column mismatch");

  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (blank_row(rows[r])) continue;
    if (rows[r].size() != header.size())
      throw DataError("scores file row " + std::to_string(r + 1) + ": field count mismatch");
    DocumentScore d;
    d.doc_id = rows[r][0];
    d.total_tokens = parse_ll(rows[r][1], "scores file");
    for (std::size_t c = 0; c < n_cat; ++c)
      d.counts.push_back(parse_ll(rows[r][2 + c], "scores file"));
    table.docs.push_back(std::move(d));
  }
  return table;
}

PeriodBucket parse_bucket(const std::string& text) {
  if (text == "year") return {PeriodBucket::Kind::calendar_year, 0};
  if (text.rfind("days:", 0) == 0) {
    const long long n = parse_ll(text.substr(5), "bucket spec");
    if (n < 1) throw DataError("bucket spec: day count must be >= 1");
    return {PeriodBucket::Kind::days, static_cast<int>(n)};
  }
  throw DataError("bucket spec: expected 'days:<n>' or 'year', got '" + text + "'");
}

PeriodReport aggregate_by_period(const ScoreTable& table,
                                 const std::map<std::string, CivilDate>& dates,
                                 const PeriodBucket& bucket) {
  PeriodReport report;
  report.column_slugs = table.column_slugs;
  const std::size_t n_cat = table.column_slugs.size();

  std::vector<std::pair<const DocumentScore*, CivilDate>> dated;
  for (const auto& d : table.docs) {
    auto it = dates.find(d.doc_id);
    if (it == dates.end())
      report.undated_docs.push_back(d.doc_id);
    else
      dated.emplace_back(&d, it->second);
  }
  if (dated.empty()) return report;

  long origin = 0;
  if (bucket.kind == PeriodBucket::Kind::days) {
    origin = days_from_civil(dated[0].second);
    for (const auto& [d, date] : dated) origin = std::min(origin, days_from_civil(date));
  }

  struct Acc {
    long long docs = 0;
    std::vector<double> pct, cnt;
  };
  std::map<long, Acc> buckets;
  for (const auto& [d, date] : dated) {
    const long key = bucket.kind == PeriodBucket::Kind::days
                         ? (days_from_civil(date) - origin) / bucket.n
                         : date.year;
    auto& acc = buckets[key];
    if (acc.docs == 0) {
      acc.pct.assign(n_cat, 0.0);
      acc.cnt.assign(n_cat, 0.0);
    }
    ++acc.docs;
    for (std::size_t c = 0; c < n_cat; ++c) {
      const auto count = static_cast<double>(d->counts[c]);
      acc.pct[c] +=
          d->total_tokens > 0 ? 100.0 * count / static_cast<double>(d->total_tokens) : 0.0;
      acc.cnt[c] += count;
    }
  }
  for (const auto& [key, acc] : buckets) {
    PeriodRow row;
    row.bucket = bucket.kind == PeriodBucket::Kind::days
                     ? format_iso_date(civil_from_days(origin + key * bucket.n))
                     : std::to_string(key);
    row.doc_count = acc.docs;
    for (std::size_t c = 0; c < n_cat; ++c) {
      row.mean_percent.push_back(acc.pct[c] / static_cast<double>(acc.docs));
      row.mean_count.push_back(acc.cnt[c] / static_cast<double>(acc.docs));
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

GroupReport aggregate_by_group(const ScoreTable& table,
                               const std::map<std::string, std::string>& groups) {
  GroupReport report;
  report.column_slugs = table.column_slugs;
  const std::size_t n_cat = table.column_slugs.size();

  struct Acc {
    long long docs = 0;
    std::vector<long long> hits;
  };
  std::map<std::string, Acc> by_group;
  for (const auto& d : table.docs) {
    auto it = groups.find(d.doc_id);
    if (it == groups.end()) throw DataError("aggregate_by_group: no group for doc '" + d.doc_id + "'");
    auto& acc = by_group[it->second];
    if (acc.docs == 0) acc.hits.assign(n_cat, 0);
    ++acc.docs;
    for (std::size_t c = 0; c < n_cat; ++c) acc.hits[c] += d.counts[c];
  }
  for (const auto& [group, acc] : by_group) {
    GroupRow row;
    row.group = group;
    row.doc_count = acc.docs;
    long long total = 0;
    for (long long h : acc.hits) total += h;
    for (std::size_t c = 0; c < n_cat; ++c)
      row.share_percent.push_back(
          total > 0 ? 100.0 * static_cast<double>(acc.hits[c]) / static_cast<double>(total) : 0.0);
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_period_csv(const PeriodReport& report, std::ostream& out) {
  std::vector<std::string> header = {"bucket"};
  for (const auto& slug : report.column_slugs) header.push_back("pct_" + slug);
  for (const auto& slug : report.column_slugs) header.push_back("count_" + slug);
  header.push_back("doc_count");
  csv::write_row(out, header);
  for (const auto& row : report.rows) {
    std::vector<std::string> fields = {row.bucket};
    for (double v : row.mean_percent) fields.push_back(csv::fixed4(v));
    for (double v : row.mean_count) fields.push_back(csv::fixed4(v));
    fields.push_back(std::to_string(row.doc_count));
    csv::write_row(out, fields);
  }
}

void write_group_csv(const GroupReport& report, std::ostream& out) {
  std::vector<std::string> header = {"group"};
  for (const auto& slug : report.column_slugs) header.push_back("share_" + slug);
  header.push_back("doc_count");
  csv::write_row(out, header);
  for (const auto& row : report.rows) {
    std::vector<std::string> fields = {row.group};
    for (double v : row.share_percent) fields.push_back(csv::fixed4(v));
    fields.push_back(std::to_string(row.doc_count));
    csv::write_row(out, fields);
  }
}

std::map<std::string, CivilDate> dates_from_corpus(const Corpus& corpus) {
  std::map<std::string, CivilDate> dates;
  for (const auto& doc : corpus.documents) {
    CivilDate d;
    if (!parse_iso_date(doc.header.filing_date, &d))
      throw DataError("corpus: bad filing date '" + doc.header.filing_date + "' for cik " +
                      doc.header.cik);
    dates.emplace(doc.header.cik, d);
  }
  return dates;
}

std::map<std::string, CivilDate> load_dates_csv(std::istream& in) {
  auto rows = csv::read_all(in);
  if (rows.empty() || rows[0] != std::vector<std::string>{"doc_id", "date"})
    throw DataError("dates file: expected header 'doc_id,date'");
  std::map<std::string, CivilDate> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (blank_row(rows[i])) continue;
    if (rows[i].size() != 2)
      throw DataError("dates file row " + std::to_string(i + 1) + ": expected 2 fields");
    CivilDate d;
    if (!parse_iso_date(rows[i][1], &d))
      throw DataError("dates file row " + std::to_string(i + 1) + ": bad date '" + rows[i][1] + "'");
    out[rows[i][0]] = d;
  }
  return out;
}

std::map<std::string, std::string> load_groups_csv(std::istream& in) {
  auto rows = csv::read_all(in);
  if (rows.empty() || rows[0] != std::vector<std::string>{"doc_id", "group"})
    throw DataError("groups file: expected header 'doc_id,group'");
  std::map<std::string, std::string> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (blank_row(rows[i])) continue;
    if (rows[i].size() != 2)
      throw DataError("groups file row " + std::to_string(i + 1) + ": expected 2 fields");
    out[rows[i][0]] = rows[i][1];
  }
  return out;
}

}  // namespace hclex
