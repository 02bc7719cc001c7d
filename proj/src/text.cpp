#include "hclex/text.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "hclex/csv.hpp"
#include "hclex/error.hpp"

namespace hclex {
namespace {

bool is_token_char(unsigned char c) {
  return std::isalnum(c) != 0 || c == '-' || c == '_';
}

// Typographic punctuation that should split tokens even though it is
// multi-byte UTF-8. Returns the sequence length, or 0 if `s` does not start
// with a known separator.
std::size_t utf8_separator_len(std::string_view s) {
  if (s.size() >= 2 && static_cast<unsigned char>(s[0]) == 0xC2 &&
      static_cast<unsigned char>(s[1]) == 0xA0)
    return 2;  // no-break space
  if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xE2 &&
      static_cast<unsigned char>(s[1]) == 0x80) {
    const unsigned char c = static_cast<unsigned char>(s[2]);
    // en/em dash, curly quotes, ellipsis
    if (c == 0x93 || c == 0x94 || c == 0x98 || c == 0x99 || c == 0x9C || c == 0x9D || c == 0xA6)
      return 3;
  }
  return 0;
}

void flush_token(std::string& cur, TokenStream& out) {
  // Hyphens/underscores are only meaningful inside a token.
  std::size_t b = 0, e = cur.size();
  while (b < e && (cur[b] == '-' || cur[b] == '_')) ++b;
  while (e > b && (cur[e - 1] == '-' || cur[e - 1] == '_')) --e;
  if (e > b) out.emplace_back(cur.substr(b, e - b));
  cur.clear();
}

const std::unordered_set<std::string>& normalize_exceptions() {
  static const std::unordered_set<std::string> kExceptions = {
      "business", "news",    "premises", "species", "series",
      "diabetes", "whereas", "perhaps",  "always",
  };
  return kExceptions;
}

bool ends_with(std::string_view s, std::string_view suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

}  // namespace

TokenStream tokenize(std::string_view text) {
  TokenStream out;
  std::string cur;
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      if (is_token_char(c)) {
        cur.push_back(static_cast<char>(std::tolower(c)));
      } else {
        flush_token(cur, out);  // covers whitespace, punctuation, apostrophes
      }
      ++i;
    } else if (std::size_t n = utf8_separator_len(text.substr(i)); n > 0) {
      flush_token(cur, out);
      i += n;
    } else {
      cur.push_back(text[i]);  // other non-ASCII bytes stay part of the token
      ++i;
    }
  }
  flush_token(cur, out);
  return out;
}

std::string normalize_token(std::string_view token) {
  std::string t(token);
  // Each rule strictly shortens the token, so this terminates; running to a
  // fixed point is what makes the function idempotent.
  for (;;) {
    if (normalize_exceptions().count(t)) return t;
    std::string before = t;
    if (ends_with(t, "'s")) {
      t.resize(t.size() - 2);
    } else if (ends_with(t, "\xE2\x80\x99s")) {
      t.resize(t.size() - 4);
    } else if (ends_with(t, "ies") && t.size() > 4) {
      t.resize(t.size() - 3);
      t.push_back('y');
    } else if (ends_with(t, "es") &&
               (ends_with(std::string_view(t).substr(0, t.size() - 2), "s") ||
                ends_with(std::string_view(t).substr(0, t.size() - 2), "x") ||
                ends_with(std::string_view(t).substr(0, t.size() - 2), "z") ||
                ends_with(std::string_view(t).substr(0, t.size() - 2), "ch") ||
                ends_with(std::string_view(t).substr(0, t.size() - 2), "sh"))) {
      t.resize(t.size() - 2);
    } else if (ends_with(t, "s") && t.size() > 3 && !ends_with(t, "ss") && !ends_with(t, "us") &&
               !ends_with(t, "is")) {
      t.resize(t.size() - 1);
    }
    if (t == before) return t;
  }
}

TokenStream normalize_stream(const TokenStream& tokens) {
  TokenStream out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(normalize_token(t));
  return out;
}

PhraseTable learn_phrases(const std::vector<TokenStream>& streams, int min_count, double threshold,
                          int passes) {
  if (min_count < 1) throw std::invalid_argument("learn_phrases: min_count must be >= 1");
  if (passes < 1) throw std::invalid_argument("learn_phrases: passes must be >= 1");

  PhraseTable table;
  table.passes = passes;
  std::vector<TokenStream> current = streams;

  for (int pass = 0; pass < passes; ++pass) {
    std::unordered_map<std::string, long long> uni;
    std::unordered_map<std::string, long long> bi;  // key "a\x1F b"
    for (const auto& s : current) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        ++uni[s[i]];
        if (i + 1 < s.size()) ++bi[s[i] + '\x1F' + s[i + 1]];
      }
    }
    const double n_vocab = static_cast<double>(uni.size());
    for (const auto& [key, cab] : bi) {
      const std::size_t sep = key.find('\x1F');
      std::string a = key.substr(0, sep);
      std::string b = key.substr(sep + 1);
      const double score = (static_cast<double>(cab) - min_count) * n_vocab /
                           (static_cast<double>(uni[a]) * static_cast<double>(uni[b]));
      if (score > threshold) {
        auto [it, inserted] = table.entries.try_emplace({std::move(a), std::move(b)}, score);
        if (!inserted && score > it->second) it->second = score;
      }
    }
    if (pass + 1 < passes)
      for (auto& s : current) s = merge_phrases(s, table);
  }
  return table;
}

TokenStream merge_phrases(const TokenStream& stream, const PhraseTable& table) {
  TokenStream out;
  out.reserve(stream.size());
  std::size_t i = 0;
  while (i < stream.size()) {
    if (i + 1 < stream.size() && table.contains(stream[i], stream[i + 1])) {
      out.push_back(stream[i] + '_' + stream[i + 1]);
      i += 2;
    } else {
      out.push_back(stream[i]);
      ++i;
    }
  }
  return out;
}

TokenStream merge_all(const TokenStream& stream, const PhraseTable& table) {
  TokenStream out = stream;
  for (int p = 0; p < table.passes; ++p) out = merge_phrases(out, table);
  return out;
}

void save_phrase_table(const PhraseTable& table, std::ostream& out) {
  std::vector<std::pair<std::pair<std::string, std::string>, double>> rows(table.entries.begin(),
                                                                           table.entries.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  for (const auto& [pair, score] : rows)
    out << pair.first << '\t' << pair.second << '\t' << csv::dtos(score) << '\n';
}

PhraseTable load_phrase_table(std::istream& in) {
  PhraseTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw DataError("phrase table line " + std::to_string(lineno) +
                      ": expected 3 tab-separated fields");
    char* end = nullptr;
    const std::string score_text = line.substr(t2 + 1);
    const double score = std::strtod(score_text.c_str(), &end);
    if (end == score_text.c_str() || *end != '\0')
      throw DataError("phrase table line " + std::to_string(lineno) + ": bad score '" +
                      score_text + "'");
    table.entries[{line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1)}] = score;
  }
  return table;
}

}  // namespace hclex
