#include "hclex/corpus.hpp"

#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "hclex/csv.hpp"
#include "hclex/dates.hpp"
#include "hclex/error.hpp"
#include "hclex/text.hpp"

namespace hclex {

namespace {

constexpr const char* kDocSentinel = "#DOC|";
constexpr const char* kEndSentinel = "#END";

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

bool blank(const std::string& s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == delim) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

DocumentHeader parse_header_line(const std::string& line, std::size_t lineno) {
  auto parts = split(line, '|');
  // parts[0] == "#DOC"; cik from the front, two dates from the back,
  // everything between rejoined as the company name.
  if (parts.size() < 5) {
    throw DataError("line " + std::to_string(lineno) +
                    ": malformed record header (expected "
                    "#DOC|cik|name|filing_date|fiscal_period)");
  }
  DocumentHeader h;
  h.cik = parts[1];
  h.fiscal_period = parts.back();
  h.filing_date = parts[parts.size() - 2];
  std::string name;
  for (std::size_t i = 2; i + 2 < parts.size(); ++i) {
    if (i > 2) name += '|';
    name += parts[i];
  }
  h.company_name = name;
  if (!all_digits(h.cik)) {
    throw DataError("line " + std::to_string(lineno) + ": cik must be nonempty digits, got '" +
                    h.cik + "'");
  }
  if (!parse_iso_date(h.filing_date)) {
    throw DataError("line " + std::to_string(lineno) + ": bad filing date '" + h.filing_date +
                    "'");
  }
  if (!parse_iso_date(h.fiscal_period)) {
    throw DataError("line " + std::to_string(lineno) + ": bad fiscal period '" + h.fiscal_period +
                    "'");
  }
  return h;
}

}  // namespace

Corpus parse_combined(std::istream& in, ParseSummary* summary) {
  ParseSummary local;
  ParseSummary& sum = summary ? *summary : local;
  sum = ParseSummary{};

  Corpus corpus;
  std::unordered_set<std::string> seen_ciks;
  std::string line;
  std::size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;  // blank lines between records tolerated
    if (line.rfind(kDocSentinel, 0) != 0) {
      throw DataError("line " + std::to_string(lineno) +
                      ": expected record header starting with #DOC|");
    }
    DocumentHeader header = parse_header_line(line, lineno);

    std::string body;
    bool first_line = true;
    bool terminated = false;
    while (std::getline(in, line)) {
      ++lineno;
      if (line == kEndSentinel) {
        terminated = true;
        break;
      }
      if (!line.empty() && line[0] == '\\') line.erase(0, 1);
      if (!first_line) body += '\n';
      body += line;
      first_line = false;
    }
    if (!terminated) {
      throw DataError("line " + std::to_string(lineno) + ": record for cik " + header.cik +
                      " not terminated by #END");
    }

    if (blank(body)) {
      sum.rejected_empty_body.push_back(header.cik);
      sum.warnings.push_back("cik " + header.cik + ": empty body, document rejected");
      continue;
    }
    if (!seen_ciks.insert(header.cik).second) {
      ++sum.duplicate_ciks_dropped;  // first record kept
      continue;
    }
    corpus.documents.push_back(Document{std::move(header), std::move(body)});
  }
  return corpus;
}

void write_combined(const Corpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus.documents) {
    const auto& h = doc.header;
    out << kDocSentinel << h.cik << '|' << h.company_name << '|' << h.filing_date << '|'
        << h.fiscal_period << '\n';
    for (const std::string& line : split(doc.text, '\n')) {
      if (!line.empty() &&
          (line[0] == '\\' || line.rfind(kDocSentinel, 0) == 0 || line.rfind(kEndSentinel, 0) == 0)) {
        out << '\\';
      }
      out << line << '\n';
    }
    out << kEndSentinel << '\n';
  }
}

void write_csv(const Corpus& corpus, std::ostream& out) {
  csv::write_row(out, {"cik", "company_name", "filing_date", "fiscal_period", "text"});
  for (const auto& doc : corpus.documents) {
    const auto& h = doc.header;
    csv::write_row(out, {h.cik, h.company_name, h.filing_date, h.fiscal_period, doc.text});
  }
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.document_count = corpus.documents.size();
  for (const auto& doc : corpus.documents) {
    stats.total_tokens += tokenize(doc.text).size();
  }
  return stats;
}

std::vector<SelectionRow> selection_reconciliation() {
  struct Step {
    const char* label;
    long delta;
    bool subtotal;
  };
  static const Step steps[] = {
      {"10-K filings in the first year of the disclosure mandate", 7185, false},
      {"less: filers not covered by Compustat and CRSP", -3219, false},
      {"10-Ks in the intersection of EDGAR, Compustat, and CRSP", 0, true},
      {"less: filings for fiscal year 2019", -5, false},
      {"less: filings from firms having no employees", -3, false},
      {"less: filings without HC disclosures", -2, false},
      {"less: duplicate filings from the same filer (first kept)", -3, false},
      {"HC disclosures from unique firms", 0, true},
  };
  std::vector<SelectionRow> rows;
  long running = 0;
  for (const Step& s : steps) {
    running += s.delta;
    rows.push_back(SelectionRow{s.label, s.delta, running});
  }
  return rows;
}

}  // namespace hclex
