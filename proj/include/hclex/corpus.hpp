#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hclex {

struct DocumentHeader {
  std::string cik;            // digits, nonempty, unique within a corpus
  std::string company_name;
  std::string filing_date;    // YYYY-MM-DD, pass-through metadata
  std::string fiscal_period;  // YYYY-MM-DD

  bool operator==(const DocumentHeader&) const = default;
};

struct Document {
  DocumentHeader header;
  std::string text;  // nonempty after whitespace trimming

  bool operator==(const Document&) const = default;
};

// Immutable after construction; safe to share across threads read-only.
struct Corpus {
  std::vector<Document> documents;

  bool operator==(const Corpus&) const = default;
};

struct ParseSummary {
  std::size_t duplicate_ciks_dropped = 0;
  std::vector<std::string> rejected_empty_body;  // ciks dropped for empty text
  std::vector<std::string> warnings;
};

// Combined-file format (UTF-8 text), one record per document:
//
//   #DOC|<cik>|<company_name>|<filing_date>|<fiscal_period>
//   <body lines>
//   #END
//
// A body line beginning with '\', "#DOC|" or "#END" is written with one
// extra leading backslash; the parser strips exactly one. Company names may
// contain '|': the header is split from both ends (cik first, two dates
// last), the middle is rejoined.
Corpus parse_combined(std::istream& in, ParseSummary* summary = nullptr);
void write_combined(const Corpus& corpus, std::ostream& out);

// One row per document: cik,company_name,filing_date,fiscal_period,text
void write_csv(const Corpus& corpus, std::ostream& out);

struct CorpusStats {
  std::size_t document_count = 0;
  std::uint64_t total_tokens = 0;
};
CorpusStats corpus_stats(const Corpus& corpus);

// Screening arithmetic for the training corpus of confirmed HC disclosures:
// 10-K filings from the first year of the SEC disclosure mandate, filtered
// down to one disclosure per unique filer. Rows with delta 0 are subtotals.
struct SelectionRow {
  std::string label;
  long delta = 0;
  long count = 0;  // running total after applying delta
};
std::vector<SelectionRow> selection_reconciliation();

}  // namespace hclex
