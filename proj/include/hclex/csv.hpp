#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hclex::csv {

// RFC-4180 style: fields containing comma, quote, CR or LF are quoted,
// embedded quotes doubled.
std::string escape(const std::string& field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Reads one record, honoring quoted fields that span lines.
// Returns false at end of input.
bool read_row(std::istream& in, std::vector<std::string>& fields);

std::vector<std::vector<std::string>> read_all(std::istream& in);

// Fixed-point with 4 decimals, the format used by all numeric CSV output.
std::string fixed4(double v);

// Shortest decimal form that parses back to the same double.
std::string dtos(double v);

// Lowercase identifier from free text: alnum kept, everything else collapsed
// to single underscores ("Health and Safety" -> "health_and_safety").
std::string slugify(const std::string& text);

}  // namespace hclex::csv
