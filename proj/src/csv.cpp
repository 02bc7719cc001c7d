#include "hclex/csv.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

namespace hclex::csv {

std::string escape(const std::string& field) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return field;
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(',');
    out << escape(fields[i]);
  }
  out.put('\n');
}

bool read_row(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  int c = in.get();
  if (c == std::istream::traits_type::eof()) return false;

  std::string field;
  bool in_quotes = false;
  bool saw_any = false;
  while (c != std::istream::traits_type::eof()) {
    char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        int next = in.peek();
        if (next == '"') {
          in.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty() && !saw_any) {
      in_quotes = true;
      saw_any = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      saw_any = false;
    } else if (ch == '\n') {
      break;
    } else if (ch == '\r') {
      // swallow; CRLF handled when the '\n' arrives
    } else {
      field.push_back(ch);
      saw_any = true;
    }
    c = in.get();
  }
  fields.push_back(std::move(field));
  return true;
}

std::vector<std::vector<std::string>> read_all(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  while (read_row(in, row)) rows.push_back(row);
  return rows;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string dtos(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string slugify(const std::string& text) {
  std::string out;
  bool pending_sep = false;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      if (pending_sep && !out.empty()) out.push_back('_');
      pending_sep = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pending_sep = true;
    }
  }
  return out;
}

}  // namespace hclex::csv
