#pragma once

#include <string>
#include <string_view>

namespace hclex {

struct CivilDate {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const CivilDate&) const = default;
};

// Strict YYYY-MM-DD with calendar validation (month range, month length,
// leap years). Returns false on anything else.
bool parse_iso_date(std::string_view s, CivilDate* out = nullptr);

// Days since 1970-01-01 in the proleptic Gregorian calendar.
long days_from_civil(const CivilDate& d);

// Inverse of days_from_civil.
CivilDate civil_from_days(long days);

// YYYY-MM-DD, zero-padded.
std::string format_iso_date(const CivilDate& d);

}  // namespace hclex
