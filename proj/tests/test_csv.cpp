#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "hclex/csv.hpp"

using namespace hclex;

TEST_CASE("escape quotes only when needed") {
  CHECK_EQ(csv::escape("plain"), "plain");
  CHECK_EQ(csv::escape(""), "");
  CHECK_EQ(csv::escape("a,b"), "\"a,b\"");
  CHECK_EQ(csv::escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  CHECK_EQ(csv::escape("line\nbreak"), "\"line\nbreak\"");
  CHECK_EQ(csv::escape("cr\rhere"), "\"cr\rhere\"");
}

TEST_CASE("write_row / read_row round trip") {
  std::ostringstream out;
  csv::write_row(out, {"a", "b,c", "d\"e", "multi\nline", ""});
  csv::write_row(out, {"second", "row"});

  std::istringstream in(out.str());
  std::vector<std::string> row;
  REQUIRE(csv::read_row(in, row));
  CHECK_EQ(row, std::vector<std::string>{"a", "b,c", "d\"e", "multi\nline", ""});
  REQUIRE(csv::read_row(in, row));
  CHECK_EQ(row, std::vector<std::string>{"second", "row"});
  CHECK_FALSE(csv::read_row(in, row));
}

TEST_CASE("read_all handles CRLF and quoted newlines") {
  std::istringstream in("a,b\r\n\"x\r\ny\",z\r\n");
  auto rows = csv::read_all(in);
  REQUIRE_EQ(rows.size(), 2);
  CHECK_EQ(rows[0], std::vector<std::string>{"a", "b"});
  CHECK_EQ(rows[1], std::vector<std::string>{"x\r\ny", "z"});
}

TEST_CASE("fixed4 formatting") {
  CHECK_EQ(csv::fixed4(2.5), "2.5000");
  CHECK_EQ(csv::fixed4(0.0), "0.0000");
  CHECK_EQ(csv::fixed4(12.34567), "12.3457");
  CHECK_EQ(csv::fixed4(-3.14159), "-3.1416");
  CHECK_EQ(csv::fixed4(100.0), "100.0000");
}

TEST_CASE("dtos round-trips doubles exactly") {
  const double values[] = {0.0,          1.0,     0.1,           1.0 / 3.0,
                           1e-17,        -2.5e8,  6.02214076e23, 1.0000000000000002,
                           0.9992960310668939, -1e-300, 12345.678901234567};
  for (double v : values) {
    const std::string s = csv::dtos(v);
    CHECK_EQ(std::strtod(s.c_str(), nullptr), v);
  }
  // Shortest form: simple values print plainly.
  CHECK_EQ(csv::dtos(0.5), "0.5");
  CHECK_EQ(csv::dtos(1.0), "1");
  CHECK_EQ(csv::dtos(-2.0), "-2");
}

TEST_CASE("slugify") {
  CHECK_EQ(csv::slugify("Health and Safety"), "health_and_safety");
  CHECK_EQ(csv::slugify("Diversity, Equity, and Inclusion (DEI)"),
           "diversity_equity_and_inclusion_dei");
  CHECK_EQ(csv::slugify("Labor Relations and Culture"), "labor_relations_and_culture");
  CHECK_EQ(csv::slugify("  spaced  out  "), "spaced_out");
  CHECK_EQ(csv::slugify("already_good"), "already_good");
  CHECK_EQ(csv::slugify("(())"), "");
  CHECK_EQ(csv::slugify("MiXeD Case-99"), "mixed_case_99");
}
