/**
 * @file test_report.cpp
 * @brief Number formatting, CSV round trips, and text-table rendering.
 */

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "rankbias/report.hpp"

using namespace rankbias;

namespace {

// second route back from text to bits, independent of format_double
double reparse(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  REQUIRE(ec == std::errc{});
  REQUIRE(ptr == s.data() + s.size());
  return v;
}

}  // namespace

TEST_CASE("format_double emits the shortest exact decimal") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(-1.0) == "-1");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_double(0.825) == "0.825");
}

TEST_CASE("format_double round-trips arbitrary finite doubles bitwise") {
  std::mt19937_64 gen(4242);
  int checked = 0;
  while (checked < 2000) {
    const double v = std::bit_cast<double>(gen());
    if (!std::isfinite(v)) continue;
    const double back = reparse(format_double(v));
    REQUIRE(std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(v));
    ++checked;
  }
}

TEST_CASE("format_fixed renders display precision") {
  CHECK(format_fixed(4400.0 / 45.0, 2) == "97.78");
  CHECK(format_fixed(0.5, 2) == "0.50");
  CHECK(format_fixed(-0.456, 2) == "-0.46");
  CHECK(format_fixed(2.0 / 3.0, 4) == "0.6667");
  CHECK(format_fixed(0.0, 2) == "0.00");
}

TEST_CASE("parse_double_cell accepts full numbers only") {
  double v = 0.0;
  CHECK(parse_double_cell("0.25", v));
  CHECK(v == 0.25);
  CHECK(parse_double_cell("-1e-3", v));
  CHECK(v == -1e-3);
  CHECK_FALSE(parse_double_cell("abc", v));
  CHECK_FALSE(parse_double_cell("1.5x", v));
  CHECK_FALSE(parse_double_cell("", v));
}

TEST_CASE("render_csv quotes only what needs quoting") {
  Table t;
  t.header = {"name", "note"};
  t.rows = {{"plain", "a,b"}, {"quoted", "say \"hi\""}, {"multi", "l1\nl2"}};
  CHECK(render_csv(t) ==
        "name,note\n"
        "plain,\"a,b\"\n"
        "quoted,\"say \"\"hi\"\"\"\n"
        "multi,\"l1\nl2\"\n");
}

TEST_CASE("parse_csv undoes render_csv") {
  Table t;
  t.header = {"id", "text", "value"};
  t.rows = {{"r1", "commas, everywhere", "0.5"},
            {"r2", "a \"quoted\" word", "-1"},
            {"r3", "two\nlines", ""},
            {"r4", "", "12"}};
  const Table back = parse_csv(render_csv(t));
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
}

TEST_CASE("parse_csv handles crlf and missing final newline") {
  const Table t = parse_csv("a,b\r\nc,d\r\ne,f");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0] == std::vector<std::string>{"c", "d"});
  CHECK(t.rows[1] == std::vector<std::string>{"e", "f"});
}

TEST_CASE("parse_csv rejects an unterminated quote") {
  CHECK_THROWS_AS(parse_csv("a,\"open\n"), ParseError);
}

TEST_CASE("render_text aligns numbers right and text left") {
  Table t;
  t.header = {"query", "TRB"};
  t.rows = {{"#p2", "0.107"}, {"total", "-0.5"}};
  CHECK(render_text(t) ==
        "query  TRB\n"
        "-----  -----\n"
        "#p2     0.11\n"
        "total  -0.50\n");
}

TEST_CASE("render_text keeps integer columns integral") {
  Table t;
  t.header = {"q", "n"};
  t.rows = {{"a", "4"}, {"b", "12"}};
  CHECK(render_text(t) ==
        "q  n\n"
        "-  --\n"
        "a   4\n"
        "b  12\n");
}

TEST_CASE("one fractional cell switches the whole column to decimals") {
  Table t;
  t.header = {"k", "v"};
  t.rows = {{"x", "1"}, {"y", "2.5"}};
  CHECK(render_text(t) ==
        "k  v\n"
        "-  ----\n"
        "x  1.00\n"
        "y  2.50\n");
}

TEST_CASE("empty cells do not break numeric alignment or add tail blanks") {
  Table t;
  t.header = {"name", "mean", "count"};
  t.rows = {{"q1", "0.25", "4"}, {"Average", "0.25", ""}};
  const std::string text = render_text(t);
  for (std::size_t pos = text.find('\n'); pos != std::string::npos && pos > 0;
       pos = text.find('\n', pos + 1)) {
    CHECK(text[pos - 1] != ' ');
  }
  CHECK(text ==
        "name     mean  count\n"
        "-------  ----  -----\n"
        "q1       0.25      4\n"
        "Average  0.25\n");
}
