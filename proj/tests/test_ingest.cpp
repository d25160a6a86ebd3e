#include <doctest.h>

#include <random>
#include <sstream>
#include <string>

#include "mortgeom/error.hpp"
#include "mortgeom/ingest.hpp"

using namespace mortgeom;

namespace {

const std::string kHeader =
    "Sample, Death rates (period 1x1)\n"
    "\n"
    "  Year          Age             Female            Male           Total\n";

std::string hmd(const std::string& rows) { return kHeader + rows; }

}  // namespace

TEST_CASE("parse_hmd maps the total column") {
  const auto r = parse_hmd(hmd(
      "  1933           26           0.002900       0.003600       0.003200\n"
      "  1933           27           0.002935       0.003633       0.003281\n"
      "  1934           26           0.002800       0.003500       0.003100\n"
      "  1934           27           0.002700       0.003400       0.003000\n"));
  CHECK(r.total.at(1933, 27).value() == 0.003281);
  CHECK(r.female.at(1933, 27).value() == 0.002935);
  CHECK(r.male.at(1933, 27).value() == 0.003633);
  CHECK(r.total.first_year() == 1933);
  CHECK(r.total.first_age() == 26);
  CHECK(r.total.num_years() == 2);
  CHECK(r.total.num_ages() == 2);
  CHECK(r.total.sex() == Sex::Total);
  CHECK(r.female.sex() == Sex::Female);
}

TEST_CASE("parse_hmd stores the open age group as age 110") {
  const auto r = parse_hmd(hmd(
      "  1950          109           0.500000       0.450000       0.480000\n"
      "  1950         110+           0.551786       0.476215       0.538332\n"));
  CHECK(r.total.last_age() == 110);
  CHECK(r.female.at(1950, 110).value() == 0.551786);
}

TEST_CASE("parse_hmd flags '.' as missing") {
  const auto r = parse_hmd(hmd(
      "  1915          102           0.400000       0.450000       0.420000\n"
      "  1915          103                  .              .              .\n"));
  for (const Sex s : {Sex::Female, Sex::Male, Sex::Total}) {
    CHECK(r.surface(s).missing(0, 1));
    CHECK_FALSE(r.surface(s).at(1915, 103).has_value());
    CHECK(r.surface(s).missing_count() == 1);
  }
}

TEST_CASE("parse_hmd accounts for every line") {
  const auto content = read_file(MORTGEOM_TEST_DATA "/sample.Mx_1x1.txt");
  const auto r = parse_hmd(content);
  CHECK(r.data_rows == 40 * 111);
  CHECK(r.total_lines == 3 + r.data_rows + r.blank_lines);
  CHECK(r.total.num_years() == 40);
  CHECK(r.total.num_ages() == 111);
  CHECK(r.total.missing_count() == 3 * 3);
  CHECK(r.title.rfind("Synthetic Land", 0) == 0);

  std::istringstream stream(content);
  CHECK(parse_hmd(stream).total == r.total);
}

TEST_CASE("parse_hmd skips blank lines but counts them") {
  const auto r = parse_hmd(hmd(
      "  1950            0           0.1       0.1       0.1\n"
      "\n"
      "  1950            1           0.2       0.2       0.2\n\n"));
  CHECK(r.data_rows == 2);
  CHECK(r.blank_lines == 2);
  CHECK(r.total_lines == 7);
}

TEST_CASE("parse_hmd rejects a malformed header naming its line") {
  const std::string bad = "Title\n\nYear Age Women Men Total\n1950 0 0.1 0.1 0.1\n";
  try {
    parse_hmd(bad);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_hmd("Title\nnot blank\nYear Age Female Male Total\n"), FormatError);
  CHECK_THROWS_AS(parse_hmd(""), FormatError);
}

TEST_CASE("parse_hmd structural errors") {
  SUBCASE("year gap") {
    CHECK_THROWS_AS(parse_hmd(hmd("1950 0 0.1 0.1 0.1\n1952 0 0.1 0.1 0.1\n")), StructuralError);
  }
  SUBCASE("year block reappears") {
    CHECK_THROWS_AS(parse_hmd(hmd("1950 0 0.1 0.1 0.1\n1951 0 0.1 0.1 0.1\n"
                                  "1950 1 0.1 0.1 0.1\n")),
                    StructuralError);
  }
  SUBCASE("duplicate year and age") {
    CHECK_THROWS_AS(parse_hmd(hmd("1950 0 0.1 0.1 0.1\n1950 0 0.2 0.2 0.2\n")), StructuralError);
  }
  SUBCASE("hole in ages") {
    CHECK_THROWS_AS(parse_hmd(hmd("1950 0 0.1 0.1 0.1\n1950 2 0.1 0.1 0.1\n")), StructuralError);
  }
  SUBCASE("ragged years") {
    CHECK_THROWS_AS(parse_hmd(hmd("1950 0 0.1 0.1 0.1\n1950 1 0.1 0.1 0.1\n"
                                  "1951 0 0.1 0.1 0.1\n")),
                    StructuralError);
  }
  SUBCASE("non-numeric value") {
    CHECK_THROWS_AS(parse_hmd(hmd("1950 0 abc 0.1 0.1\n")), FormatError);
  }
  SUBCASE("negative rate") {
    CHECK_THROWS_AS(parse_hmd(hmd("1950 0 -0.1 0.1 0.1\n")), FormatError);
  }
}

TEST_CASE("parse_csv_matrix") {
  const auto s = parse_csv_matrix("0.1,0.2\n0.3,0.4", 2000, 0);
  CHECK(s.at(2000, 0).value() == 0.1);
  CHECK(s.at(2001, 1).value() == 0.4);
  CHECK(s.num_years() == 2);

  try {
    parse_csv_matrix("1,2\n3", 2000, 0);
    FAIL("expected ragged-row error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }

  const auto gap = parse_csv_matrix("0.1,,0.3\n", 1990, 5);
  CHECK(gap.missing(0, 1));
  CHECK(gap.at(1990, 7).value() == 0.3);

  CHECK(parse_csv_matrix("1e-3,2.5E+1\n", 0, 0).at(0, 1).value() == 25.0);

  try {
    parse_csv_matrix("0.1,0.2\n0.3,x\n", 0, 0);
    FAIL("expected parse error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("row 2, column 2") != std::string::npos);
  }
}

TEST_CASE("serialize: csv and json contract") {
  const auto s = parse_csv_matrix("0.1,0.2\n0.3,0.4\n", 2000, 0);
  const auto csv = serialize(s, SurfaceFormat::Csv);
  CHECK(parse_csv_matrix(csv, 2000, 0) == s);

  const auto holed = parse_csv_matrix("0.1,,0.3\n", 1990, 5);
  CHECK(serialize(holed, SurfaceFormat::Csv).find(",,") != std::string::npos);
  CHECK(parse_csv_matrix(serialize(holed, SurfaceFormat::Csv), 1990, 5) == holed);

  const auto json = serialize(s, SurfaceFormat::Json);
  for (const char* key : {"\"years\"", "\"ages\"", "\"sex\"", "\"source_label\"", "\"rates\"",
                          "\"missing_mask\""}) {
    CHECK(json.find(key) != std::string::npos);
  }
}

TEST_CASE("property: parse(serialize(s)) == s for random surfaces") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> value(0.0, 2.0);
  std::uniform_int_distribution<int> dim(1, 12);
  std::bernoulli_distribution hole(0.1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rows = static_cast<std::size_t>(dim(rng));
    const auto cols = static_cast<std::size_t>(dim(rng));
    std::vector<std::optional<double>> cells(rows * cols);
    for (auto& c : cells) {
      if (!hole(rng)) c = value(rng) * std::pow(10.0, -static_cast<int>(rng() % 8));
    }
    const MortalitySurface s(1800 + trial, trial % 5, rows, cols, cells, Sex::Male, "label");
    CHECK(parse_surface_json(serialize(s, SurfaceFormat::Json)) == s);
    const auto back = parse_csv_matrix(serialize(s, SurfaceFormat::Csv), s.first_year(),
                                       s.first_age(), Sex::Male, "label");
    CHECK(back == s);
  }
}

TEST_CASE("read_file names a missing path") {
  try {
    read_file("/nonexistent/uk.Mx_1x1.txt");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/uk.Mx_1x1.txt") != std::string::npos);
  }
}
