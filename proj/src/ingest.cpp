#include "mortgeom/ingest.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "mortgeom/error.hpp"
#include "mortgeom/text.hpp"

namespace mortgeom {
namespace {

using Cell = std::optional<double>;

std::string at_line(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

Cell parse_hmd_value(std::string_view token, std::size_t line_no) {
  if (token == ".") return std::nullopt;
  const auto v = text::parse_double(token);
  if (!v) {
    throw FormatError(at_line(line_no) + "non-numeric rate '" + std::string(token) + "'");
  }
  return *v;
}

struct HmdRow {
  long year;
  long age;
  Cell female, male, total;
  std::size_t line_no;
};

}  // namespace

const MortalitySurface& HmdParseResult::surface(Sex sex) const {
  switch (sex) {
    case Sex::Female:
      return female;
    case Sex::Male:
      return male;
    case Sex::Total:
      return total;
  }
  return total;
}

HmdParseResult parse_hmd(std::istream& in) {
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_hmd(content);
}

HmdParseResult parse_hmd(std::string_view content) {
  const auto all = text::lines(content);
  if (all.size() < 3) {
    throw FormatError(at_line(all.size() + 1) + "expected title, blank line and column header");
  }
  const std::string title(text::trim(all[0]));
  if (title.empty()) throw FormatError(at_line(1) + "missing title line");
  if (!text::trim(all[1]).empty()) throw FormatError(at_line(2) + "expected a blank line");

  const auto header = text::split_whitespace(all[2]);
  static constexpr std::string_view kHeader[] = {"Year", "Age", "Female", "Male", "Total"};
  bool header_ok = header.size() == 5;
  for (std::size_t k = 0; header_ok && k < 5; ++k) header_ok = header[k] == kHeader[k];
  if (!header_ok) {
    throw FormatError(at_line(3) + "malformed header '" + std::string(text::trim(all[2])) +
                      "' (expected 'Year Age Female Male Total')");
  }

  std::vector<HmdRow> rows;
  std::size_t blank = 0;
  for (std::size_t k = 3; k < all.size(); ++k) {
    const std::size_t line_no = k + 1;
    const auto tokens = text::split_whitespace(all[k]);
    if (tokens.empty()) {
      ++blank;
      continue;
    }
    if (tokens.size() != 5) {
      throw FormatError(at_line(line_no) + "expected 5 columns, found " +
                        std::to_string(tokens.size()));
    }
    const auto year = text::parse_long(tokens[0]);
    if (!year) throw FormatError(at_line(line_no) + "bad year '" + std::string(tokens[0]) + "'");
    auto age_token = tokens[1];
    if (!age_token.empty() && age_token.back() == '+') age_token.remove_suffix(1);
    const auto age = text::parse_long(age_token);
    if (!age || *age < 0) {
      throw FormatError(at_line(line_no) + "bad age '" + std::string(tokens[1]) + "'");
    }
    rows.push_back({*year, *age, parse_hmd_value(tokens[2], line_no),
                    parse_hmd_value(tokens[3], line_no), parse_hmd_value(tokens[4], line_no),
                    line_no});
  }
  if (rows.empty()) throw StructuralError("HMD file contains no data rows");

  // Years must arrive as consecutive blocks: 1922,1922,...,1923,... with step 1.
  std::vector<long> year_order;
  std::map<long, std::map<long, const HmdRow*>> grid;
  for (const auto& row : rows) {
    if (year_order.empty() || year_order.back() != row.year) {
      if (!year_order.empty() && row.year != year_order.back() + 1) {
        throw StructuralError(at_line(row.line_no) + "year " + std::to_string(row.year) +
                              " breaks the contiguous year sequence after " +
                              std::to_string(year_order.back()));
      }
      year_order.push_back(row.year);
    }
    auto [it, inserted] = grid[row.year].emplace(row.age, &row);
    if (!inserted) {
      throw StructuralError(at_line(row.line_no) + "duplicate entry for year " +
                            std::to_string(row.year) + ", age " + std::to_string(row.age));
    }
  }

  const auto& first_ages = grid.begin()->second;
  const long age0 = first_ages.begin()->first;
  const long age1 = first_ages.rbegin()->first;
  const auto num_ages = static_cast<std::size_t>(age1 - age0 + 1);
  for (const auto& [year, ages] : grid) {
    if (ages.size() != num_ages || ages.begin()->first != age0 || ages.rbegin()->first != age1) {
      throw StructuralError("year " + std::to_string(year) + " covers ages " +
                            std::to_string(ages.begin()->first) + "-" +
                            std::to_string(ages.rbegin()->first) + " with " +
                            std::to_string(ages.size()) + " rows; expected contiguous ages " +
                            std::to_string(age0) + "-" + std::to_string(age1));
    }
  }

  const std::size_t num_years = year_order.size();
  std::vector<Cell> female(num_years * num_ages), male(female.size()), total(female.size());
  std::size_t i = 0;
  for (const auto& [year, ages] : grid) {
    std::size_t j = 0;
    for (const auto& [age, row] : ages) {
      female[i * num_ages + j] = row->female;
      male[i * num_ages + j] = row->male;
      total[i * num_ages + j] = row->total;
      ++j;
    }
    ++i;
  }
  const int y0 = static_cast<int>(year_order.front());
  const int a0 = static_cast<int>(age0);
  return HmdParseResult{
      MortalitySurface(y0, a0, num_years, num_ages, female, Sex::Female, title),
      MortalitySurface(y0, a0, num_years, num_ages, male, Sex::Male, title),
      MortalitySurface(y0, a0, num_years, num_ages, total, Sex::Total, title),
      title,
      all.size(),
      rows.size(),
      blank};
}

MortalitySurface parse_csv_matrix(std::string_view content, int first_year, int first_age,
                                  Sex sex, std::string source_label) {
  const auto rows = text::lines(content);
  if (rows.empty()) throw FormatError("CSV matrix is empty");

  std::vector<Cell> cells;
  std::size_t width = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto fields = text::split(rows[r], ',');
    if (r == 0) {
      width = fields.size();
    } else if (fields.size() != width) {
      throw FormatError("ragged CSV at row " + std::to_string(r + 1) + ": " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(width));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto field = text::trim(fields[c]);
      if (field.empty()) {
        cells.emplace_back(std::nullopt);
        continue;
      }
      const auto v = text::parse_double(field);
      if (!v) {
        throw FormatError("non-numeric CSV field '" + std::string(field) + "' at row " +
                          std::to_string(r + 1) + ", column " + std::to_string(c + 1));
      }
      cells.emplace_back(*v);
    }
  }
  return MortalitySurface(first_year, first_age, rows.size(), width, cells, sex,
                          std::move(source_label));
}

std::string serialize(const MortalitySurface& surface, SurfaceFormat format) {
  if (format == SurfaceFormat::Csv) {
    std::string out;
    for (std::size_t i = 0; i < surface.num_years(); ++i) {
      for (std::size_t j = 0; j < surface.num_ages(); ++j) {
        if (j > 0) out += ',';
        if (!surface.missing(i, j)) out += text::format_double(surface.rate(i, j));
      }
      out += '\n';
    }
    return out;
  }

  nlohmann::ordered_json doc;
  doc["years"] = surface.years();
  doc["ages"] = surface.ages();
  doc["sex"] = std::string(to_string(surface.sex()));
  doc["source_label"] = surface.source_label();
  auto rates = nlohmann::ordered_json::array();
  auto mask = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < surface.num_years(); ++i) {
    auto row = nlohmann::ordered_json::array();
    auto mrow = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < surface.num_ages(); ++j) {
      if (surface.missing(i, j)) {
        row.push_back(nullptr);
      } else {
        row.push_back(surface.rate(i, j));
      }
      mrow.push_back(surface.missing(i, j));
    }
    rates.push_back(std::move(row));
    mask.push_back(std::move(mrow));
  }
  doc["rates"] = std::move(rates);
  doc["missing_mask"] = std::move(mask);
  return doc.dump(2) + "\n";
}

MortalitySurface parse_surface_json(std::string_view content) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("invalid surface JSON: ") + e.what());
  }
  try {
    const auto years = doc.at("years").get<std::vector<int>>();
    const auto ages = doc.at("ages").get<std::vector<int>>();
    if (years.empty() || ages.empty()) throw StructuralError("surface JSON has empty years or ages");
    for (std::size_t k = 1; k < years.size(); ++k) {
      if (years[k] != years[k - 1] + 1) throw StructuralError("surface JSON years not contiguous");
    }
    for (std::size_t k = 1; k < ages.size(); ++k) {
      if (ages[k] != ages[k - 1] + 1) throw StructuralError("surface JSON ages not contiguous");
    }
    const auto& rates = doc.at("rates");
    const auto& mask = doc.at("missing_mask");
    if (rates.size() != years.size() || mask.size() != years.size()) {
      throw StructuralError("surface JSON rates/missing_mask row count mismatch");
    }
    std::vector<Cell> cells;
    cells.reserve(years.size() * ages.size());
    for (std::size_t i = 0; i < years.size(); ++i) {
      if (rates[i].size() != ages.size() || mask[i].size() != ages.size()) {
        throw StructuralError("surface JSON row " + std::to_string(i) + " has wrong width");
      }
      for (std::size_t j = 0; j < ages.size(); ++j) {
        if (mask[i][j].get<bool>() || rates[i][j].is_null()) {
          cells.emplace_back(std::nullopt);
        } else {
          cells.emplace_back(rates[i][j].get<double>());
        }
      }
    }
    return MortalitySurface(years.front(), ages.front(), years.size(), ages.size(), cells,
                            parse_sex(doc.at("sex").get<std::string>()),
                            doc.value("source_label", std::string{}));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed surface JSON: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open input file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace mortgeom
