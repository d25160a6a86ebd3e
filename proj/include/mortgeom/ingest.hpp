#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>

#include "mortgeom/surface.hpp"

namespace mortgeom {

/// The three sex columns of an HMD Mx_1x1 file plus line accounting. Every
/// input line is either the title, the separator, the header, a data row or
/// a skipped blank line; `total_lines` is their sum.
struct HmdParseResult {
  MortalitySurface female;
  MortalitySurface male;
  MortalitySurface total;
  std::string title;
  std::size_t total_lines = 0;
  std::size_t data_rows = 0;
  std::size_t blank_lines = 0;

  const MortalitySurface& surface(Sex sex) const;
};

/// Parses an HMD "Death rates (period 1x1)" file: title line, blank line,
/// header "Year Age Female Male Total", then one row per (year, age). The open
/// age group "110+" is stored as age 110 and "." marks a missing value.
HmdParseResult parse_hmd(std::string_view text);
HmdParseResult parse_hmd(std::istream& in);

/// Rows are years, columns are ages; empty fields are missing.
MortalitySurface parse_csv_matrix(std::string_view text, int first_year, int first_age,
                                  Sex sex = Sex::Total, std::string source_label = {});

/// Inverse of `serialize(surface, SurfaceFormat::Json)`.
MortalitySurface parse_surface_json(std::string_view text);

enum class SurfaceFormat { Csv, Json };

/// CSV is the bare matrix accepted by parse_csv_matrix; JSON carries
/// {years, ages, sex, source_label, rates, missing_mask}.
std::string serialize(const MortalitySurface& surface, SurfaceFormat format);

/// Reads a whole file; throws ParseError naming the path when unreadable.
std::string read_file(const std::string& path);

}  // namespace mortgeom
