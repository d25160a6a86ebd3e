#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mortgeom/cohort.hpp"
#include "mortgeom/geometry.hpp"

namespace mortgeom {

enum class ExportFormat { Csv, Json };

/// One row per grid point: year, age, valid, N, NC_1..NC_4.
std::string export_field(const GeometryField& field, ExportFormat format);

/// Rows {birth_year, cei, point_count}.
std::string export_series(const CEISeries& series, ExportFormat format);
/// Reads the CSV form written by export_series (header required). Throws
/// FormatError on malformed rows and StructuralError on gaps in birth years.
CEISeries parse_series_csv(std::string_view text);

std::string export_report(const CohortReport& report, ExportFormat format);

struct PlotSeries {
  std::string name;
  CEISeries series;
};

struct PlotOptions {
  std::optional<YearWindow> window;  // shaded band
  bool annotate_peaks = true;
  PeakParams peak_params;
  std::string title = "Cohort effect index";
};

/// Static SVG 1.1 line chart: birth year against CEI, one polyline per series.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options = {});

}  // namespace mortgeom
