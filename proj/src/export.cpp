#include "mortgeom/export.hpp"

#include <nlohmann/json.hpp>

#include "mortgeom/error.hpp"
#include "mortgeom/text.hpp"

namespace mortgeom {

using text::format_double;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string_view to_string(CeiNormalization n) {
  return n == CeiNormalization::Sum ? "sum" : "mean";
}

}  // namespace

std::string export_field(const GeometryField& field, ExportFormat format) {
  if (format == ExportFormat::Csv) {
    std::string out = "year,age,valid,n_t,n_x,n_z,nc_1,nc_2,nc_3,nc_4\n";
    for (std::size_t i = 0; i < field.rows; ++i) {
      for (std::size_t j = 0; j < field.cols; ++j) {
        const auto& p = field.at(i, j);
        out += std::to_string(field.first_year + static_cast<int>(i)) + ',' +
               std::to_string(field.first_age + static_cast<int>(j)) + ',' +
               (p.valid ? "1" : "0");
        for (int c = 0; c < 3; ++c) out += ',' + format_double(p.normal[c]);
        for (const double nc : p.normal_curvature) out += ',' + format_double(nc);
        out += '\n';
      }
    }
    return out;
  }
  ordered_json doc;
  doc["first_year"] = field.first_year;
  doc["first_age"] = field.first_age;
  doc["rows"] = field.rows;
  doc["cols"] = field.cols;
  doc["step"] = field.step;
  auto points = ordered_json::array();
  for (std::size_t i = 0; i < field.rows; ++i) {
    for (std::size_t j = 0; j < field.cols; ++j) {
      const auto& p = field.at(i, j);
      ordered_json row;
      row["year"] = field.first_year + static_cast<int>(i);
      row["age"] = field.first_age + static_cast<int>(j);
      row["valid"] = p.valid;
      row["normal"] = {p.normal.x(), p.normal.y(), p.normal.z()};
      row["nc"] = p.normal_curvature;
      points.push_back(std::move(row));
    }
  }
  doc["points"] = std::move(points);
  return doc.dump(2) + "\n";
}

std::string export_series(const CEISeries& series, ExportFormat format) {
  if (format == ExportFormat::Csv) {
    std::string out = "birth_year,cei,point_count\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
      out += std::to_string(series.birth_year(k)) + ',' + format_double(series.entries[k].cei) +
             ',' + std::to_string(series.entries[k].point_count) + '\n';
    }
    return out;
  }
  ordered_json doc;
  doc["sex"] = std::string(mortgeom::to_string(series.sex));
  doc["label"] = series.label;
  doc["normalization"] = std::string(to_string(series.normalization));
  auto rows = ordered_json::array();
  for (std::size_t k = 0; k < series.size(); ++k) {
    rows.push_back(ordered_json{{"birth_year", series.birth_year(k)},
                                {"cei", series.entries[k].cei},
                                {"point_count", series.entries[k].point_count}});
  }
  doc["entries"] = std::move(rows);
  return doc.dump(2) + "\n";
}

CEISeries parse_series_csv(std::string_view content) {
  auto rows = text::lines(content);
  while (!rows.empty() && text::trim(rows.back()).empty()) rows.pop_back();
  if (rows.empty() || text::trim(rows.front()) != "birth_year,cei,point_count") {
    throw FormatError("series CSV must start with header 'birth_year,cei,point_count'");
  }
  CEISeries series;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto fields = text::split(rows[r], ',');
    const auto where = " at row " + std::to_string(r + 1);
    if (fields.size() != 3) throw FormatError("series CSV expects 3 fields" + where);
    const auto year = text::parse_long(fields[0]);
    const auto cei = text::parse_double(fields[1]);
    const auto count = text::parse_long(fields[2]);
    if (!year || !cei || !count || *count < 0 || *cei < 0.0) {
      throw FormatError("malformed series row" + where);
    }
    if (r == 1) {
      series.first_birth_year = static_cast<int>(*year);
    } else if (*year != series.last_birth_year() + 1) {
      throw StructuralError("series birth years not contiguous" + where);
    }
    series.entries.push_back({*cei, static_cast<std::size_t>(*count)});
  }
  return series;
}

std::string export_report(const CohortReport& report, ExportFormat format) {
  const auto gap = [](const std::optional<int>& g) { return g ? std::to_string(*g) : std::string{}; };
  if (format == ExportFormat::Csv) {
    std::string out = "aice,mean,stdev,window_first,window_last,min_gap,max_gap\n";
    out += format_double(report.aice) + ',' + format_double(report.mean) + ',' +
           format_double(report.stdev) + ',' + std::to_string(report.window.first) + ',' +
           std::to_string(report.window.last) + ',' + gap(report.min_gap) + ',' +
           gap(report.max_gap) + "\n\nstart_year,end_year,width_years,max_cei\n";
    for (const auto& p : report.peaks) {
      out += std::to_string(p.start_year) + ',' + std::to_string(p.end_year) + ',' +
             std::to_string(p.width_years) + ',' + format_double(p.max_cei) + '\n';
    }
    return out;
  }
  ordered_json doc;
  doc["aice"] = report.aice;
  doc["mean"] = report.mean;
  doc["stdev"] = report.stdev;
  doc["window"] = {report.window.first, report.window.last};
  auto peaks = ordered_json::array();
  for (const auto& p : report.peaks) {
    peaks.push_back(ordered_json{{"start_year", p.start_year},
                                 {"end_year", p.end_year},
                                 {"width_years", p.width_years},
                                 {"max_cei", p.max_cei}});
  }
  doc["peaks"] = std::move(peaks);
  doc["min_gap"] = report.min_gap ? ordered_json(*report.min_gap) : ordered_json(nullptr);
  doc["max_gap"] = report.max_gap ? ordered_json(*report.max_gap) : ordered_json(nullptr);
  return doc.dump(2) + "\n";
}

}  // namespace mortgeom
