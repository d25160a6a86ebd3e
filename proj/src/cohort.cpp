#include "mortgeom/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mortgeom/error.hpp"

namespace mortgeom {

const CeiEntry& CEISeries::at(int year) const {
  if (!contains(year)) {
    throw AnalyticsError("birth year " + std::to_string(year) + " outside series " +
                         std::to_string(first_birth_year) + "-" +
                         std::to_string(last_birth_year()));
  }
  return entries[static_cast<std::size_t>(year - first_birth_year)];
}

std::vector<double> CEISeries::values() const {
  std::vector<double> out(entries.size());
  std::transform(entries.begin(), entries.end(), out.begin(),
                 [](const CeiEntry& e) { return e.cei; });
  return out;
}

CEISeries cei_series(const GeometryField& field, CeiNormalization normalization) {
  CEISeries series;
  series.normalization = normalization;
  if (field.rows == 0 || field.cols == 0) return series;
  const int last_year = field.first_year + static_cast<int>(field.rows) - 1;
  const int last_age = field.first_age + static_cast<int>(field.cols) - 1;
  series.first_birth_year = field.first_year - last_age;
  series.entries.resize(static_cast<std::size_t>(last_year - field.first_age -
                                                 series.first_birth_year + 1));
  for (std::size_t i = 0; i < field.rows; ++i) {
    for (std::size_t j = 0; j < field.cols; ++j) {
      const auto& p = field.at(i, j);
      if (!p.valid) continue;
      // (first_year + i) - (first_age + j) - first_birth_year
      const std::size_t k = i + (field.cols - 1 - j);
      series.entries[k].cei += std::abs(p.normal_curvature[0] - p.normal_curvature[1]);
      ++series.entries[k].point_count;
    }
  }
  if (normalization == CeiNormalization::Mean) {
    for (auto& e : series.entries) {
      if (e.point_count > 0) e.cei /= static_cast<double>(e.point_count);
    }
  }
  return series;
}

CEISeries cei_series(const GeometryField& field, const MortalitySurface& surface,
                     CeiNormalization normalization) {
  if (field.rows != surface.num_years() || field.cols != surface.num_ages() ||
      field.first_year != surface.first_year() || field.first_age != surface.first_age()) {
    throw AnalyticsError("geometry field does not match the surface grid");
  }
  auto series = cei_series(field, normalization);
  series.sex = surface.sex();
  series.label = surface.source_label();
  return series;
}

CEISeries trim_series(const CEISeries& series, int max_birth_year) {
  if (series.empty() || max_birth_year < series.first_birth_year) {
    throw AnalyticsError("trimming at " + std::to_string(max_birth_year) +
                         " leaves an empty series");
  }
  CEISeries out = series;
  const auto keep = static_cast<std::size_t>(
      std::min(max_birth_year, series.last_birth_year()) - series.first_birth_year + 1);
  out.entries.resize(keep);
  return out;
}

CEISeries window_series(const CEISeries& series, YearWindow window) {
  const int lo = std::max(window.first, series.first_birth_year);
  const int hi = std::min(window.last, series.last_birth_year());
  if (series.empty() || lo > hi) {
    throw AnalyticsError("window [" + std::to_string(window.first) + ", " +
                         std::to_string(window.last) + "] does not intersect the series");
  }
  CEISeries out = series;
  out.first_birth_year = lo;
  const auto begin = series.entries.begin() + (lo - series.first_birth_year);
  out.entries.assign(begin, begin + (hi - lo + 1));
  return out;
}

CEISeries scale_series(const CEISeries& series, double k) {
  CEISeries out = series;
  for (auto& e : out.entries) e.cei *= k;
  return out;
}

CohortReport aice(const CEISeries& series, YearWindow window) {
  if (window.first > window.last) throw AnalyticsError("window is not well ordered");
  const auto windowed = window_series(series, window);
  const auto v = windowed.values();
  if (v.size() < 2) {
    throw AnalyticsError("aice needs at least 2 windowed entries, got " +
                         std::to_string(v.size()));
  }
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (!(mean > 0.0)) throw AnalyticsError("aice undefined: windowed mean is zero");
  double ss = 0.0;
  for (const double x : v) ss += (x - mean) * (x - mean);
  CohortReport report;
  report.window = window;
  report.mean = mean;
  report.stdev = std::sqrt(ss / (n - 1.0));
  report.aice = report.stdev / mean;
  return report;
}

bool aice_scale_invariant(const CEISeries& series, double k, YearWindow window,
                          double tolerance) {
  return std::abs(aice(scale_series(series, k), window).aice - aice(series, window).aice) <=
         tolerance;
}

std::vector<double> rolling_median(std::span<const double> values, std::size_t width) {
  const std::size_t n = values.size();
  const std::size_t half = width / 2;
  std::vector<double> out(n);
  std::vector<double> buf;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t h = std::min({half, k, n - 1 - k});
    buf.assign(values.begin() + static_cast<std::ptrdiff_t>(k - h),
               values.begin() + static_cast<std::ptrdiff_t>(k + h + 1));
    auto mid = buf.begin() + static_cast<std::ptrdiff_t>(h);
    std::nth_element(buf.begin(), mid, buf.end());
    out[k] = *mid;
  }
  return out;
}

CohortReport detect_peaks(const CEISeries& series, YearWindow window, const PeakParams& params) {
  if (params.width == 0 || params.width % 2 == 0) {
    throw AnalyticsError("baseline width must be a positive odd number of years");
  }
  if (window.first > window.last) throw AnalyticsError("window is not well ordered");
  const auto windowed = window_series(series, window);
  if (windowed.size() < params.width) {
    throw AnalyticsError("window of " + std::to_string(windowed.size()) +
                         " years is shorter than the baseline width " +
                         std::to_string(params.width));
  }
  const auto v = windowed.values();
  const auto baseline = rolling_median(v, params.width);

  CohortReport report;
  report.window = window;
  std::optional<Peak> open;
  for (std::size_t k = 0; k <= v.size(); ++k) {
    const bool above = k < v.size() && v[k] > params.threshold * baseline[k];
    if (above) {
      const int year = windowed.birth_year(k);
      if (!open) open = Peak{year, year, 1, v[k]};
      open->end_year = year;
      open->max_cei = std::max(open->max_cei, v[k]);
    } else if (open) {
      open->width_years = open->end_year - open->start_year + 1;
      report.peaks.push_back(*open);
      open.reset();
    }
  }
  for (const auto& p : report.peaks) {
    report.min_gap = std::min(report.min_gap.value_or(p.width_years), p.width_years);
    report.max_gap = std::max(report.max_gap.value_or(p.width_years), p.width_years);
  }
  return report;
}

CohortReport analyze(const CEISeries& series, YearWindow window, const PeakParams& params) {
  auto report = aice(series, window);
  const auto peaks = detect_peaks(series, window, params);
  report.peaks = peaks.peaks;
  report.min_gap = peaks.min_gap;
  report.max_gap = peaks.max_gap;
  return report;
}

UShapeReport u_shape_diagnostic(const CEISeries& series, int pivot_year) {
  constexpr double kDropRatio = 0.5;
  constexpr std::size_t kReference = 5;

  UShapeReport report;
  report.pivot_year = pivot_year;
  if (series.empty() || series.last_birth_year() <= pivot_year) return report;
  const int first = std::max(pivot_year + 1, series.first_birth_year);
  const auto begin = static_cast<std::size_t>(first - series.first_birth_year);
  const auto all = series.values();
  const std::vector<double> seg(all.begin() + static_cast<std::ptrdiff_t>(begin), all.end());
  report.segment_size = seg.size();

  // Trailing run of entries each far below the mean of the entries before it.
  std::size_t run = 0;
  while (run < seg.size() && seg.size() - run - 1 >= kReference) {
    const std::size_t k = seg.size() - 1 - run;
    const double ref =
        std::accumulate(seg.begin() + static_cast<std::ptrdiff_t>(k - kReference),
                        seg.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
        static_cast<double>(kReference);
    if (!(seg[k] < kDropRatio * ref)) break;
    ++run;
  }
  if (run > 0) report.drop_start_year = first + static_cast<int>(seg.size() - run);

  const std::size_t m = seg.size() - run;
  if (m >= 2) {
    double sx = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      sx += static_cast<double>(k);
      sy += seg[k];
    }
    const double mx = sx / static_cast<double>(m);
    const double my = sy / static_cast<double>(m);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double dx = static_cast<double>(k) - mx;
      sxy += dx * (seg[k] - my);
      sxx += dx * dx;
    }
    report.slope = sxy / sxx;
  }
  report.upward_trend = report.slope > 0.0;
  return report;
}

}  // namespace mortgeom
