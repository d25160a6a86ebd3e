#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mortgeom/geometry.hpp"
#include "mortgeom/surface.hpp"

namespace mortgeom {

/// Sum is the plain per-cohort sum; Mean divides by the number of
/// contributing points.
enum class CeiNormalization { Sum, Mean };

struct CeiEntry {
  double cei = 0.0;
  std::size_t point_count = 0;
};

/// Cohort effect index per birth year (year - age), contiguous from
/// `first_birth_year`.
struct CEISeries {
  int first_birth_year = 0;
  std::vector<CeiEntry> entries;
  Sex sex = Sex::Total;
  std::string label;
  CeiNormalization normalization = CeiNormalization::Sum;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  int last_birth_year() const { return first_birth_year + static_cast<int>(entries.size()) - 1; }
  int birth_year(std::size_t k) const { return first_birth_year + static_cast<int>(k); }
  bool contains(int year) const { return year >= first_birth_year && year <= last_birth_year(); }
  const CeiEntry& at(int year) const;
  std::vector<double> values() const;
};

/// Inclusive range of birth years.
struct YearWindow {
  int first = 1922;
  int last = 1970;
};

inline constexpr int kDefaultTrimYear = 1970;

/// cei(c) = sum over valid points with year - age = c of |NC_1 - NC_2|.
CEISeries cei_series(const GeometryField& field,
                     CeiNormalization normalization = CeiNormalization::Sum);
/// As above; checks that `field` was computed on a grid shaped like
/// `surface` (AnalyticsError otherwise) and copies its sex and label.
CEISeries cei_series(const GeometryField& field, const MortalitySurface& surface,
                     CeiNormalization normalization = CeiNormalization::Sum);

/// Drops birth years after `max_birth_year`; AnalyticsError if nothing is left.
CEISeries trim_series(const CEISeries& series, int max_birth_year = kDefaultTrimYear);

/// Entries inside `window`; AnalyticsError if the intersection is empty.
CEISeries window_series(const CEISeries& series, YearWindow window);

/// Every value multiplied by k.
CEISeries scale_series(const CEISeries& series, double k);

struct Peak {
  int start_year = 0;
  int end_year = 0;
  int width_years = 0;  // end - start + 1
  double max_cei = 0.0;
};

struct CohortReport {
  double aice = 0.0;
  double mean = 0.0;
  double stdev = 0.0;  // sample (n - 1)
  YearWindow window;
  std::vector<Peak> peaks;
  std::optional<int> min_gap;
  std::optional<int> max_gap;
};

/// Coefficient of variation (sample stdev / mean) of the windowed series.
/// AnalyticsError with fewer than 2 windowed entries or a zero mean.
CohortReport aice(const CEISeries& series, YearWindow window = {});

/// True when aice(k * series) equals aice(series) within `tolerance`.
bool aice_scale_invariant(const CEISeries& series, double k, YearWindow window = {},
                          double tolerance = 1e-12);

struct PeakParams {
  std::size_t width = 21;   // rolling-median baseline width (odd, years)
  double threshold = 1.25;  // peak when cei > threshold * baseline
};

/// Centred rolling median; the window shrinks symmetrically at the edges.
std::vector<double> rolling_median(std::span<const double> values, std::size_t width);

/// Peaks are maximal runs of years with cei above threshold x baseline.
/// Fills peaks/min_gap/max_gap and the window; AnalyticsError if the window
/// is shorter than the baseline width or the width is even or zero.
CohortReport detect_peaks(const CEISeries& series, YearWindow window = {},
                          const PeakParams& params = {});

/// aice() and detect_peaks() merged into one report.
CohortReport analyze(const CEISeries& series, YearWindow window = {},
                     const PeakParams& params = {});

struct UShapeReport {
  int pivot_year = kDefaultTrimYear;
  std::size_t segment_size = 0;  // entries after the pivot
  double slope = 0.0;            // OLS slope after the pivot, drop excluded
  bool upward_trend = false;
  std::optional<int> drop_start_year;
};

/// Informational look at the young-cohort tail of an untrimmed series: the
/// trend after `pivot_year` and the terminal drop caused by zeroed borders.
UShapeReport u_shape_diagnostic(const CEISeries& series, int pivot_year = kDefaultTrimYear);

}  // namespace mortgeom
