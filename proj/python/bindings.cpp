#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <cmath>
#include <limits>

#include "mortgeom/analytic.hpp"
#include "mortgeom/cohort.hpp"
#include "mortgeom/error.hpp"
#include "mortgeom/export.hpp"
#include "mortgeom/geometry.hpp"
#include "mortgeom/ingest.hpp"

namespace py = pybind11;
using namespace mortgeom;

namespace {

py::array_t<double> rates_array(const MortalitySurface& s) {
  py::array_t<double> out({s.num_years(), s.num_ages()});
  auto r = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < s.num_years(); ++i) {
    for (std::size_t j = 0; j < s.num_ages(); ++j) {
      r(i, j) = s.missing(i, j) ? std::numeric_limits<double>::quiet_NaN() : s.rate(i, j);
    }
  }
  return out;
}

MortalitySurface surface_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a,
                                    int first_year, int first_age, Sex sex,
                                    const std::string& label) {
  if (a.ndim() != 2) throw py::value_error("rates must be a 2-D array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  auto r = a.unchecked<2>();
  std::vector<std::optional<double>> rates(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (!std::isnan(r(i, j))) rates[i * cols + j] = r(i, j);
    }
  }
  return MortalitySurface(first_year, first_age, rows, cols, rates, sex, label);
}

py::array_t<double> nc_array(const GeometryField& f) {
  py::array_t<double> out({f.rows, f.cols, std::size_t{4}});
  auto r = out.mutable_unchecked<3>();
  for (std::size_t i = 0; i < f.rows; ++i) {
    for (std::size_t j = 0; j < f.cols; ++j) {
      const auto& p = f.at(i, j);
      for (std::size_t k = 0; k < 4; ++k) {
        r(i, j, k) = p.valid ? p.normal_curvature[k] : std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cohort-effect geometry on mortality surfaces";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto parse = py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", parse.ptr());
  py::register_exception<StructuralError>(m, "StructuralError", parse.ptr());
  auto geom = py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
  py::register_exception<DegenerateStencilError>(m, "DegenerateStencilError", geom.ptr());
  py::register_exception<AmbiguousNormalError>(m, "AmbiguousNormalError", geom.ptr());
  py::register_exception<QuadratureError>(m, "QuadratureError", geom.ptr());
  py::register_exception<AnalyticsError>(m, "AnalyticsError", base.ptr());

  py::enum_<Sex>(m, "Sex")
      .value("Female", Sex::Female)
      .value("Male", Sex::Male)
      .value("Total", Sex::Total);
  py::enum_<CeiNormalization>(m, "Normalization")
      .value("Sum", CeiNormalization::Sum)
      .value("Mean", CeiNormalization::Mean);

  py::class_<MortalitySurface>(m, "MortalitySurface")
      .def(py::init(&surface_from_array), py::arg("rates"), py::arg("first_year"),
           py::arg("first_age"), py::arg("sex") = Sex::Total, py::arg("label") = "")
      .def_property_readonly("first_year", &MortalitySurface::first_year)
      .def_property_readonly("first_age", &MortalitySurface::first_age)
      .def_property_readonly("years", &MortalitySurface::years)
      .def_property_readonly("ages", &MortalitySurface::ages)
      .def_property_readonly("sex", &MortalitySurface::sex)
      .def_property_readonly("label", &MortalitySurface::source_label)
      .def_property_readonly("missing_count", &MortalitySurface::missing_count)
      .def("rates", &rates_array, "Rates as a (years, ages) array with NaN for missing cells")
      .def("at", &MortalitySurface::at, py::arg("year"), py::arg("age"))
      .def("to_csv", [](const MortalitySurface& s) { return serialize(s, SurfaceFormat::Csv); })
      .def("to_json", [](const MortalitySurface& s) { return serialize(s, SurfaceFormat::Json); })
      .def("__eq__", [](const MortalitySurface& a, const MortalitySurface& b) { return a == b; });

  py::class_<HmdParseResult>(m, "HmdTable")
      .def_readonly("female", &HmdParseResult::female)
      .def_readonly("male", &HmdParseResult::male)
      .def_readonly("total", &HmdParseResult::total)
      .def_readonly("title", &HmdParseResult::title)
      .def_readonly("data_rows", &HmdParseResult::data_rows);

  m.def("parse_hmd", [](const std::string& text) { return parse_hmd(text); }, py::arg("text"));
  m.def("read_hmd", [](const std::string& path) { return parse_hmd(read_file(path)); },
        py::arg("path"));
  m.def("parse_csv_matrix",
        [](const std::string& text, int first_year, int first_age, Sex sex,
           const std::string& label) {
          return parse_csv_matrix(text, first_year, first_age, sex, label);
        },
        py::arg("text"), py::arg("first_year"), py::arg("first_age"),
        py::arg("sex") = Sex::Total, py::arg("label") = "");
  m.def("parse_surface_json", [](const std::string& text) { return parse_surface_json(text); },
        py::arg("text"));

  py::class_<GeometryOptions>(m, "GeometryOptions")
      .def(py::init<>())
      .def_readwrite("z_scale", &GeometryOptions::z_scale)
      .def_readwrite("log_rates", &GeometryOptions::log_rates)
      .def_readwrite("grid_step", &GeometryOptions::grid_step)
      .def_readwrite("threads", &GeometryOptions::threads);

  py::class_<GeometryField>(m, "GeometryField")
      .def_readonly("first_year", &GeometryField::first_year)
      .def_readonly("first_age", &GeometryField::first_age)
      .def_readonly("rows", &GeometryField::rows)
      .def_readonly("cols", &GeometryField::cols)
      .def_property_readonly("valid_count", &GeometryField::valid_count)
      .def("normal_curvatures", &nc_array,
           "Array (rows, cols, 4) of normal curvatures, NaN where undefined")
      .def("normal",
           [](const GeometryField& f, std::size_t i, std::size_t j) -> std::optional<Vec3> {
             const auto& p = f.at(i, j);
             if (!p.valid) return std::nullopt;
             return p.normal;
           })
      .def("to_csv", [](const GeometryField& f) { return export_field(f, ExportFormat::Csv); })
      .def("to_json", [](const GeometryField& f) { return export_field(f, ExportFormat::Json); });

  m.def("compute_geometry",
        [](const MortalitySurface& s, const GeometryOptions& o) {
          py::gil_scoped_release release;
          return compute_geometry_field(s, o);
        },
        py::arg("surface"), py::arg("options") = GeometryOptions{});

  m.def("estimate_normal",
        [](const std::array<Vec3, 4>& tangents) { return estimate_normal(tangents); },
        py::arg("tangents"));

  py::class_<YearWindow>(m, "YearWindow")
      .def(py::init([](int first, int last) { return YearWindow{first, last}; }),
           py::arg("first") = 1922, py::arg("last") = 1970)
      .def_readwrite("first", &YearWindow::first)
      .def_readwrite("last", &YearWindow::last);

  py::class_<CEISeries>(m, "CEISeries")
      .def_readonly("first_birth_year", &CEISeries::first_birth_year)
      .def_readonly("label", &CEISeries::label)
      .def_property_readonly("last_birth_year", &CEISeries::last_birth_year)
      .def_property_readonly("birth_years",
                             [](const CEISeries& s) {
                               std::vector<int> out(s.size());
                               for (std::size_t k = 0; k < s.size(); ++k) out[k] = s.birth_year(k);
                               return out;
                             })
      .def_property_readonly("values", &CEISeries::values)
      .def_property_readonly("point_counts",
                             [](const CEISeries& s) {
                               std::vector<std::size_t> out;
                               for (const auto& e : s.entries) out.push_back(e.point_count);
                               return out;
                             })
      .def("__len__", &CEISeries::size)
      .def("__getitem__", [](const CEISeries& s, int year) { return s.at(year).cei; })
      .def("to_csv", [](const CEISeries& s) { return export_series(s, ExportFormat::Csv); })
      .def("to_json", [](const CEISeries& s) { return export_series(s, ExportFormat::Json); });

  m.def("cei_series",
        [](const GeometryField& f, const MortalitySurface& s, CeiNormalization n) {
          return cei_series(f, s, n);
        },
        py::arg("field"), py::arg("surface"), py::arg("normalization") = CeiNormalization::Sum);
  m.def("parse_series_csv", [](const std::string& text) { return parse_series_csv(text); },
        py::arg("text"));
  m.def("trim_series", &trim_series, py::arg("series"), py::arg("max_birth_year") = 1970);
  m.def("scale_series", &scale_series, py::arg("series"), py::arg("k"));

  py::class_<Peak>(m, "Peak")
      .def_readonly("start_year", &Peak::start_year)
      .def_readonly("end_year", &Peak::end_year)
      .def_readonly("width_years", &Peak::width_years)
      .def_readonly("max_cei", &Peak::max_cei)
      .def("__repr__", [](const Peak& p) {
        return "Peak(" + std::to_string(p.start_year) + "-" + std::to_string(p.end_year) + ")";
      });

  py::class_<CohortReport>(m, "CohortReport")
      .def_readonly("aice", &CohortReport::aice)
      .def_readonly("mean", &CohortReport::mean)
      .def_readonly("stdev", &CohortReport::stdev)
      .def_readonly("window", &CohortReport::window)
      .def_readonly("peaks", &CohortReport::peaks)
      .def_readonly("min_gap", &CohortReport::min_gap)
      .def_readonly("max_gap", &CohortReport::max_gap)
      .def("to_json", [](const CohortReport& r) { return export_report(r, ExportFormat::Json); });

  py::class_<UShapeReport>(m, "UShapeReport")
      .def_readonly("pivot_year", &UShapeReport::pivot_year)
      .def_readonly("segment_size", &UShapeReport::segment_size)
      .def_readonly("slope", &UShapeReport::slope)
      .def_readonly("upward_trend", &UShapeReport::upward_trend)
      .def_readonly("drop_start_year", &UShapeReport::drop_start_year);

  m.def("aice", &aice, py::arg("series"), py::arg("window") = YearWindow{});
  m.def("detect_peaks",
        [](const CEISeries& s, YearWindow w, std::size_t width, double threshold) {
          return detect_peaks(s, w, PeakParams{width, threshold});
        },
        py::arg("series"), py::arg("window") = YearWindow{}, py::arg("width") = 21,
        py::arg("threshold") = 1.25);
  m.def("analyze",
        [](const CEISeries& s, YearWindow w, std::size_t width, double threshold) {
          return analyze(s, w, PeakParams{width, threshold});
        },
        py::arg("series"), py::arg("window") = YearWindow{}, py::arg("width") = 21,
        py::arg("threshold") = 1.25);
  m.def("u_shape_diagnostic", &u_shape_diagnostic, py::arg("series"),
        py::arg("pivot_year") = 1970);

  py::class_<AnalyticSurface>(m, "AnalyticSurface")
      .def_readonly("name", &AnalyticSurface::name)
      .def("__call__", [](const AnalyticSurface& s, double t, double x) { return s.f(t, x); })
      .def("normal_curvature",
           [](const AnalyticSurface& s, double t, double x, double dt, double dx) {
             return smooth_normal_curvature(s, t, x, Eigen::Vector2d(dt, dx));
           },
           py::arg("t"), py::arg("x"), py::arg("dt"), py::arg("dx"))
      .def("cei", &smooth_cei, py::arg("cohort"), py::arg("a"), py::arg("b"),
           py::arg("step") = 1.0)
      .def("materialize", &materialize, py::arg("first_year"), py::arg("last_year"),
           py::arg("first_age"), py::arg("last_age"), py::arg("step") = 1.0);

  m.def("plane", [](double a, double b, double c) { return plane(a, b, c); }, py::arg("a"),
        py::arg("b"), py::arg("c"));
  m.def("sphere_cap", &sphere_cap, py::arg("radius"), py::arg("t0") = 0.0, py::arg("x0") = 0.0);
  m.def("gaussian_ridge",
        [](double denom, double amplitude, double offset) {
          return cylinder_ridge(gaussian_profile(denom), amplitude, offset);
        },
        py::arg("denom") = 50.0, py::arg("amplitude") = 1.0, py::arg("offset") = 0.0);
  m.def("gaussian_bump",
        [](double amplitude, double sigma, double t0, double x0) {
          return gaussian_bump(amplitude, sigma, t0, x0);
        },
        py::arg("amplitude"), py::arg("sigma"), py::arg("t0") = 0.0, py::arg("x0") = 0.0);

  m.def("render_svg",
        [](const std::vector<std::pair<std::string, CEISeries>>& series,
           std::optional<YearWindow> window, bool annotate_peaks, const std::string& title) {
          std::vector<PlotSeries> plots;
          for (const auto& [name, s] : series) plots.push_back({name, s});
          PlotOptions opts;
          opts.window = window;
          opts.annotate_peaks = annotate_peaks;
          if (!title.empty()) opts.title = title;
          return render_svg(plots, opts);
        },
        py::arg("series"), py::arg("window") = YearWindow{}, py::arg("annotate_peaks") = true,
        py::arg("title") = "");
}
