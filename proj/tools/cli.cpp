#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mortgeom/analytic.hpp"
#include "mortgeom/cohort.hpp"
#include "mortgeom/error.hpp"
#include "mortgeom/export.hpp"
#include "mortgeom/geometry.hpp"
#include "mortgeom/ingest.hpp"
#include "mortgeom/text.hpp"

namespace mortgeom::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kOutputDirEnv = "MORTGEOM_OUTPUT_DIR";

struct RunConfig {
  std::vector<std::string> inputs;
  std::string input_format = "auto";  // auto | hmd | csv | json | series
  int first_year = 0;
  int first_age = 0;
  std::string sex = "total";
  double z_scale = 1.0;
  bool log_rates = false;
  double grid_step = 1.0;
  unsigned threads = 0;
  std::string window = "1922:1970";
  int trim_year = kDefaultTrimYear;
  bool no_trim = false;
  std::string normalization = "sum";
  std::size_t baseline_width = PeakParams{}.width;
  double threshold = PeakParams{}.threshold;
  std::string format;
  std::string output;
};

struct UsageError : Error {
  using Error::Error;
};

std::pair<int, int> parse_range(const std::string& text, const char* what) {
  const auto parts = mortgeom::text::split(text, ':');
  if (parts.size() == 2) {
    const auto a = mortgeom::text::parse_long(parts[0]);
    const auto b = mortgeom::text::parse_long(parts[1]);
    if (a && b && *a <= *b) return {static_cast<int>(*a), static_cast<int>(*b)};
  }
  throw UsageError(std::string("invalid ") + what + " '" + text + "' (expected FIRST:LAST)");
}

std::string resolve_format(const RunConfig& cfg, const std::string& path) {
  if (cfg.input_format != "auto") return cfg.input_format;
  const auto ext = fs::path(path).extension().string();
  if (ext == ".csv") {
    std::ifstream in(path);
    std::string head;
    std::getline(in, head);
    return head.starts_with("birth_year,") ? "series" : "csv";
  }
  if (ext == ".json") return "json";
  return "hmd";
}

MortalitySurface load_surface(const RunConfig& cfg, const std::string& path) {
  const auto content = read_file(path);
  const auto format = resolve_format(cfg, path);
  const Sex sex = parse_sex(cfg.sex);
  if (format == "hmd") return parse_hmd(content).surface(sex);
  if (format == "csv") return parse_csv_matrix(content, cfg.first_year, cfg.first_age, sex, path);
  if (format == "json") return parse_surface_json(content);
  throw UsageError("input format '" + format + "' does not describe a surface");
}

GeometryOptions geometry_options(const RunConfig& cfg) {
  if (!(cfg.z_scale > 0.0)) throw UsageError("--z-scale must be positive");
  return GeometryOptions{cfg.z_scale, cfg.log_rates, cfg.grid_step, cfg.threads};
}

CeiNormalization normalization(const RunConfig& cfg) {
  return cfg.normalization == "mean" ? CeiNormalization::Mean : CeiNormalization::Sum;
}

/// Untrimmed series from a surface file, or read directly from a series CSV.
CEISeries load_series(const RunConfig& cfg, const std::string& path) {
  if (resolve_format(cfg, path) == "series") return parse_series_csv(read_file(path));
  const auto surface = load_surface(cfg, path);
  const auto field = compute_geometry_field(surface, geometry_options(cfg));
  return cei_series(field, surface, normalization(cfg));
}

CEISeries maybe_trim(const RunConfig& cfg, const CEISeries& series) {
  return cfg.no_trim ? series : trim_series(series, cfg.trim_year);
}

YearWindow window(const RunConfig& cfg) {
  const auto [a, b] = parse_range(cfg.window, "window");
  return {a, b};
}

ExportFormat export_format(const std::string& f) {
  return f == "json" ? ExportFormat::Json : ExportFormat::Csv;
}

/// Writes to stdout, or atomically to `path` (relative paths resolve against
/// $MORTGEOM_OUTPUT_DIR when set).
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  fs::path target(path);
  if (target.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
      target = fs::path(dir) / target;
    }
  }
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ParseError("cannot write '" + tmp.string() + "'");
    f << content;
    f.close();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ParseError("failed writing '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, target);
}

std::string text_report(const CohortReport& r, bool with_aice, bool with_peaks) {
  std::ostringstream os;
  os << "window " << r.window.first << ":" << r.window.last << "\n";
  if (with_aice) {
    os << "mean  " << mortgeom::text::format_double(r.mean) << "\n"
       << "stdev " << mortgeom::text::format_double(r.stdev) << "\n"
       << "aice  " << mortgeom::text::format_double(r.aice) << "\n";
  }
  if (with_peaks) {
    os << "peaks " << r.peaks.size() << "\n";
    for (const auto& p : r.peaks) {
      os << "  " << p.start_year << "-" << p.end_year << " width " << p.width_years << " max "
         << mortgeom::text::format_double(p.max_cei) << "\n";
    }
    os << "min_gap " << (r.min_gap ? std::to_string(*r.min_gap) : "-") << "\n"
       << "max_gap " << (r.max_gap ? std::to_string(*r.max_gap) : "-") << "\n";
  }
  return os.str();
}

void add_input_options(CLI::App* cmd, RunConfig& cfg, bool series_allowed) {
  cmd->add_option("input", cfg.inputs, "Input file")->required()->expected(1);
  std::vector<std::string> formats{"auto", "hmd", "csv", "json"};
  if (series_allowed) formats.push_back("series");
  cmd->add_option("--input-format", cfg.input_format,
                  "hmd (Mx_1x1), csv (year x age matrix), json (surface)" +
                      std::string(series_allowed ? ", series (CEI CSV)" : "") +
                      "; auto picks by extension")
      ->check(CLI::IsMember(formats));
  cmd->add_option("--first-year", cfg.first_year, "First year of a CSV matrix");
  cmd->add_option("--first-age", cfg.first_age, "First age of a CSV matrix");
  cmd->add_option("--sex", cfg.sex, "Sex column of an HMD file")
      ->check(CLI::IsMember({"female", "male", "total"}));
  cmd->add_option("--z-scale", cfg.z_scale, "Multiply rates before geometry");
  cmd->add_flag("--log-rates", cfg.log_rates, "Use log death rates");
  cmd->add_option("--grid-step", cfg.grid_step, "Coordinate spacing of years and ages");
  cmd->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--normalization", cfg.normalization, "Per-cohort sum or mean")
      ->check(CLI::IsMember({"sum", "mean"}));
}

void add_analysis_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--window", cfg.window, "Birth-year window FIRST:LAST");
  cmd->add_option("--trim", cfg.trim_year, "Drop birth years after this");
  cmd->add_flag("--no-trim", cfg.no_trim, "Keep the young-cohort tail");
}

void add_peak_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--baseline-width", cfg.baseline_width, "Rolling-median width (odd years)");
  cmd->add_option("--threshold", cfg.threshold, "Peak when cei > threshold x baseline");
}

struct SyntheticConfig {
  std::string shape = "plane";
  std::string years = "1900:2000";
  std::string ages = "0:100";
  double step = 1.0;
  double a = 1e-4, b = 1e-4, c = 0.0;
  double radius = 500.0;
  double center_t = 0.0, center_x = 0.0;
  double amplitude = 1.0;
  double sigma = 5.0;
  double denom = 50.0;
  double offset = 0.0;
  double frequency = 0.1;
  std::string format = "csv";
  std::string output;
};

AnalyticSurface synthetic_surface(const SyntheticConfig& s) {
  if (s.shape == "plane") return plane(s.a, s.b, s.c);
  if (s.shape == "sphere") return sphere_cap(s.radius, s.center_t, s.center_x);
  if (s.shape == "ridge") {
    return cylinder_ridge(gaussian_profile(s.denom), s.amplitude, s.offset);
  }
  if (s.shape == "bump") return gaussian_bump(s.amplitude, s.sigma, s.center_t, s.center_x);
  // product: amplitude * (1.5 + sin(f t)) * (1.5 + sin(f x)), positive everywhere
  return product_separable(sine_profile(s.amplitude, s.frequency, 1.5 * s.amplitude),
                           sine_profile(1.0, s.frequency, 1.5));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cohort effect detection on mortality surfaces", "mortgeom"};
  app.require_subcommand(1);
  RunConfig cfg;
  SyntheticConfig syn;

  auto* cei = app.add_subcommand("cei", "Cohort effect index series");
  add_input_options(cei, cfg, false);
  cei->add_option("--trim", cfg.trim_year, "Drop birth years after this");
  cei->add_flag("--no-trim", cfg.no_trim, "Keep the young-cohort tail");
  cei->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cei->add_option("-o,--output", cfg.output, "Output path (default stdout)");

  auto* aice_cmd = app.add_subcommand("aice", "Aggregating index of cohort effect");
  add_input_options(aice_cmd, cfg, true);
  add_analysis_options(aice_cmd, cfg);
  aice_cmd->add_option("--format", cfg.format, "text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  aice_cmd->add_option("-o,--output", cfg.output, "Output path (default stdout)");

  auto* gaps = app.add_subcommand("gaps", "Peaks and generation gaps");
  add_input_options(gaps, cfg, true);
  add_analysis_options(gaps, cfg);
  add_peak_options(gaps, cfg);
  gaps->add_option("--format", cfg.format, "text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  gaps->add_option("-o,--output", cfg.output, "Output path (default stdout)");

  auto* surface = app.add_subcommand("surface", "Per-point geometry field dump");
  add_input_options(surface, cfg, false);
  surface->add_option("--format", cfg.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  surface->add_option("-o,--output", cfg.output, "Output path (default stdout)");

  auto* synthetic = app.add_subcommand("synthetic", "Materialise a catalog surface");
  synthetic->add_option("--shape", syn.shape, "plane, sphere, ridge, bump or product")
      ->check(CLI::IsMember({"plane", "sphere", "ridge", "bump", "product"}));
  synthetic->add_option("--years", syn.years, "FIRST:LAST year labels");
  synthetic->add_option("--ages", syn.ages, "FIRST:LAST age labels");
  synthetic->add_option("--step", syn.step, "Coordinate = label x step");
  synthetic->add_option("--a", syn.a, "plane: slope in t");
  synthetic->add_option("--b", syn.b, "plane: slope in x");
  synthetic->add_option("--c", syn.c, "plane: intercept");
  synthetic->add_option("--radius", syn.radius, "sphere: radius");
  synthetic->add_option("--center-t", syn.center_t, "sphere/bump: centre t");
  synthetic->add_option("--center-x", syn.center_x, "sphere/bump: centre x");
  synthetic->add_option("--amplitude", syn.amplitude, "ridge/bump/product: amplitude");
  synthetic->add_option("--sigma", syn.sigma, "bump: width");
  synthetic->add_option("--denom", syn.denom, "ridge: profile exp(-u^2/denom)");
  synthetic->add_option("--offset", syn.offset, "ridge: birth year of the ridge (in t - x)");
  synthetic->add_option("--frequency", syn.frequency, "product: sine frequency");
  synthetic->add_option("--format", syn.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  synthetic->add_option("-o,--output", syn.output, "Output path (default stdout)");

  auto* plot = app.add_subcommand("plot", "SVG line chart of CEI series");
  plot->add_option("inputs", cfg.inputs, "Series CSV files")->required();
  plot->add_option("--window", cfg.window, "Shaded birth-year window FIRST:LAST");
  add_peak_options(plot, cfg);
  bool no_peaks = false;
  std::string title = PlotOptions{}.title;
  plot->add_flag("--no-peaks", no_peaks, "Skip peak annotations");
  plot->add_option("--title", title, "Chart title");
  plot->add_option("-o,--output", cfg.output, "Output path (default stdout)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out, help_err;
    const int code = app.exit(e, help_out, help_err);
    out << help_out.str();
    err << help_err.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    const PeakParams peak_params{cfg.baseline_width, cfg.threshold};
    if (*cei) {
      const auto series = maybe_trim(cfg, load_series(cfg, cfg.inputs.front()));
      emit(cfg.output, export_series(series, export_format(cfg.format)), out);
    } else if (*aice_cmd || *gaps) {
      const auto series = maybe_trim(cfg, load_series(cfg, cfg.inputs.front()));
      const auto win = window(cfg);
      const bool is_aice = aice_cmd->parsed();
      const auto report = is_aice ? aice(series, win) : detect_peaks(series, win, peak_params);
      const auto fmt = cfg.format.empty() ? std::string("text") : cfg.format;
      emit(cfg.output,
           fmt == "text" ? text_report(report, is_aice, !is_aice)
                         : export_report(report, export_format(fmt)),
           out);
    } else if (*surface) {
      const auto s = load_surface(cfg, cfg.inputs.front());
      const auto field = compute_geometry_field(s, geometry_options(cfg));
      emit(cfg.output, export_field(field, export_format(cfg.format)), out);
    } else if (*synthetic) {
      const auto [y0, y1] = parse_range(syn.years, "year range");
      const auto [a0, a1] = parse_range(syn.ages, "age range");
      const auto s = materialize(synthetic_surface(syn), y0, y1, a0, a1, syn.step);
      emit(syn.output,
           serialize(s, syn.format == "json" ? SurfaceFormat::Json : SurfaceFormat::Csv), out);
    } else if (*plot) {
      std::vector<PlotSeries> series;
      for (const auto& path : cfg.inputs) {
        series.push_back({fs::path(path).stem().string(), parse_series_csv(read_file(path))});
      }
      PlotOptions opts;
      opts.window = window(cfg);
      opts.annotate_peaks = !no_peaks;
      opts.peak_params = peak_params;
      opts.title = title;
      emit(cfg.output, render_svg(series, opts), out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  } catch (const GeometryError& e) {
    err << "error: " << e.what() << "\n";
    return kGeometry;
  } catch (const AnalyticsError& e) {
    err << "error: " << e.what() << "\n";
    return kAnalytics;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  }
  return kOk;
}

}  // namespace mortgeom::cli
