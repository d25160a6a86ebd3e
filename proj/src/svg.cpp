#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "mortgeom/error.hpp"
#include "mortgeom/export.hpp"

namespace mortgeom {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 450.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// 1, 2 or 5 times a power of ten, giving roughly `target` ticks.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& all, const PlotOptions& options) {
  if (all.empty()) throw AnalyticsError("nothing to plot");
  int y_first = all.front().series.first_birth_year;
  int y_last = all.front().series.last_birth_year();
  double v_max = 0.0;
  for (const auto& s : all) {
    if (s.series.empty()) throw AnalyticsError("cannot plot empty series '" + s.name + "'");
    y_first = std::min(y_first, s.series.first_birth_year);
    y_last = std::max(y_last, s.series.last_birth_year());
    for (const auto& e : s.series.entries) v_max = std::max(v_max, e.cei);
  }
  if (y_last == y_first) ++y_last;
  if (!(v_max > 0.0)) v_max = 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto px = [&](double year) { return kLeft + (year - y_first) / (y_last - y_first) * plot_w; };
  const auto py = [&](double v) { return kTop + plot_h - v / v_max * plot_h; };

  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(kWidth) +
      "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) +
      "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         escape(options.title) + "</text>\n";

  if (options.window) {
    const double a = px(std::max(options.window->first, y_first));
    const double b = px(std::min(options.window->last, y_last));
    if (b > a) {
      out += "<rect class=\"window\" x=\"" + num(a) + "\" y=\"" + num(kTop) + "\" width=\"" +
             num(b - a) + "\" height=\"" + num(plot_h) + "\" fill=\"#eeeeee\"/>\n";
    }
  }

  // Axes and ticks.
  out += "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + plot_h) + "\" x2=\"" +
         num(kLeft + plot_w) + "\" y2=\"" + num(kTop + plot_h) + "\"/>\n";
  out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) +
         "\" y2=\"" + num(kTop + plot_h) + "\"/>\n";
  out += "</g>\n<g class=\"ticks\" font-size=\"11\">\n";
  const double xs = std::max(1.0, nice_step(y_last - y_first, 10));
  for (double y = std::ceil(y_first / xs) * xs; y <= y_last; y += xs) {
    out += "<text x=\"" + num(px(y)) + "\" y=\"" + num(kTop + plot_h + 16) +
           "\" text-anchor=\"middle\">" + std::to_string(static_cast<int>(y)) + "</text>\n";
  }
  const double vs = nice_step(v_max, 5);
  for (double v = 0.0; v <= v_max * (1 + 1e-9); v += vs) {
    char label[32];
    std::snprintf(label, sizeof(label), "%.3g", v);
    out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(v) + 4) +
           "\" text-anchor=\"end\">" + label + "</text>\n";
  }
  out += "</g>\n";
  out += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 10) +
         "\" text-anchor=\"middle\" font-size=\"12\">birth year</text>\n";
  out += "<text x=\"16\" y=\"" + num(kTop + plot_h / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " +
         num(kTop + plot_h / 2) + ")\">CEI</text>\n";

  for (std::size_t k = 0; k < all.size(); ++k) {
    const auto& s = all[k].series;
    const char* color = kPalette[k % std::size(kPalette)];
    out += "<polyline class=\"series\" data-name=\"" + escape(all[k].name) +
           "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t e = 0; e < s.size(); ++e) {
      if (e > 0) out += ' ';
      out += num(px(s.birth_year(e))) + ',' + num(py(s.entries[e].cei));
    }
    out += "\"/>\n";
    out += "<text x=\"" + num(kLeft + plot_w - 4) + "\" y=\"" + num(kTop + 14 + 14.0 * k) +
           "\" text-anchor=\"end\" font-size=\"11\" fill=\"" + color + "\">" +
           escape(all[k].name) + "</text>\n";

    if (options.annotate_peaks && options.window) {
      try {
        const auto report = detect_peaks(s, *options.window, options.peak_params);
        for (const auto& p : report.peaks) {
          const double a = px(p.start_year);
          const double b = px(p.end_year);
          const double y = py(p.max_cei) - 6;
          out += "<g class=\"peak\"><line x1=\"" + num(a) + "\" y1=\"" + num(y) + "\" x2=\"" +
                 num(b) + "\" y2=\"" + num(y) + "\" stroke=\"" + color +
                 "\"/><text x=\"" + num((a + b) / 2) + "\" y=\"" + num(y - 3) +
                 "\" text-anchor=\"middle\" font-size=\"10\">" + std::to_string(p.width_years) +
                 "y</text></g>\n";
        }
      } catch (const AnalyticsError&) {
        // window too short or outside this series: plot without annotations
      }
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace mortgeom
