#include "mortgeom/analytic.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "mortgeom/error.hpp"

namespace mortgeom {

Profile1D gaussian_profile(double denom) {
  return {[denom](double u) { return std::exp(-u * u / denom); },
          [denom](double u) { return -2.0 * u / denom * std::exp(-u * u / denom); },
          [denom](double u) {
            return (4.0 * u * u / (denom * denom) - 2.0 / denom) * std::exp(-u * u / denom);
          }};
}

Profile1D sine_profile(double amplitude, double frequency, double offset) {
  return {[=](double u) { return amplitude * std::sin(frequency * u) + offset; },
          [=](double u) { return amplitude * frequency * std::cos(frequency * u); },
          [=](double u) { return -amplitude * frequency * frequency * std::sin(frequency * u); }};
}

void self_check(const AnalyticSurface& s, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(s.domain.t_min, s.domain.t_max);
  std::uniform_real_distribution<double> ux(s.domain.x_min, s.domain.x_max);
  constexpr double h = 1e-4;
  const auto check = [&](const char* what, double supplied, double fd, double t, double x) {
    if (std::abs(supplied - fd) > 1e-6 * (1.0 + std::abs(fd))) {
      std::ostringstream msg;
      msg << s.name << ": " << what << " = " << supplied << " but finite difference gives " << fd
          << " at (" << t << ", " << x << ")";
      throw GeometryError(msg.str());
    }
  };
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = ut(rng);
    const double x = ux(rng);
    check("f_t", s.f_t(t, x), (s.f(t + h, x) - s.f(t - h, x)) / (2 * h), t, x);
    check("f_x", s.f_x(t, x), (s.f(t, x + h) - s.f(t, x - h)) / (2 * h), t, x);
    check("f_tt", s.f_tt(t, x), (s.f_t(t + h, x) - s.f_t(t - h, x)) / (2 * h), t, x);
    check("f_tx", s.f_tx(t, x), (s.f_t(t, x + h) - s.f_t(t, x - h)) / (2 * h), t, x);
    check("f_xx", s.f_xx(t, x), (s.f_x(t, x + h) - s.f_x(t, x - h)) / (2 * h), t, x);
  }
}

AnalyticSurface plane(double a, double b, double c, Domain domain) {
  AnalyticSurface s{"plane",
                    [=](double t, double x) { return a * t + b * x + c; },
                    [=](double, double) { return a; },
                    [=](double, double) { return b; },
                    [](double, double) { return 0.0; },
                    [](double, double) { return 0.0; },
                    [](double, double) { return 0.0; },
                    domain};
  self_check(s);
  return s;
}

AnalyticSurface sphere_cap(double radius, double t0, double x0) {
  if (!(radius > 0.0)) throw GeometryError("sphere radius must be positive");
  const double r2 = radius * radius;
  const auto w = [=](double t, double x) {
    return std::sqrt(r2 - (t - t0) * (t - t0) - (x - x0) * (x - x0));
  };
  // Check on the square inscribed in 0.9 R so the cap stays well defined.
  const double half = 0.9 * radius / std::sqrt(2.0);
  AnalyticSurface s{"sphere_cap",
                    w,
                    [=](double t, double x) { return -(t - t0) / w(t, x); },
                    [=](double t, double x) { return -(x - x0) / w(t, x); },
                    [=](double t, double x) {
                      const double z = w(t, x);
                      return -(r2 - (x - x0) * (x - x0)) / (z * z * z);
                    },
                    [=](double t, double x) {
                      const double z = w(t, x);
                      return -(t - t0) * (x - x0) / (z * z * z);
                    },
                    [=](double t, double x) {
                      const double z = w(t, x);
                      return -(r2 - (t - t0) * (t - t0)) / (z * z * z);
                    },
                    Domain{t0 - half, t0 + half, x0 - half, x0 + half}};
  self_check(s);
  return s;
}

AnalyticSurface cylinder_ridge(Profile1D p, double amplitude, double offset, Domain domain) {
  AnalyticSurface s{"cylinder_ridge",
                    [=](double t, double x) { return amplitude * p.g(t - x - offset); },
                    [=](double t, double x) { return amplitude * p.dg(t - x - offset); },
                    [=](double t, double x) { return -amplitude * p.dg(t - x - offset); },
                    [=](double t, double x) { return amplitude * p.d2g(t - x - offset); },
                    [=](double t, double x) { return -amplitude * p.d2g(t - x - offset); },
                    [=](double t, double x) { return amplitude * p.d2g(t - x - offset); },
                    domain};
  self_check(s);
  return s;
}

AnalyticSurface gaussian_bump(double amplitude, double sigma, double t0, double x0,
                              Domain domain) {
  if (!(sigma > 0.0)) throw GeometryError("gaussian_bump sigma must be positive");
  const double s2 = sigma * sigma;
  const auto g = [=](double t, double x) {
    return amplitude * std::exp(-((t - t0) * (t - t0) + (x - x0) * (x - x0)) / (2.0 * s2));
  };
  AnalyticSurface s{"gaussian_bump",
                    g,
                    [=](double t, double x) { return -(t - t0) / s2 * g(t, x); },
                    [=](double t, double x) { return -(x - x0) / s2 * g(t, x); },
                    [=](double t, double x) {
                      return ((t - t0) * (t - t0) / (s2 * s2) - 1.0 / s2) * g(t, x);
                    },
                    [=](double t, double x) { return (t - t0) * (x - x0) / (s2 * s2) * g(t, x); },
                    [=](double t, double x) {
                      return ((x - x0) * (x - x0) / (s2 * s2) - 1.0 / s2) * g(t, x);
                    },
                    domain};
  self_check(s);
  return s;
}

AnalyticSurface product_separable(Profile1D u, Profile1D v, Domain domain) {
  AnalyticSurface s{"product_separable",
                    [=](double t, double x) { return u.g(t) * v.g(x); },
                    [=](double t, double x) { return u.dg(t) * v.g(x); },
                    [=](double t, double x) { return u.g(t) * v.dg(x); },
                    [=](double t, double x) { return u.d2g(t) * v.g(x); },
                    [=](double t, double x) { return u.dg(t) * v.dg(x); },
                    [=](double t, double x) { return u.g(t) * v.d2g(x); },
                    domain};
  self_check(s);
  return s;
}

SmoothCurvatureSample smooth_curvature_sample(const AnalyticSurface& s, double t, double x,
                                              const Eigen::Vector2d& d) {
  const double ft = s.f_t(t, x);
  const double fx = s.f_x(t, x);
  const double w = std::sqrt(1.0 + ft * ft + fx * fx);
  Eigen::Matrix2d hess;
  hess << s.f_tt(t, x), s.f_tx(t, x), s.f_tx(t, x), s.f_xx(t, x);
  const double lift = ft * d.x() + fx * d.y();
  const double first_form = d.squaredNorm() + lift * lift;
  return {Vec3(-ft, -fx, 1.0) / w, d.dot(hess * d) / (first_form * w)};
}

double smooth_normal_curvature(const AnalyticSurface& s, double t, double x,
                               const Eigen::Vector2d& d) {
  return smooth_curvature_sample(s, t, x, d).curvature;
}

Eigen::Vector2d orthogonal_tangent_direction(const AnalyticSurface& s, double t, double x,
                                             const Eigen::Vector2d& d) {
  const double ft = s.f_t(t, x);
  const double fx = s.f_x(t, x);
  Eigen::Matrix2d first_form;
  first_form << 1.0 + ft * ft, ft * fx, ft * fx, 1.0 + fx * fx;
  const Eigen::Vector2d w = first_form * d;
  return {-w.y(), w.x()};
}

double cohort_integrand(const AnalyticSurface& s, double t, double cohort) {
  const double x = t - cohort;
  const Eigen::Vector2d along(1.0, 1.0);
  const auto across = orthogonal_tangent_direction(s, t, x, along);
  return std::abs(smooth_normal_curvature(s, t, x, along) -
                  smooth_normal_curvature(s, t, x, across));
}

namespace {

double midpoint_rule(const AnalyticSurface& s, double cohort, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = a + (static_cast<double>(k) + 0.5) * h;
    const double slope = s.f_t(t, t - cohort) + s.f_x(t, t - cohort);
    const double speed = std::sqrt(2.0 + slope * slope);  // ds/dt of the lifted path
    sum += cohort_integrand(s, t, cohort) * speed;
  }
  return sum * h;
}

}  // namespace

double smooth_cei(const AnalyticSurface& s, double cohort, double a, double b, double step) {
  if (!(b > a)) throw QuadratureError("smooth_cei needs a < b");
  if (!(step > 0.0)) throw QuadratureError("quadrature step must be positive");
  auto n = static_cast<std::size_t>(std::ceil((b - a) / step));
  double prev = midpoint_rule(s, cohort, a, b, n);
  for (int halving = 0; halving < 20; ++halving) {
    n *= 2;
    const double next = midpoint_rule(s, cohort, a, b, n);
    if (!std::isfinite(next)) break;
    const double diff = std::abs(next - prev);
    if (diff <= 1e-8 * std::abs(next) || diff <= 1e-15) return next;
    prev = next;
  }
  throw QuadratureError("smooth_cei did not converge for cohort " + std::to_string(cohort));
}

GridSamples sample_grid(const AnalyticSurface& s, int first_year, int first_age,
                        std::size_t rows, std::size_t cols, double step) {
  GridSamples grid;
  grid.first_year = first_year;
  grid.first_age = first_age;
  grid.rows = rows;
  grid.cols = cols;
  grid.step = step;
  grid.z.resize(rows * cols, 0.0);
  grid.present.resize(rows * cols, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double t = (first_year + static_cast<double>(i)) * step;
      const double x = (first_age + static_cast<double>(j)) * step;
      const double z = s.f(t, x);
      if (!std::isfinite(z)) continue;
      grid.z[i * cols + j] = z;
      grid.present[i * cols + j] = 1;
    }
  }
  return grid;
}

MortalitySurface materialize(const AnalyticSurface& s, int first_year, int last_year,
                             int first_age, int last_age, double step) {
  if (last_year < first_year || last_age < first_age) {
    throw GeometryError("materialize needs well-ordered year and age ranges");
  }
  const auto rows = static_cast<std::size_t>(last_year - first_year + 1);
  const auto cols = static_cast<std::size_t>(last_age - first_age + 1);
  const auto grid = sample_grid(s, first_year, first_age, rows, cols, step);
  std::vector<std::optional<double>> cells(rows * cols);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (grid.present[k]) cells[k] = grid.z[k];
  }
  return MortalitySurface(first_year, first_age, rows, cols, cells, Sex::Total,
                          "synthetic " + s.name);
}

}  // namespace mortgeom
