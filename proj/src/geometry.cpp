#include "mortgeom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

#include <Eigen/Eigenvalues>

#include "mortgeom/error.hpp"

namespace mortgeom {
namespace {

constexpr double kMinTangentNorm = 1e-14;
constexpr double kMinEigenGap = 1e-9;

std::optional<DiscreteParams> try_discrete_parameter(const GridPoint3& q0, const GridPoint3& q1,
                                                     const GridPoint3& q2) {
  const double a = (q1 - q0).norm();
  const double b = (q2 - q1).norm();
  if (!(a > 0.0) || !(b > 0.0)) return std::nullopt;
  return DiscreteParams{0.0, a / (a + b), 1.0};
}

std::optional<Tangent> try_tangent(const StencilCurve& curve) {
  const Vec3 raw = ls_derivative(curve.points, curve.params);
  const double norm = raw.norm();
  if (!(norm >= kMinTangentNorm)) return std::nullopt;
  return Tangent{raw, raw / norm};
}

std::optional<Vec3> try_curvature_vector(const StencilCurve& curve) {
  const auto mid = try_tangent(curve);
  if (!mid) return std::nullopt;
  const auto& [q0, q1, q2] = curve.points;
  const Vec3 back = q1 - q0;
  const Vec3 fwd = q2 - q1;
  const double nb = back.norm();
  const double nf = fwd.norm();
  if (!(nb >= kMinTangentNorm) || !(nf >= kMinTangentNorm)) return std::nullopt;

  // A chord direction approximates the tangent halfway along its chord.
  const auto& s = curve.params;
  const DiscreteParams at{0.5 * (s.s0 + s.s1), s.s1, 0.5 * (s.s1 + s.s2)};
  const Vec3 dv = ls_derivative({back / nb, mid->unit, fwd / nf}, at);
  return dv / mid->raw.norm();
}

std::optional<Vec3> try_estimate_normal(std::span<const Vec3, 4> tangents) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (const auto& v : tangents) m.noalias() += v * v.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m);
  if (solver.info() != Eigen::Success) return std::nullopt;
  const auto& evals = solver.eigenvalues();  // ascending
  if (!(evals(1) - evals(0) >= kMinEigenGap)) return std::nullopt;
  Vec3 n = solver.eigenvectors().col(0);
  n.normalize();
  double sign = 1.0;
  if (n.z() != 0.0) {
    sign = n.z() > 0.0 ? 1.0 : -1.0;
  } else if (n.x() != 0.0) {
    sign = n.x() > 0.0 ? 1.0 : -1.0;
  } else if (n.y() != 0.0) {
    sign = n.y() > 0.0 ? 1.0 : -1.0;
  }
  return sign * n;
}

}  // namespace

DiscreteParams discrete_parameter(const GridPoint3& q0, const GridPoint3& q1,
                                  const GridPoint3& q2) {
  const auto params = try_discrete_parameter(q0, q1, q2);
  if (!params) throw DegenerateStencilError("stencil has coincident consecutive points");
  return *params;
}

double ls_derivative(const std::array<double, 3>& v, const DiscreteParams& p) {
  const double d0 = p.s0 - p.s1;
  const double d2 = p.s2 - p.s1;
  return (d0 * (v[0] - v[1]) + d2 * (v[2] - v[1])) / (d0 * d0 + d2 * d2);
}

Vec3 ls_derivative(const std::array<Vec3, 3>& v, const DiscreteParams& p) {
  const double d0 = p.s0 - p.s1;
  const double d2 = p.s2 - p.s1;
  return (d0 * (v[0] - v[1]) + d2 * (v[2] - v[1])) / (d0 * d0 + d2 * d2);
}

StencilCurve StencilCurve::through(const GridPoint3& q0, const GridPoint3& q1,
                                   const GridPoint3& q2) {
  return StencilCurve{{q0, q1, q2}, discrete_parameter(q0, q1, q2)};
}

Tangent discrete_tangent(const StencilCurve& curve) {
  const auto t = try_tangent(curve);
  if (!t) throw DegenerateStencilError("discrete tangent vanishes");
  return *t;
}

Vec3 curvature_vector(const StencilCurve& curve) {
  const auto cv = try_curvature_vector(curve);
  if (!cv) throw DegenerateStencilError("degenerate tangent in curvature stencil");
  return *cv;
}

Vec3 estimate_normal(std::span<const Vec3, 4> tangents) {
  const auto n = try_estimate_normal(tangents);
  if (!n) throw AmbiguousNormalError("tangent set does not determine a unique normal");
  return *n;
}

double normal_residual(const Vec3& normal, std::span<const Vec3, 4> tangents) {
  double f = 0.0;
  for (const auto& v : tangents) {
    const double d = normal.dot(v);
    f += d * d;
  }
  return f;
}

GridSamples to_grid(const MortalitySurface& surface, const GeometryOptions& options) {
  if (!(options.z_scale > 0.0)) throw GeometryError("z_scale must be positive");
  if (!(options.grid_step > 0.0)) throw GeometryError("grid_step must be positive");
  GridSamples grid;
  grid.first_year = surface.first_year();
  grid.first_age = surface.first_age();
  grid.rows = surface.num_years();
  grid.cols = surface.num_ages();
  grid.step = options.grid_step;
  grid.z.resize(grid.rows * grid.cols, 0.0);
  grid.present.resize(grid.z.size(), 0);
  for (std::size_t i = 0; i < grid.rows; ++i) {
    for (std::size_t j = 0; j < grid.cols; ++j) {
      if (surface.missing(i, j)) continue;
      double v = surface.rate(i, j);
      if (options.log_rates) {
        if (!(v > 0.0)) continue;
        v = std::log(v);
      }
      grid.z[i * grid.cols + j] = options.z_scale * v;
      grid.present[i * grid.cols + j] = 1;
    }
  }
  return grid;
}

std::size_t GeometryField::valid_count() const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [](const PointGeometry& p) { return p.valid; }));
}

PointGeometry compute_point_geometry(const GridSamples& grid, std::size_t i, std::size_t j) {
  PointGeometry out;
  if (i == 0 || j == 0 || i + 1 >= grid.rows || j + 1 >= grid.cols) return out;
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      if (!grid.has(i + di, j + dj)) return out;
    }
  }

  // Coordinates relative to the centre point; only differences enter.
  const double zc = grid.height(i, j);
  const auto p = [&](int di, int dj) {
    return GridPoint3(di * grid.step, dj * grid.step, grid.height(i + di, j + dj) - zc);
  };
  const GridPoint3 c = GridPoint3::Zero();
  const std::array<std::array<GridPoint3, 3>, kNumStencils> stencils{{
      {p(-1, -1), c, p(1, 1)},
      {p(-1, 1), c, p(1, -1)},
      {p(-1, 0), c, p(1, 0)},
      {p(0, -1), c, p(0, 1)},
  }};

  std::array<Vec3, kNumStencils> tangents;
  std::array<Vec3, kNumStencils> curvatures;
  for (std::size_t k = 0; k < kNumStencils; ++k) {
    const auto& q = stencils[k];
    const auto params = try_discrete_parameter(q[0], q[1], q[2]);
    if (!params) return out;
    const StencilCurve curve{q, *params};
    const auto t = try_tangent(curve);
    const auto cv = try_curvature_vector(curve);
    if (!t || !cv) return out;
    tangents[k] = t->unit;
    curvatures[k] = *cv;
  }
  const auto n = try_estimate_normal(tangents);
  if (!n) return out;

  out.valid = true;
  out.tangent = tangents;
  out.curvature = curvatures;
  out.normal = *n;
  for (std::size_t k = 0; k < kNumStencils; ++k) {
    out.normal_curvature[k] = normal_curvature(*n, curvatures[k]);
  }
  return out;
}

GeometryField compute_geometry_field(const GridSamples& grid, unsigned threads) {
  if (grid.rows < 3 || grid.cols < 3) {
    throw GeometryError("surface must be at least 3x3, got " + std::to_string(grid.rows) + "x" +
                        std::to_string(grid.cols));
  }
  if (grid.z.size() != grid.rows * grid.cols || grid.present.size() != grid.z.size()) {
    throw GeometryError("grid sample buffers do not match its dimensions");
  }
  GeometryField field;
  field.first_year = grid.first_year;
  field.first_age = grid.first_age;
  field.rows = grid.rows;
  field.cols = grid.cols;
  field.step = grid.step;
  field.points.resize(grid.rows * grid.cols);

  const auto fill_rows = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < grid.cols; ++j) {
        field.points[i * grid.cols + j] = compute_point_geometry(grid, i, j);
      }
    }
  };

  std::size_t workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = std::min(workers, grid.rows);
  if (workers <= 1 || grid.rows * grid.cols < 4096) {
    fill_rows(0, grid.rows);
    return field;
  }
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (grid.rows + workers - 1) / workers;
    for (std::size_t begin = 0; begin < grid.rows; begin += chunk) {
      pool.emplace_back(fill_rows, begin, std::min(grid.rows, begin + chunk));
    }
  }
  return field;
}

GeometryField compute_geometry_field(const MortalitySurface& surface,
                                     const GeometryOptions& options) {
  return compute_geometry_field(to_grid(surface, options), options.threads);
}

}  // namespace mortgeom
