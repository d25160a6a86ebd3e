#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mortgeom/surface.hpp"

namespace mortgeom {

/// A point (t, x, z) of the discrete mortality surface: calendar time, age
/// and death rate.
using GridPoint3 = Eigen::Vector3d;
using Vec3 = Eigen::Vector3d;

/// Chord-length parameters of a three-point curve; s0 = 0 and s2 = 1 always.
struct DiscreteParams {
  double s0 = 0.0;
  double s1 = 0.5;
  double s2 = 1.0;
};

/// Throws DegenerateStencilError when consecutive points coincide.
DiscreteParams discrete_parameter(const GridPoint3& q0, const GridPoint3& q1, const GridPoint3& q2);

/// Slope at the middle sample of the line through (s1, v1) that minimises the
/// squared deviations of the two outer samples.
double ls_derivative(const std::array<double, 3>& values, const DiscreteParams& params);
Vec3 ls_derivative(const std::array<Vec3, 3>& values, const DiscreteParams& params);

struct StencilCurve {
  std::array<GridPoint3, 3> points;
  DiscreteParams params;

  /// Computes the discrete parameters; throws DegenerateStencilError.
  static StencilCurve through(const GridPoint3& q0, const GridPoint3& q1, const GridPoint3& q2);
};

struct Tangent {
  Vec3 raw;   // least-squares derivative with respect to the discrete parameter
  Vec3 unit;  // raw / |raw|
};

/// Throws DegenerateStencilError when |raw| < 1e-14.
Tangent discrete_tangent(const StencilCurve& curve);

/// Curvature vector at the middle point: derivative of the unit tangent field
/// over the discrete parameter divided by the speed |raw tangent|. The unit
/// tangent at the middle point is the least-squares one; at the ends it is the
/// adjacent chord direction, located at the chord's parameter midpoint.
Vec3 curvature_vector(const StencilCurve& curve);

/// Unit N minimising sum_k (N . V_k)^2: eigenvector of sum_k V_k V_k^T for the
/// smallest eigenvalue, oriented with z >= 0 (ties: first nonzero component
/// positive). Throws AmbiguousNormalError if the two smallest eigenvalues are
/// within 1e-9.
Vec3 estimate_normal(std::span<const Vec3, 4> tangents);

/// Sum_k (N . V_k)^2.
double normal_residual(const Vec3& normal, std::span<const Vec3, 4> tangents);

inline double normal_curvature(const Vec3& normal, const Vec3& curvature) {
  return normal.dot(curvature);
}

// ---------------------------------------------------------------------------
// Whole-grid assembly

/// Heights on a uniform grid. Rows are years, columns ages; (first_year,
/// first_age) label the first row/column for cohort indexing and `step` is the
/// coordinate spacing along both axes.
struct GridSamples {
  int first_year = 0;
  int first_age = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double step = 1.0;
  std::vector<double> z;               // row-major
  std::vector<std::uint8_t> present;   // 1 = usable sample

  double height(std::size_t i, std::size_t j) const { return z[i * cols + j]; }
  bool has(std::size_t i, std::size_t j) const { return present[i * cols + j] != 0; }
};

struct GeometryOptions {
  double z_scale = 1.0;     // heights multiplied by this before geometry
  bool log_rates = false;   // use ln(rate); zero rates become missing
  double grid_step = 1.0;   // coordinate spacing of years and ages
  unsigned threads = 0;     // 0 = hardware concurrency
};

/// Throws GeometryError for z_scale <= 0 or grid_step <= 0.
GridSamples to_grid(const MortalitySurface& surface, const GeometryOptions& options = {});

/// Stencil directions, in order: cohort diagonal (year+1, age+1),
/// anti-diagonal (year+1, age-1), along years, along ages.
inline constexpr std::size_t kNumStencils = 4;

struct PointGeometry {
  bool valid = false;
  std::array<Vec3, kNumStencils> tangent{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  std::array<Vec3, kNumStencils> curvature{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                                           Vec3::Zero()};
  Vec3 normal = Vec3::Zero();
  std::array<double, kNumStencils> normal_curvature{};
};

struct GeometryField {
  int first_year = 0;
  int first_age = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double step = 1.0;
  std::vector<PointGeometry> points;  // row-major

  const PointGeometry& at(std::size_t i, std::size_t j) const { return points[i * cols + j]; }
  std::size_t valid_count() const;
};

/// Per-point geometry over every interior point whose 3x3 neighbourhood is
/// fully present. Border points, points next to missing cells and points with
/// a degenerate stencil or ambiguous normal are invalid with all fields zero.
/// Parallel over rows; the result does not depend on the thread count.
/// Throws GeometryError when the grid is smaller than 3x3.
GeometryField compute_geometry_field(const GridSamples& grid, unsigned threads = 0);
GeometryField compute_geometry_field(const MortalitySurface& surface,
                                     const GeometryOptions& options = {});

/// Geometry at a single interior point (i, j); `valid` is false when the
/// point cannot be evaluated.
PointGeometry compute_point_geometry(const GridSamples& grid, std::size_t i, std::size_t j);

}  // namespace mortgeom
