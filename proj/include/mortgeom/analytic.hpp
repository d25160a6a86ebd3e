#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include <Eigen/Core>

#include "mortgeom/geometry.hpp"
#include "mortgeom/surface.hpp"

namespace mortgeom {

using ScalarField = std::function<double(double t, double x)>;

/// Rectangle in (t, x) over which a catalog surface is defined and checked.
struct Domain {
  double t_min = -100.0;
  double t_max = 100.0;
  double x_min = -100.0;
  double x_max = 100.0;
};

/// Smooth graph surface z = f(t, x) with hand-coded derivatives.
struct AnalyticSurface {
  std::string name;
  ScalarField f, f_t, f_x, f_tt, f_tx, f_xx;
  Domain domain;
};

/// One-variable profile with its first two derivatives.
struct Profile1D {
  std::function<double(double)> g, dg, d2g;
};

/// exp(-u^2 / denom)
Profile1D gaussian_profile(double denom);
/// amplitude * sin(frequency * u) + offset
Profile1D sine_profile(double amplitude, double frequency, double offset);

/// Compares the supplied derivatives with central differences at `samples`
/// random points of the domain; throws GeometryError on a mismatch beyond
/// 1e-6 * (1 + |value|). Every catalog factory runs it.
void self_check(const AnalyticSurface& surface, std::size_t samples = 100,
                std::uint64_t seed = 12345);

/// z = a t + b x + c
AnalyticSurface plane(double a, double b, double c, Domain domain = {});
/// Upper cap of the sphere of radius R centred at (t0, x0, 0).
AnalyticSurface sphere_cap(double radius, double t0 = 0.0, double x0 = 0.0);
/// z = amplitude * g(t - x - offset): constant along every cohort line.
AnalyticSurface cylinder_ridge(Profile1D profile, double amplitude = 1.0, double offset = 0.0,
                               Domain domain = {});
/// z = amplitude * exp(-((t - t0)^2 + (x - x0)^2) / (2 sigma^2))
AnalyticSurface gaussian_bump(double amplitude, double sigma, double t0 = 0.0, double x0 = 0.0,
                              Domain domain = {});
/// z = u(t) v(x)
AnalyticSurface product_separable(Profile1D u, Profile1D v, Domain domain = {});

struct SmoothCurvatureSample {
  Vec3 normal;       // unit, upward (z >= 0)
  double curvature;  // normal curvature along the lifted direction
};

/// II(d, d) / I(d, d) for the tangent direction d = (dt, dx) at (t, x).
SmoothCurvatureSample smooth_curvature_sample(const AnalyticSurface& surface, double t, double x,
                                              const Eigen::Vector2d& direction);
double smooth_normal_curvature(const AnalyticSurface& surface, double t, double x,
                               const Eigen::Vector2d& direction);

/// In-plane direction whose lift is orthogonal (in R^3) to the lift of `d`.
Eigen::Vector2d orthogonal_tangent_direction(const AnalyticSurface& surface, double t, double x,
                                             const Eigen::Vector2d& d);

/// |NC_T - NC_N| at (t, t - c), T the cohort direction (1, 1).
double cohort_integrand(const AnalyticSurface& surface, double t, double cohort);

/// Integral over arc length of |NC_T - NC_N| along {(t, t - cohort) : t in
/// [a, b]} by composite midpoint rule, halving `step` until two successive
/// values agree to 1e-8 relative. Throws QuadratureError after 20 halvings.
double smooth_cei(const AnalyticSurface& surface, double cohort, double a, double b,
                  double step = 1.0);

/// Samples f at t = (first_year + i) * step, x = (first_age + j) * step.
/// Non-finite values are marked absent.
GridSamples sample_grid(const AnalyticSurface& surface, int first_year, int first_age,
                        std::size_t rows, std::size_t cols, double step = 1.0);

/// Same sampling, packaged as a MortalitySurface. Non-finite values are
/// missing; negative values raise FormatError.
MortalitySurface materialize(const AnalyticSurface& surface, int first_year, int last_year,
                             int first_age, int last_age, double step = 1.0);

}  // namespace mortgeom
