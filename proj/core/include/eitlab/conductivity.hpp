#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eitlab/grf.hpp"
#include "eitlab/types.hpp"

namespace eit {

/// Conductivity on the N x N cell-centered grid of (-1,1)^2 (see grf.hpp),
/// restricted to the unit disk. Cells outside the disk hold 0.
struct ConductivityField {
  RealGrid values;
  MaskGrid mask;
  /// gamma == 1 on masked cells with |x| >= support_radius.
  double support_radius = 1.0;

  int grid_size() const { return static_cast<int>(values.rows()); }
  /// Nearest-cell lookup at (x, y); points in cells outside the disk read as 1.
  double at_point(double x, double y) const;
  /// Distinct masked values, sorted, merging values closer than tol.
  std::vector<double> distinct_values(double tol = 1e-12) const;
};

/// Cells whose center satisfies |x| < 1.
MaskGrid disk_mask(int n);

/// Radius |x| of each cell center.
RealGrid cell_radius(int n);

/// Constant-one conductivity on the disk.
ConductivityField homogeneous_field(int n);

/// Smooth blend from 1 (t <= r_minus) to w (t -> r_plus), 0 beyond r_plus.
double cutoff_fn(double t, double w, double lambda, double r_minus, double r_plus);

// --- Shape detection: gamma = 100 on {u >= 0} within radius 0.7, 1 elsewhere.

inline constexpr double kShapeTau = 20.0;
inline constexpr double kShapeAlpha = 4.5;
inline constexpr double kShapeRadius = 0.7;
inline constexpr double kShapeContrast = 100.0;

ConductivityField shape_from_field(const RealGrid& level_field, double radius = kShapeRadius,
                                   double inclusion_value = kShapeContrast);
ConductivityField sample_shape(std::uint64_t seed, int n);

// --- Three phase inclusions.

struct ThreePhaseParams {
  double tau, alpha, radius, c1, c2;
};

/// Draw order from Rng(derive_seed(seed, {kParamStream})): tau ~ U[12,18],
/// alpha ~ U[4,5], r ~ U[0.65,0.9], c1 ~ U[2,10], c2 ~ U[0.1,0.5].
ThreePhaseParams draw_three_phase_params(std::uint64_t seed);
ConductivityField three_phase_from_fields(const RealGrid& u1, const RealGrid& u2, const ThreePhaseParams& p);
ConductivityField sample_three_phase(std::uint64_t seed, int n);

// --- Lognormal.

struct LognormalParams {
  double tau, alpha, r_minus, r_plus, lambda;
};

/// Draw order: tau ~ U[7,9], alpha ~ U[3,4], r_- ~ U[0.50,0.55],
/// r_+ ~ U[0.85,0.95], lambda ~ U[7.5,8.5].
LognormalParams draw_lognormal_params(std::uint64_t seed);
ConductivityField lognormal_from_field(const RealGrid& u, const LognormalParams& p);
ConductivityField sample_lognormal(std::uint64_t seed, int n);

// --- Deterministic heart-and-lungs phantoms.

struct Ellipse {
  double cx, cy;
  double semi_x, semi_y;
  double rotation_deg;
  double value;

  bool contains(double x, double y) const;
  double area() const { return kPi * semi_x * semi_y; }
};

struct PhantomSpec {
  std::vector<Ellipse> ellipses;
  double background = 1.0;
  double support_radius = 0.7;
};

enum class PhantomKind { ShapeContrast, Realistic };

/// Heart (0.1, 0.35) semi-axes (0.18, 0.25); lungs at (+-0.35, -0.05),
/// semi-axes (0.22, 0.42), rotated -+25 degrees. Realistic values are
/// 6.3 (heart) and 0.4 (lungs); the shape-contrast variant uses 100 for all.
PhantomSpec default_phantom_spec(PhantomKind kind);
ConductivityField phantom(const PhantomSpec& spec, int n);
ConductivityField phantom(PhantomKind kind, int n);

/// Stream tags used below a sample seed.
inline constexpr std::uint64_t kParamStream = 1;
inline constexpr std::uint64_t kGrfStream = 2;

}  // namespace eit
