#pragma once

// Local coordinates for functions on the torus T^2 = dOmega x dOmega:
// an atlas of circular arcs with affine charts onto a subinterval of (0,1),
// a smooth partition of unity, and the global-to-local (pullback) and
// local-to-global (weighted push-forward) maps. L(G(h)) = h up to
// interpolation error.

#include <vector>

#include "eitlab/boundary_spectral.hpp"

namespace eit {

/// Arc (center - half_width, center + half_width) mapped affinely onto (lo, hi).
struct Chart {
  double center = 0.0;
  double half_width = kPi;
  double lo = 0.1;
  double hi = 0.9;

  /// Signed angular offset from the center, wrapped to (-pi, pi].
  double offset(double theta) const;
  bool contains(double theta) const;
  double to_local(double theta) const;
  double to_angle(double x) const;
  /// Lipschitz constants of the chart map and its inverse.
  double lipschitz() const { return (hi - lo) / (2.0 * half_width); }
  double inverse_lipschitz() const { return (2.0 * half_width) / (hi - lo); }
};

class Atlas {
 public:
  /// bump_half_width: support half-width of each bump, strictly inside the arc.
  Atlas(std::vector<Chart> charts, double bump_half_width);

  const std::vector<Chart>& charts() const { return charts_; }
  int size() const { return static_cast<int>(charts_.size()); }
  double bump_half_width() const { return bump_half_width_; }

  /// psi_j(theta); the family sums to one everywhere.
  double partition(int j, double theta) const;

 private:
  double raw_bump(int j, double theta) const;

  std::vector<Chart> charts_;
  double bump_half_width_;
};

/// chart_count equally spaced arcs of half-width pi/J + overlap; the default
/// overlap gives the two arcs (-2pi/3 - 0.2, 2pi/3 + 0.2) and its antipode.
/// Bumps exp(-1/(1-s^2)) have half-width pi/J + overlap/2.
Atlas build_atlas(int chart_count = 2, double overlap = kPi / 6.0 + 0.2);

/// chart_count^2 local grids of resolution x resolution on (0,1)^2, cell
/// centered; component (j,k) is zero outside W_j x W_k.
struct PatchStack {
  int chart_count = 0;
  int resolution = 0;
  std::vector<RealGrid> components;

  RealGrid& at(int j, int k) { return components[static_cast<std::size_t>(j) * chart_count + k]; }
  const RealGrid& at(int j, int k) const { return components[static_cast<std::size_t>(j) * chart_count + k]; }
  double norm() const;
};

/// Periodic cubic-convolution (Keys, a = -1/2) interpolation on the torus grid.
double interpolate_periodic(const RealGrid& grid, double theta, double theta_prime);

/// Cubic-convolution interpolation on the local cell-centered grid of (0,1)^2,
/// samples beyond the grid read as zero.
double interpolate_local(const RealGrid& grid, double x, double y);

/// Component (j,k)(x,y) = h(chart_j^-1(x), chart_k^-1(y)) on W_j x W_k, else 0.
/// resolution 0 uses the kernel grid size.
PatchStack global_to_local(const KernelGrid& h, const Atlas& atlas, int resolution = 0);

/// L(f)(theta, theta') = sum_{j,k} psi_j(theta) psi_k(theta') f_jk(chart_j(theta), chart_k(theta')).
/// grid_size 0 uses the stack resolution.
KernelGrid local_to_global(const PatchStack& stack, const Atlas& atlas, int grid_size = 0);

}  // namespace eit
