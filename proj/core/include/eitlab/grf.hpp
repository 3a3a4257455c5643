#pragma once

// Mean-zero Gaussian random fields on (-1,1)^2 with covariance
// (tau/2)^(2 alpha - 2) (-Laplacian + (tau/2)^2)^(-alpha), Neumann boundary
// conditions, sampled through the cosine eigenbasis.
//
// Grid convention (shared with the conductivity module): an N x N grid of
// cell centers, column c at x = -1 + (2c+1)/N and row r at y = -1 + (2r+1)/N.

#include <cstdint>
#include <vector>

#include "eitlab/types.hpp"

namespace eit {

struct GrfSpec {
  double tau = 20.0;
  double alpha = 4.5;
  int grid_size = 64;
  /// Retained wavenumbers per dimension are 0 .. mode_cutoff-1.
  int mode_cutoff = 64;

  void validate() const;
};

/// Eigenvalue for wavenumber pair (k, l); zero for (0, 0).
double covariance_coeff(int k, int l, const GrfSpec& spec);

/// Sum of retained eigenvalues, i.e. E ||u||^2_{L2((-1,1)^2)} of the truncated field.
double covariance_trace(const GrfSpec& spec);

/// L2-orthonormal Neumann cosine function on (-1,1):
/// 1/sqrt(2) for k = 0, cos(k pi (x+1)/2) otherwise.
double cosine_mode(int k, double x);

/// Cell-center coordinates of an N-point grid on (-1,1).
std::vector<double> cell_centers(int n);

/// Evaluates sum_{k,l} coeffs(k,l) e_k(y) e_l(x) on the grid; coeffs(k,l)
/// pairs row wavenumber k (y) with column wavenumber l (x).
RealGrid synthesize_cosine_series(const RealGrid& coeffs, int grid_size);

/// Midpoint-rule projection onto e_k(y) e_l(x) for k, l < modes; exact inverse of
/// synthesize_cosine_series for modes <= grid size.
RealGrid project_cosine_series(const RealGrid& field, int modes);

/// u = sum_{(k,l) != (0,0)} sqrt(c_kl) zeta_kl e_kl with zeta_kl i.i.d. N(0,1).
///
/// zeta_kl is drawn from CounterRng(seed) at counter k * mode_cutoff + l, so
/// each coefficient is a pure function of (seed, k, l).
RealGrid sample_grf(const GrfSpec& spec, std::uint64_t seed);

}  // namespace eit
