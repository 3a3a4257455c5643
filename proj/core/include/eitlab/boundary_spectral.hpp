#pragma once

// Fourier analysis on the unit circle, identified with [0, 2 pi) periodic.
//
// Basis: phi_j(theta) = exp(i j theta) / sqrt(2 pi), j in J_n = {-n/2+1, ..., n/2} \ {0},
// where n is the (even) number of equispaced samples theta_a = 2 pi a / n.
// The constant mode is never represented, so every coefficient vector is
// mean-zero by construction.

#include <span>
#include <vector>

#include "eitlab/types.hpp"

namespace eit {

class FourierIndexSet {
 public:
  explicit FourierIndexSet(int n);

  int grid_size() const { return n_; }
  int size() const { return n_ - 1; }
  const std::vector<int>& indices() const { return indices_; }

  bool contains(int j) const { return j != 0 && j > -n_ / 2 && j <= n_ / 2; }
  /// Storage position of mode j; throws std::out_of_range when j is not in the set.
  int position(int j) const;
  /// Index whose basis function is the complex conjugate of phi_j on the grid:
  /// -j, except the Nyquist index n/2 which is its own mirror.
  int mirror(int j) const { return j == n_ / 2 ? j : -j; }

 private:
  int n_;
  std::vector<int> indices_;
};

class BoundaryCoefficients {
 public:
  explicit BoundaryCoefficients(int n);

  /// Coefficient vector with a single nonzero entry at mode j.
  static BoundaryCoefficients mode(int n, int j, Complex value = 1.0);

  const FourierIndexSet& index_set() const { return index_; }
  int grid_size() const { return index_.grid_size(); }

  Complex& operator[](int j) { return entries_[index_.position(j)]; }
  Complex operator[](int j) const { return entries_[index_.position(j)]; }

  std::span<Complex> entries() { return entries_; }
  std::span<const Complex> entries() const { return entries_; }

  /// max |c_j - conj(c_mirror(j))|; zero iff the synthesized function is real.
  double reality_residual() const;

 private:
  FourierIndexSet index_;
  std::vector<Complex> entries_;
};

/// Coefficients <phi_j, f> by the trapezoid rule on n equispaced samples.
BoundaryCoefficients fourier_analyze(std::span<const Complex> samples);
BoundaryCoefficients fourier_analyze(std::span<const double> samples);

/// Samples of sum_j c_j phi_j(theta_a), a = 0..n-1.
std::vector<Complex> fourier_synthesize(const BoundaryCoefficients& coeffs);

/// (sum_j (1 + j^2)^s |c_j|^2)^(1/2).
double sobolev_norm(const BoundaryCoefficients& h, double s);

/// Multiplies mode j by (1 + j^2)^(-r/2), i.e. applies C^(r/2) with
/// C = (I - Laplacian)^(-1) on mean-zero functions.
BoundaryCoefficients apply_C_power(const BoundaryCoefficients& h, double r);

/// Operator coefficients m(j, k) = <phi_j, R phi_k> over J_n x J_n.
class NtDMatrix {
 public:
  explicit NtDMatrix(int n);
  NtDMatrix(int n, Eigen::MatrixXcd values);

  const FourierIndexSet& index_set() const { return index_; }
  int grid_size() const { return index_.grid_size(); }

  Complex& operator()(int j, int k) { return m_(index_.position(j), index_.position(k)); }
  Complex operator()(int j, int k) const { return m_(index_.position(j), index_.position(k)); }

  const Eigen::MatrixXcd& values() const { return m_; }
  Eigen::MatrixXcd& values() { return m_; }

  double frobenius_norm() const { return m_.norm(); }
  /// ||M - M^H||_F / ||M||_F (0 for the zero matrix).
  double hermitian_residual() const;
  /// ||M - flip_conj(M)||_F / ||M||_F where flip_conj(M)(j,k) = conj(M(mirror j, mirror k)).
  double reality_residual() const;

 private:
  FourierIndexSet index_;
  Eigen::MatrixXcd m_;
};

/// Zeroes every entry with |j| > J or |k| > K. Requires 1 <= J, K <= n/2.
NtDMatrix project_matrix(const NtDMatrix& m, int J, int K);

struct Symmetrized {
  NtDMatrix matrix;
  /// Relative reality residual of the input.
  double violation;
};

/// m <- (m + flip_conj(m)) / 2, which makes the synthesized kernel real.
Symmetrized symmetrize_reality(const NtDMatrix& m);

/// (sum_{j,k} (1 + k^2)^(-s) (1 + j^2)^t |m(j,k)|^2)^(1/2).
double weighted_hs_norm(const NtDMatrix& m, double s, double t);

/// Samples kappa(theta_a, theta_b) on the uniform n x n torus grid.
struct KernelGrid {
  RealGrid values;

  int size() const { return static_cast<int>(values.rows()); }
  /// Discrete L2(T^2) norm with quadrature weight (2 pi / n)^2.
  double l2_norm() const;
};

/// Discrete L2(T^2) norm of an n x n torus grid.
double torus_l2_norm(const RealGrid& values);

struct KernelSynthesis {
  KernelGrid kernel;
  /// max |Im kappa| over the grid before the real part is taken.
  double imaginary_residue;
};

/// kappa(theta, theta') = sum_{j,k} m(j,k) phi_j(theta) conj(phi_k(theta')),
/// evaluated with a 2-D inverse transform. Throws std::domain_error when the
/// relative reality residual of m exceeds reality_tolerance; run
/// symmetrize_reality first for solver output.
KernelSynthesis synthesize_kernel(const NtDMatrix& m, double reality_tolerance = 1e-8);
KernelGrid kernel_from_matrix(const NtDMatrix& m, double reality_tolerance = 1e-8);

/// Inverse of kernel_from_matrix on band-limited grids: m(j,k) = <phi_j (x) conj(phi_k), kappa>.
NtDMatrix matrix_from_kernel(const KernelGrid& kernel);

}  // namespace eit
