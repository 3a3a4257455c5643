#pragma once

// P1 finite elements for -div(gamma grad u) = 0 in the unit disk with
// gamma du/dn = g on the boundary, and assembly of Neumann-to-Dirichlet
// matrices in the boundary Fourier basis.

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "eitlab/boundary_spectral.hpp"
#include "eitlab/conductivity.hpp"

namespace eit {

/// Concentric-ring triangulation: ring r (1..R) carries 6r nodes at radius r/R.
struct DiskMesh {
  int rings = 0;
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> triangles;
  /// Ring-R node ids in increasing angle, and their exact angles.
  std::vector<int> boundary_nodes;
  std::vector<double> boundary_angles;

  Eigen::Vector2d centroid(std::size_t t) const;
  double signed_area(std::size_t t) const;
};

/// node count 1 + 3R(R+1), triangle count 6R^2. Throws for R < 1.
DiskMesh build_mesh(int rings);

/// Piecewise-constant element conductivity from nearest-cell lookup at centroids.
std::vector<double> element_conductivity(const DiskMesh& mesh, const ConductivityField& gamma);
std::vector<double> element_conductivity(const DiskMesh& mesh,
                                         const std::function<double(double, double)>& gamma);

struct SolverOptions {
  double relative_tolerance = 1e-10;
  /// Iteration cap as a multiple of the number of unknowns.
  int max_iteration_factor = 10;
};

struct NeumannSolution {
  /// Nodal values; the boundary trace has zero (quadrature) mean.
  Eigen::VectorXcd values;
  double residual = 0.0;
  int iterations = 0;

  /// Values at mesh.boundary_nodes.
  Eigen::VectorXcd trace(const DiskMesh& mesh) const;
};

/// Stiffness matrix for fixed element conductivities, pinned at the center
/// node and factored once for repeated solves. Immutable after construction;
/// solve() is safe to call concurrently.
class NeumannSolver {
 public:
  NeumannSolver(const DiskMesh& mesh, std::vector<double> element_gamma, SolverOptions options = {});
  ~NeumannSolver();
  NeumannSolver(NeumannSolver&&) noexcept;
  NeumannSolver& operator=(NeumannSolver&&) noexcept;

  const DiskMesh& mesh() const { return *mesh_; }

  /// Consistent load b_i = int g hat_i ds for g = sum_j g_j phi_j along the unit circle.
  Eigen::VectorXcd boundary_load(const BoundaryCoefficients& g) const;

  /// Solves with a real load; throws NumericalError if CG fails to converge.
  Eigen::VectorXd solve_real(const Eigen::VectorXd& load, double* residual = nullptr,
                             int* iterations = nullptr) const;
  NeumannSolution solve(const BoundaryCoefficients& g) const;

  /// Full (unpinned) stiffness matrix, for diagnostics.
  const Eigen::SparseMatrix<double>& stiffness() const { return full_; }

 private:
  struct Impl;
  const DiskMesh* mesh_;
  Eigen::SparseMatrix<double> full_;
  std::unique_ptr<Impl> impl_;
  SolverOptions options_;
};

NeumannSolution solve_neumann(const DiskMesh& mesh, const ConductivityField& gamma,
                              const BoundaryCoefficients& g);

/// Trapezoid-rule coefficients <phi_j, trace> at the exact boundary node angles
/// for all j in J_n (entries beyond |j| > cutoff are left zero).
BoundaryCoefficients analyze_trace(const DiskMesh& mesh, const Eigen::VectorXcd& trace, int grid_size,
                                   int cutoff);

/// NtD matrix on J_n with entries (j,k), |j|,|k| <= mode_cutoff, filled from
/// solves with Neumann data phi_k; the result is reality-symmetrized.
/// Requires mode_cutoff <= grid_size / 2.
NtDMatrix assemble_ntd(const NeumannSolver& solver, int mode_cutoff, int grid_size);
NtDMatrix assemble_ntd(const DiskMesh& mesh, const ConductivityField& gamma, int mode_cutoff, int grid_size);
NtDMatrix assemble_ntd(const DiskMesh& mesh, std::vector<double> element_gamma, int mode_cutoff,
                       int grid_size);

/// Eigenvalue of the NtD map on mode n for conductivity c inside radius rho
/// and 1 outside: (1/n) (1 - mu rho^(2n)) / (1 + mu rho^(2n)), mu = (c-1)/(c+1).
double radial_ntd_oracle(double c, double rho, int nmode);

}  // namespace eit
