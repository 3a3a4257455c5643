#include "eitlab/forward.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>

namespace eit {

// ---------------------------------------------------------------------------
// Mesh

Eigen::Vector2d DiskMesh::centroid(std::size_t t) const {
  const auto& tri = triangles[t];
  return (nodes[tri[0]] + nodes[tri[1]] + nodes[tri[2]]) / 3.0;
}

double DiskMesh::signed_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Eigen::Vector2d a = nodes[tri[1]] - nodes[tri[0]];
  const Eigen::Vector2d b = nodes[tri[2]] - nodes[tri[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

DiskMesh build_mesh(int rings) {
  if (rings < 1) throw std::invalid_argument("build_mesh: ring count must be >= 1");
  DiskMesh mesh;
  mesh.rings = rings;
  mesh.nodes.reserve(1 + 3 * rings * (rings + 1));
  mesh.nodes.emplace_back(0.0, 0.0);

  // First node id of each ring; ring 0 is the center.
  std::vector<int> first(rings + 1);
  first[0] = 0;
  for (int r = 1; r <= rings; ++r) {
    first[r] = static_cast<int>(mesh.nodes.size());
    const int count = 6 * r;
    const double radius = static_cast<double>(r) / rings;
    for (int i = 0; i < count; ++i) {
      const double th = kTwoPi * i / count;
      mesh.nodes.emplace_back(radius * std::cos(th), radius * std::sin(th));
    }
  }
  auto node = [&](int r, int i) {
    if (r == 0) return 0;
    const int count = 6 * r;
    return first[r] + ((i % count) + count) % count;
  };

  mesh.triangles.reserve(6 * rings * rings);
  for (int r = 1; r <= rings; ++r) {
    for (int s = 0; s < 6; ++s) {
      // Per sector: r triangles with an outer edge, r-1 with an inner edge.
      for (int t = 0; t < r; ++t) {
        mesh.triangles.push_back({node(r - 1, s * (r - 1) + t), node(r, s * r + t), node(r, s * r + t + 1)});
      }
      for (int t = 0; t + 1 < r; ++t) {
        mesh.triangles.push_back(
            {node(r - 1, s * (r - 1) + t), node(r, s * r + t + 1), node(r - 1, s * (r - 1) + t + 1)});
      }
    }
  }
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (mesh.signed_area(t) < 0.0) std::swap(mesh.triangles[t][1], mesh.triangles[t][2]);
  }

  const int nb = 6 * rings;
  mesh.boundary_nodes.resize(nb);
  mesh.boundary_angles.resize(nb);
  for (int i = 0; i < nb; ++i) {
    mesh.boundary_nodes[i] = first[rings] + i;
    mesh.boundary_angles[i] = kTwoPi * i / nb;
  }
  return mesh;
}

std::vector<double> element_conductivity(const DiskMesh& mesh, const ConductivityField& gamma) {
  std::vector<double> out(mesh.triangles.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    const Eigen::Vector2d c = mesh.centroid(t);
    out[t] = gamma.at_point(c.x(), c.y());
  }
  return out;
}

std::vector<double> element_conductivity(const DiskMesh& mesh,
                                         const std::function<double(double, double)>& gamma) {
  std::vector<double> out(mesh.triangles.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    const Eigen::Vector2d c = mesh.centroid(t);
    out[t] = gamma(c.x(), c.y());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Solver

namespace {

// Boundary quadrature weights (theta_{i+1} - theta_{i-1}) / 2 on the periodic angle grid.
std::vector<double> trapezoid_weights(const std::vector<double>& angles) {
  const std::size_t n = angles.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    double next = angles[(i + 1) % n];
    double prev = angles[(i + n - 1) % n];
    if (i + 1 == n) next += kTwoPi;
    if (i == 0) prev -= kTwoPi;
    w[i] = 0.5 * (next - prev);
  }
  return w;
}

// Six-point Gauss-Legendre rule on [0, 1].
constexpr std::array<double, 6> kGaussX = {0.033765242898423986, 0.16939530676686774, 0.38069040695840156,
                                           0.6193095930415985,   0.8306046932331323,  0.966234757101576};
constexpr std::array<double, 6> kGaussW = {0.08566224618958517, 0.1803807865240693, 0.2339569672863455,
                                           0.2339569672863455,  0.1803807865240693, 0.08566224618958517};

// Consistent load b_i = int g hat_i d(theta) along the unit circle, hat_i
// piecewise linear in angle between neighbouring boundary nodes.
template <class Fn>
auto arc_load(const DiskMesh& mesh, Fn&& g) {
  using Scalar = decltype(g(0.0));
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> load =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(static_cast<Eigen::Index>(mesh.nodes.size()));
  const std::size_t nb = mesh.boundary_nodes.size();
  for (std::size_t i = 0; i < nb; ++i) {
    const double a = mesh.boundary_angles[i];
    double b = mesh.boundary_angles[(i + 1) % nb];
    if (i + 1 == nb) b += kTwoPi;
    const double len = b - a;
    for (std::size_t q = 0; q < kGaussX.size(); ++q) {
      const double s = kGaussX[q];
      const Scalar gv = g(a + s * len) * (kGaussW[q] * len);
      load[mesh.boundary_nodes[i]] += gv * (1.0 - s);
      load[mesh.boundary_nodes[(i + 1) % nb]] += gv * s;
    }
  }
  return load;
}

}  // namespace

Eigen::VectorXcd NeumannSolution::trace(const DiskMesh& mesh) const {
  Eigen::VectorXcd out(mesh.boundary_nodes.size());
  for (std::size_t i = 0; i < mesh.boundary_nodes.size(); ++i) out[i] = values[mesh.boundary_nodes[i]];
  return out;
}

struct NeumannSolver::Impl {
  Eigen::SparseMatrix<double> reduced;
  Eigen::DiagonalPreconditioner<double> preconditioner;
  std::vector<double> boundary_weights;
};

NeumannSolver::NeumannSolver(const DiskMesh& mesh, std::vector<double> element_gamma, SolverOptions options)
    : mesh_(&mesh), impl_(std::make_unique<Impl>()), options_(options) {
  if (element_gamma.size() != mesh.triangles.size()) {
    throw std::invalid_argument("NeumannSolver: one conductivity value per triangle required");
  }
  const int n = static_cast<int>(mesh.nodes.size());
  std::vector<Eigen::Triplet<double>> full_trip;
  std::vector<Eigen::Triplet<double>> reduced_trip;
  full_trip.reserve(mesh.triangles.size() * 9);
  reduced_trip.reserve(mesh.triangles.size() * 9);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double g = element_gamma[t];
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("NeumannSolver: conductivity must be finite and positive");
    }
    const auto& tri = mesh.triangles[t];
    const double area = mesh.signed_area(t);
    // grad hat_i = perp(opposite edge) / (2 area)
    std::array<Eigen::Vector2d, 3> grad;
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d& p1 = mesh.nodes[tri[(i + 1) % 3]];
      const Eigen::Vector2d& p2 = mesh.nodes[tri[(i + 2) % 3]];
      grad[i] = Eigen::Vector2d(p1.y() - p2.y(), p2.x() - p1.x()) / (2.0 * area);
    }
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) {
        const double v = g * area * grad[i].dot(grad[k]);
        full_trip.emplace_back(tri[i], tri[k], v);
        // Pin node 0 (the center): drop its row and column.
        if (tri[i] != 0 && tri[k] != 0) reduced_trip.emplace_back(tri[i] - 1, tri[k] - 1, v);
      }
    }
  }
  full_.resize(n, n);
  full_.setFromTriplets(full_trip.begin(), full_trip.end());
  impl_->reduced.resize(n - 1, n - 1);
  impl_->reduced.setFromTriplets(reduced_trip.begin(), reduced_trip.end());
  impl_->preconditioner.compute(impl_->reduced);
  impl_->boundary_weights = trapezoid_weights(mesh.boundary_angles);
}

NeumannSolver::~NeumannSolver() = default;
NeumannSolver::NeumannSolver(NeumannSolver&&) noexcept = default;
NeumannSolver& NeumannSolver::operator=(NeumannSolver&&) noexcept = default;

Eigen::VectorXcd NeumannSolver::boundary_load(const BoundaryCoefficients& g) const {
  const double norm = 1.0 / std::sqrt(kTwoPi);
  return arc_load(*mesh_, [&](double th) {
    Complex s = 0.0;
    for (int j : g.index_set().indices()) {
      const Complex c = g[j];
      if (c != Complex{0.0}) s += c * std::polar(norm, j * th);
    }
    return s;
  });
}

Eigen::VectorXd NeumannSolver::solve_real(const Eigen::VectorXd& load, double* residual, int* iterations) const {
  const auto& mesh = *mesh_;
  const Eigen::Index n = static_cast<Eigen::Index>(mesh.nodes.size());
  if (load.size() != n) throw std::invalid_argument("solve_real: load size mismatch");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  if (load.tail(n - 1).squaredNorm() > 0.0) {
    // Eigen's solver object caches per-solve state; the free function keeps
    // concurrent solves independent.
    const Eigen::VectorXd rhs = load.tail(n - 1);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n - 1);
    Eigen::Index iters = static_cast<Eigen::Index>(options_.max_iteration_factor) * (n - 1);
    double err = options_.relative_tolerance;
    Eigen::internal::conjugate_gradient(impl_->reduced, rhs, x, impl_->preconditioner, iters, err);
    if (!(err <= options_.relative_tolerance)) {
      std::ostringstream msg;
      msg << "Neumann solve did not converge: relative residual " << err << " after " << iters << " iterations";
      throw NumericalError(msg.str());
    }
    u.tail(n - 1) = x;
    if (residual) *residual = err;
    if (iterations) *iterations = static_cast<int>(iters);
  } else {
    if (residual) *residual = 0.0;
    if (iterations) *iterations = 0;
  }
  // Gauge: zero mean of the boundary trace.
  double mean = 0.0;
  double wsum = 0.0;
  for (std::size_t i = 0; i < mesh.boundary_nodes.size(); ++i) {
    mean += impl_->boundary_weights[i] * u[mesh.boundary_nodes[i]];
    wsum += impl_->boundary_weights[i];
  }
  u.array() -= mean / wsum;
  return u;
}

NeumannSolution NeumannSolver::solve(const BoundaryCoefficients& g) const {
  const Eigen::VectorXcd load = boundary_load(g);
  NeumannSolution sol;
  double res_re = 0.0, res_im = 0.0;
  int it_re = 0, it_im = 0;
  const Eigen::VectorXd re = solve_real(load.real(), &res_re, &it_re);
  const Eigen::VectorXd im = solve_real(load.imag(), &res_im, &it_im);
  sol.values = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
  sol.residual = std::max(res_re, res_im);
  sol.iterations = it_re + it_im;
  return sol;
}

NeumannSolution solve_neumann(const DiskMesh& mesh, const ConductivityField& gamma,
                              const BoundaryCoefficients& g) {
  const NeumannSolver solver(mesh, element_conductivity(mesh, gamma));
  return solver.solve(g);
}

BoundaryCoefficients analyze_trace(const DiskMesh& mesh, const Eigen::VectorXcd& trace, int grid_size,
                                   int cutoff) {
  BoundaryCoefficients out(grid_size);
  const auto w = trapezoid_weights(mesh.boundary_angles);
  const double norm = 1.0 / std::sqrt(kTwoPi);
  for (int j : out.index_set().indices()) {
    if (std::abs(j) > cutoff) continue;
    Complex s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      s += w[i] * trace[static_cast<Eigen::Index>(i)] * std::polar(norm, -j * mesh.boundary_angles[i]);
    }
    out[j] = s;
  }
  return out;
}

NtDMatrix assemble_ntd(const NeumannSolver& solver, int mode_cutoff, int grid_size) {
  if (mode_cutoff < 1 || mode_cutoff > grid_size / 2) {
    throw std::invalid_argument("assemble_ntd: mode cutoff must lie in [1, n/2]");
  }
  const DiskMesh& mesh = solver.mesh();
  const FourierIndexSet idx(grid_size);
  NtDMatrix m(grid_size);
  const double norm = 1.0 / std::sqrt(kTwoPi);
  const Complex i_unit(0.0, 1.0);

  // phi_{+-k} = (cos k th +- i sin k th) / sqrt(2 pi): two real solves per k.
  std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> traces(mode_cutoff);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int k = 1; k <= mode_cutoff; ++k) {
    try {
      const Eigen::VectorXd uc = solver.solve_real(arc_load(mesh, [k](double th) { return std::cos(k * th); }));
      const Eigen::VectorXd us = solver.solve_real(arc_load(mesh, [k](double th) { return std::sin(k * th); }));
      const std::size_t nb = mesh.boundary_nodes.size();
      Eigen::VectorXcd tc(nb), ts(nb);
      for (std::size_t i = 0; i < nb; ++i) {
        tc[i] = uc[mesh.boundary_nodes[i]];
        ts[i] = us[mesh.boundary_nodes[i]];
      }
      traces[k - 1] = {std::move(tc), std::move(ts)};
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (int k = 1; k <= mode_cutoff; ++k) {
    const auto& [tc, ts] = traces[k - 1];
    for (int sign : {+1, -1}) {
      const int kk = sign * k;
      if (!idx.contains(kk)) continue;
      const Eigen::VectorXcd trace = norm * (tc + (sign * 1.0) * i_unit * ts);
      const BoundaryCoefficients col = analyze_trace(mesh, trace, grid_size, mode_cutoff);
      for (int j : idx.indices()) {
        if (std::abs(j) <= mode_cutoff) m(j, kk) = col[j];
      }
    }
  }
  return symmetrize_reality(m).matrix;
}

NtDMatrix assemble_ntd(const DiskMesh& mesh, std::vector<double> element_gamma, int mode_cutoff,
                       int grid_size) {
  const NeumannSolver solver(mesh, std::move(element_gamma));
  return assemble_ntd(solver, mode_cutoff, grid_size);
}

NtDMatrix assemble_ntd(const DiskMesh& mesh, const ConductivityField& gamma, int mode_cutoff, int grid_size) {
  return assemble_ntd(mesh, element_conductivity(mesh, gamma), mode_cutoff, grid_size);
}

double radial_ntd_oracle(double c, double rho, int nmode) {
  if (!(c > 0.0) || !(rho > 0.0 && rho < 1.0) || nmode < 1) {
    throw std::invalid_argument("radial_ntd_oracle: need c > 0, 0 < rho < 1, n >= 1");
  }
  const double mu = (c - 1.0) / (c + 1.0);
  const double q = mu * std::pow(rho, 2.0 * nmode);
  return (1.0 - q) / (1.0 + q) / nmode;
}

}  // namespace eit
