#include "eitlab/grf.hpp"

#include <cmath>
#include <stdexcept>

#include "eitlab/rng.hpp"

namespace eit {

void GrfSpec::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("GrfSpec: tau must be positive");
  if (!(alpha > 1.0)) throw std::invalid_argument("GrfSpec: alpha must exceed 1");
  if (grid_size < 1) throw std::invalid_argument("GrfSpec: grid_size must be positive");
  if (mode_cutoff < 1 || mode_cutoff > grid_size) {
    throw std::invalid_argument("GrfSpec: mode_cutoff must lie in [1, grid_size]");
  }
}

double covariance_coeff(int k, int l, const GrfSpec& spec) {
  if (k < 0 || l < 0) throw std::invalid_argument("covariance_coeff: wavenumbers must be >= 0");
  if (k == 0 && l == 0) return 0.0;
  const double half_tau = 0.5 * spec.tau;
  // integer k^2 + l^2 keeps the result symmetric under FMA contraction
  const double laplace = 0.25 * kPi * kPi * static_cast<double>(k * k + l * l);
  return std::pow(half_tau, 2.0 * spec.alpha - 2.0) * std::pow(laplace + half_tau * half_tau, -spec.alpha);
}

double covariance_trace(const GrfSpec& spec) {
  double sum = 0.0;
  for (int k = 0; k < spec.mode_cutoff; ++k) {
    for (int l = 0; l < spec.mode_cutoff; ++l) sum += covariance_coeff(k, l, spec);
  }
  return sum;
}

double cosine_mode(int k, double x) {
  if (k == 0) return 1.0 / std::sqrt(2.0);
  return std::cos(0.5 * kPi * k * (x + 1.0));
}

std::vector<double> cell_centers(int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = -1.0 + (2.0 * i + 1.0) / n;
  return x;
}

namespace {

// basis(i, k) = e_k(x_i)
Eigen::MatrixXd basis_matrix(int grid_size, int modes) {
  const auto x = cell_centers(grid_size);
  Eigen::MatrixXd e(grid_size, modes);
  for (int i = 0; i < grid_size; ++i) {
    for (int k = 0; k < modes; ++k) e(i, k) = cosine_mode(k, x[i]);
  }
  return e;
}

}  // namespace

RealGrid synthesize_cosine_series(const RealGrid& coeffs, int grid_size) {
  if (coeffs.rows() != coeffs.cols()) throw std::invalid_argument("cosine series: square coefficients required");
  const Eigen::MatrixXd e = basis_matrix(grid_size, static_cast<int>(coeffs.rows()));
  return e * coeffs * e.transpose();
}

RealGrid project_cosine_series(const RealGrid& field, int modes) {
  if (field.rows() != field.cols()) throw std::invalid_argument("cosine projection: square field required");
  const int n = static_cast<int>(field.rows());
  const Eigen::MatrixXd e = basis_matrix(n, modes);
  const double w = 2.0 / n;  // midpoint weight per dimension
  return (w * w) * (e.transpose() * field * e);
}

RealGrid sample_grf(const GrfSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int m = spec.mode_cutoff;
  const CounterRng rng(seed);
  RealGrid coeffs(m, m);
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) {
      const std::uint64_t counter = static_cast<std::uint64_t>(k) * m + l;
      coeffs(k, l) = std::sqrt(covariance_coeff(k, l, spec)) * rng.normal(counter);
    }
  }
  return synthesize_cosine_series(coeffs, spec.grid_size);
}

}  // namespace eit
