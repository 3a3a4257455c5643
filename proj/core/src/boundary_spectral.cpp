#include "eitlab/boundary_spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "eitlab/fft.hpp"

namespace eit {
namespace {

int wrap_index(int j, int n) { return ((j % n) + n) % n; }

void require_even(int n) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("boundary grid size must be even and >= 2, got " + std::to_string(n));
  }
}

Eigen::MatrixXcd flip_conj(const NtDMatrix& m) {
  const auto& idx = m.index_set();
  const int size = idx.size();
  Eigen::MatrixXcd out(size, size);
  for (int p = 0; p < size; ++p) {
    const int mp = idx.position(idx.mirror(idx.indices()[p]));
    for (int q = 0; q < size; ++q) {
      const int mq = idx.position(idx.mirror(idx.indices()[q]));
      out(p, q) = std::conj(m.values()(mp, mq));
    }
  }
  return out;
}

}  // namespace

FourierIndexSet::FourierIndexSet(int n) : n_(n) {
  require_even(n);
  indices_.reserve(n - 1);
  for (int j = -n / 2 + 1; j <= n / 2; ++j) {
    if (j != 0) indices_.push_back(j);
  }
}

int FourierIndexSet::position(int j) const {
  if (!contains(j)) {
    throw std::out_of_range("mode " + std::to_string(j) + " not in J_" + std::to_string(n_));
  }
  // j in [-n/2+1, -1] -> [0, n/2-2]; j in [1, n/2] -> [n/2-1, n-2].
  return j < 0 ? j + n_ / 2 - 1 : j + n_ / 2 - 2;
}

BoundaryCoefficients::BoundaryCoefficients(int n) : index_(n), entries_(n - 1, Complex{0.0}) {}

BoundaryCoefficients BoundaryCoefficients::mode(int n, int j, Complex value) {
  BoundaryCoefficients c(n);
  c[j] = value;
  return c;
}

double BoundaryCoefficients::reality_residual() const {
  double worst = 0.0;
  for (int j : index_.indices()) {
    worst = std::max(worst, std::abs((*this)[j] - std::conj((*this)[index_.mirror(j)])));
  }
  return worst;
}

BoundaryCoefficients fourier_analyze(std::span<const Complex> samples) {
  const int n = static_cast<int>(samples.size());
  require_even(n);
  std::vector<Complex> buf(samples.begin(), samples.end());
  fft::dft(buf, fft::Direction::Forward);
  BoundaryCoefficients out(n);
  const double scale = std::sqrt(kTwoPi) / n;
  for (int j : out.index_set().indices()) out[j] = scale * buf[wrap_index(j, n)];
  return out;
}

BoundaryCoefficients fourier_analyze(std::span<const double> samples) {
  std::vector<Complex> buf(samples.begin(), samples.end());
  return fourier_analyze(std::span<const Complex>(buf));
}

std::vector<Complex> fourier_synthesize(const BoundaryCoefficients& coeffs) {
  const int n = coeffs.grid_size();
  std::vector<Complex> buf(n, Complex{0.0});
  for (int j : coeffs.index_set().indices()) buf[wrap_index(j, n)] = coeffs[j];
  fft::dft(buf, fft::Direction::Inverse);
  const double scale = 1.0 / std::sqrt(kTwoPi);
  for (auto& v : buf) v *= scale;
  return buf;
}

double sobolev_norm(const BoundaryCoefficients& h, double s) {
  double sum = 0.0;
  for (int j : h.index_set().indices()) {
    sum += std::pow(1.0 + double(j) * j, s) * std::norm(h[j]);
  }
  return std::sqrt(sum);
}

BoundaryCoefficients apply_C_power(const BoundaryCoefficients& h, double r) {
  if (r < 0.0) throw std::invalid_argument("apply_C_power: r must be nonnegative");
  BoundaryCoefficients out = h;
  for (int j : h.index_set().indices()) out[j] *= std::pow(1.0 + double(j) * j, -0.5 * r);
  return out;
}

NtDMatrix::NtDMatrix(int n) : index_(n), m_(Eigen::MatrixXcd::Zero(n - 1, n - 1)) {}

NtDMatrix::NtDMatrix(int n, Eigen::MatrixXcd values) : index_(n), m_(std::move(values)) {
  if (m_.rows() != n - 1 || m_.cols() != n - 1) {
    throw std::invalid_argument("NtDMatrix: values must be (n-1) x (n-1)");
  }
}

double NtDMatrix::hermitian_residual() const {
  const double norm = m_.norm();
  if (norm == 0.0) return 0.0;
  return (m_ - m_.adjoint()).norm() / norm;
}

double NtDMatrix::reality_residual() const {
  const double norm = m_.norm();
  if (norm == 0.0) return 0.0;
  return (m_ - flip_conj(*this)).norm() / norm;
}

NtDMatrix project_matrix(const NtDMatrix& m, int J, int K) {
  const int half = m.grid_size() / 2;
  if (J < 1 || J > half || K < 1 || K > half) {
    throw std::invalid_argument("project_matrix: cutoffs must lie in [1, n/2]");
  }
  NtDMatrix out = m;
  const auto& idx = m.index_set().indices();
  for (std::size_t p = 0; p < idx.size(); ++p) {
    for (std::size_t q = 0; q < idx.size(); ++q) {
      if (std::abs(idx[p]) > J || std::abs(idx[q]) > K) out.values()(p, q) = 0.0;
    }
  }
  return out;
}

Symmetrized symmetrize_reality(const NtDMatrix& m) {
  const double violation = m.reality_residual();
  NtDMatrix out(m.grid_size(), 0.5 * (m.values() + flip_conj(m)));
  return {std::move(out), violation};
}

double weighted_hs_norm(const NtDMatrix& m, double s, double t) {
  const auto& idx = m.index_set().indices();
  double sum = 0.0;
  for (std::size_t p = 0; p < idx.size(); ++p) {
    const double wj = std::pow(1.0 + double(idx[p]) * idx[p], t);
    for (std::size_t q = 0; q < idx.size(); ++q) {
      const double wk = std::pow(1.0 + double(idx[q]) * idx[q], -s);
      sum += wj * wk * std::norm(m.values()(p, q));
    }
  }
  return std::sqrt(sum);
}

double torus_l2_norm(const RealGrid& values) {
  const double h = kTwoPi / static_cast<double>(values.rows());
  const double hc = kTwoPi / static_cast<double>(values.cols());
  return std::sqrt(values.squaredNorm() * h * hc);
}

double KernelGrid::l2_norm() const { return torus_l2_norm(values); }

KernelSynthesis synthesize_kernel(const NtDMatrix& m, double reality_tolerance) {
  const double violation = m.reality_residual();
  if (violation > reality_tolerance) {
    throw std::domain_error("kernel synthesis: reality residual " + std::to_string(violation) +
                            " exceeds tolerance; symmetrize the matrix first");
  }
  const int n = m.grid_size();
  std::vector<Complex> buf(static_cast<std::size_t>(n) * n, Complex{0.0});
  const auto& idx = m.index_set().indices();
  for (std::size_t p = 0; p < idx.size(); ++p) {
    const int row = wrap_index(idx[p], n);
    for (std::size_t q = 0; q < idx.size(); ++q) {
      const int col = wrap_index(-idx[q], n);
      buf[static_cast<std::size_t>(row) * n + col] += m.values()(p, q);
    }
  }
  fft::dft2(buf, n, n, fft::Direction::Inverse);
  KernelSynthesis out{{RealGrid(n, n)}, 0.0};
  const double scale = 1.0 / kTwoPi;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Complex v = scale * buf[static_cast<std::size_t>(a) * n + b];
      out.kernel.values(a, b) = v.real();
      out.imaginary_residue = std::max(out.imaginary_residue, std::abs(v.imag()));
    }
  }
  return out;
}

KernelGrid kernel_from_matrix(const NtDMatrix& m, double reality_tolerance) {
  return synthesize_kernel(m, reality_tolerance).kernel;
}

NtDMatrix matrix_from_kernel(const KernelGrid& kernel) {
  const int n = kernel.size();
  std::vector<Complex> buf(kernel.values.data(), kernel.values.data() + std::size_t(n) * n);
  fft::dft2(buf, n, n, fft::Direction::Forward);
  NtDMatrix out(n);
  // kappa_ab = (1/2pi) sum m_jk e^{i j th_a} e^{-i k th_b}  =>  m_jk = (2pi/n^2) Khat(j, -k).
  const double scale = kTwoPi / (double(n) * n);
  const auto& idx = out.index_set().indices();
  for (std::size_t p = 0; p < idx.size(); ++p) {
    for (std::size_t q = 0; q < idx.size(); ++q) {
      const int row = wrap_index(idx[p], n);
      const int col = wrap_index(-idx[q], n);
      out.values()(p, q) = scale * buf[static_cast<std::size_t>(row) * n + col];
    }
  }
  return out;
}

}  // namespace eit
