#include "eitlab/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "eitlab/fft.hpp"
#include "eitlab/rng.hpp"

namespace eit {

NoiseLaw parse_noise_law(const std::string& name) {
  if (name == "gaussian") return NoiseLaw::Gaussian;
  if (name == "uniform" || name == "uniform-bounded") return NoiseLaw::UniformBounded;
  throw std::invalid_argument("unknown noise law: " + name);
}

std::string to_string(NoiseLaw law) { return law == NoiseLaw::Gaussian ? "gaussian" : "uniform"; }

void NoiseSpec::validate() const {
  if (!(delta >= 0.0)) throw std::invalid_argument("NoiseSpec: delta must be >= 0");
  if (!(alpha > 1.0)) throw std::invalid_argument("NoiseSpec: alpha must exceed 1");
  if (!(tau > 0.0)) throw std::invalid_argument("NoiseSpec: tau must be positive");
  if (grid_size < 2 || grid_size % 2 != 0) throw std::invalid_argument("NoiseSpec: grid size must be even");
}

double noise_coeff(int i, int j, const NoiseSpec& spec) {
  if (i == 0 && j == 0) return 0.0;
  const double r2 = double(i) * i + double(j) * j;
  return std::pow(spec.tau, 2.0 * spec.alpha - 2.0) *
         std::pow(4.0 * kPi * kPi * r2 + spec.tau * spec.tau, -spec.alpha);
}

double noise_coeff_sum(const NoiseSpec& spec) {
  const int n = spec.grid_size;
  double sum = 0.0;
  for (int i = -n / 2 + 1; i <= n / 2; ++i) {
    for (int j = -n / 2 + 1; j <= n / 2; ++j) sum += noise_coeff(i, j, spec);
  }
  return sum;
}

NoiseField sample_noise_field(const NoiseSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int n = spec.grid_size;
  const CounterRng rng(seed);
  const double sqrt3 = std::sqrt(3.0);
  auto draw = [&](std::uint64_t counter) {
    if (spec.law == NoiseLaw::Gaussian) return rng.normal(counter);
    return sqrt3 * (2.0 * rng.uniform(counter) - 1.0);
  };
  std::vector<Complex> buf(static_cast<std::size_t>(n) * n, Complex{0.0});
  for (int i = -n / 2 + 1; i <= n / 2; ++i) {
    for (int j = -n / 2 + 1; j <= n / 2; ++j) {
      const std::size_t row = static_cast<std::size_t>((i + n) % n);
      const std::size_t col = static_cast<std::size_t>((j + n) % n);
      const std::uint64_t m = row * n + col;
      const Complex zeta(draw(2 * m), draw(2 * m + 1));
      buf[row * n + col] = std::sqrt(noise_coeff(i, j, spec)) * zeta;
    }
  }
  fft::dft2(buf, n, n, fft::Direction::Inverse);
  NoiseField out{RealGrid(n, n)};
  // phi_i(theta) phi_j(theta') = exp(i (i theta + j theta')) / (2 pi)
  const double scale = 1.0 / kTwoPi;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) out.values(a, b) = scale * buf[static_cast<std::size_t>(a) * n + b].real();
  }
  return out;
}

KernelGrid perturb_kernel(const KernelGrid& kappa, const NoiseSpec& spec, std::uint64_t seed) {
  if (spec.delta == 0.0) return kappa;
  if (spec.grid_size != kappa.size()) throw std::invalid_argument("perturb_kernel: noise grid size mismatch");
  const NoiseField xi = sample_noise_field(spec, seed);
  KernelGrid out = kappa;
  out.values += (spec.delta * kappa.l2_norm()) * xi.values;
  return out;
}

}  // namespace eit
