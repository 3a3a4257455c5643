#pragma once

#include <cstdint>
#include <string>

#include "eitlab/boundary_spectral.hpp"

namespace eit {

enum class NoiseLaw { Gaussian, UniformBounded };

NoiseLaw parse_noise_law(const std::string& name);
std::string to_string(NoiseLaw law);

struct NoiseSpec {
  double delta = 0.0;
  NoiseLaw law = NoiseLaw::Gaussian;
  double alpha = 1.5;
  double tau = 10.0;
  int grid_size = 32;

  void validate() const;
};

/// Random real field on the n x n torus grid.
struct NoiseField {
  RealGrid values;
};

/// tau^(2 alpha - 2) (4 pi^2 (i^2 + j^2) + tau^2)^(-alpha), zero at (0,0).
double noise_coeff(int i, int j, const NoiseSpec& spec);

/// Sum of noise_coeff over the retained index set; equals E ||xi||^2_{L2(T^2)}.
double noise_coeff_sum(const NoiseSpec& spec);

/// xi = Re sum_{(i,j)} sqrt(c_ij) zeta_ij phi_i(theta) phi_j(theta') over
/// i, j in {-n/2+1, ..., n/2}, (i,j) != (0,0). Real and imaginary parts of
/// zeta_ij are i.i.d. N(0,1) (Gaussian law) or U[-sqrt3, sqrt3] (uniform law),
/// drawn from CounterRng(seed) at counters 2m and 2m+1 for flat index m.
NoiseField sample_noise_field(const NoiseSpec& spec, std::uint64_t seed);

/// kappa + delta ||kappa||_{L2} xi. delta == 0 returns the input unchanged.
KernelGrid perturb_kernel(const KernelGrid& kappa, const NoiseSpec& spec, std::uint64_t seed);

}  // namespace eit
