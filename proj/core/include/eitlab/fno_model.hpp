#pragma once

// Fourier neural operator mapping kernel grids on the torus to conductivity
// grids on (-1,1)^2 (same resolution), masked to the unit disk:
//
//   input channels -> zero pad -> pointwise affine lift -> L hidden layers
//   sigma(W h + K h + b) -> crop -> pointwise MLP (ReLU) -> disk mask.
//
// K is the truncated spectral convolution. Retained modes: k1 in
// {-(m-1)/2, ..., m/2} along rows (theta) and k2 in {0, ..., m-1} along
// columns (theta', half spectrum), one complex width x width matrix per
// (k1, k2) pair, m^2 matrices in total. Hidden layers use ReLU except the
// last, which is linear.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eitlab/types.hpp"

namespace eit {

struct FnoConfig {
  int layers = 2;
  int modes = 12;
  int width = 48;
  int mlp_width = 256;
  /// Append cos/sin of both torus angles to the kernel channel.
  bool grid_concat = true;
  /// Zero padding per spatial dimension is ceil(n * padding_fraction).
  double padding_fraction = 0.125;

  int input_channels() const { return grid_concat ? 5 : 1; }
  int padding(int n) const;
  /// Throws std::invalid_argument if inconsistent (optionally for grid size n).
  void validate(int n = 0) const;

  bool operator==(const FnoConfig&) const = default;
};

struct ParamTensor {
  std::string name;
  std::size_t offset;
  std::vector<std::size_t> shape;

  std::size_t size() const;
};

/// Named views into one flat parameter vector.
class ParamLayout {
 public:
  explicit ParamLayout(const FnoConfig& config);

  const std::vector<ParamTensor>& tensors() const { return tensors_; }
  const ParamTensor& tensor(const std::string& name) const;
  std::size_t total() const { return total_; }

 private:
  std::vector<ParamTensor> tensors_;
  std::size_t total_ = 0;
};

/// in*w + w + L (2 m^2 w^2 + w^2 + w) + mlp*w + mlp + mlp + 1.
std::size_t parameter_count(const FnoConfig& config);

struct FnoParams {
  FnoConfig config;
  std::vector<double> values;

  /// Zero parameters.
  explicit FnoParams(const FnoConfig& cfg);

  ParamLayout layout() const { return ParamLayout(config); }
  std::span<double> tensor(const std::string& name);
  std::span<const double> tensor(const std::string& name) const;
};

/// PyTorch-style uniform fan-in initialization; spectral weights are
/// U[0, 1/width^2) in real and imaginary parts.
FnoParams init_params(const FnoConfig& config, std::uint64_t seed);

/// Per-sample activations kept for the backward pass.
struct ForwardCache {
  int n = 0, padded = 0;
  RealGrid input;                    // in_ch x P^2
  std::vector<RealGrid> hidden;      // layer inputs, width x P^2 (hidden[L] is the last output)
  std::vector<RealGrid> pre_act;     // pre-activations per layer
  std::vector<RealGrid> spec_re, spec_im;  // transformed layer inputs, width x m^2
  RealGrid cropped;                  // width x n^2
  RealGrid mlp_pre;                  // mlp x n^2
  MaskGrid mask;
};

/// Evaluates the network on a standardized n x n kernel grid.
RealGrid fno_forward(const FnoParams& params, const RealGrid& kernel_std, ForwardCache* cache = nullptr);

/// Accumulates d(loss)/d(params) into grad given d(loss)/d(output) (n x n; masked cells only).
void fno_backward(const FnoParams& params, const ForwardCache& cache, const RealGrid& grad_output,
                  std::span<double> grad);

/// Precomputed transforms for the truncated spectral convolution on a P x P grid.
struct SpectralBasis {
  SpectralBasis(int padded, int modes);

  int padded, m1, m2;
  std::vector<int> row_modes;  // k1 values
  Eigen::MatrixXd row_cos, row_sin;  // m1 x P
  Eigen::MatrixXd col_cos, col_sin;  // P x m2
  Eigen::VectorXd col_weight;        // 1 for k2 = 0, else 2
};

/// Truncated spectral convolution of a channels x P^2 field. weights_re/im
/// hold modes^2 blocks of out x in matrices (row-major, mode-major). If
/// spec_re/spec_im are given they receive the transformed input (in x m^2).
RealGrid spectral_conv(const SpectralBasis& basis, const RealGrid& h, std::span<const double> weights_re,
                       std::span<const double> weights_im, int out_channels, RealGrid* spec_re = nullptr,
                       RealGrid* spec_im = nullptr);

}  // namespace eit
