#pragma once

#include <span>

#include "eitlab/types.hpp"

namespace eit::fft {

enum class Direction { Forward, Inverse };

/// In-place unnormalized 1-D DFT. Forward uses exp(-2 pi i k a / n),
/// Inverse uses exp(+2 pi i k a / n).
void dft(std::span<Complex> data, Direction dir);

/// In-place unnormalized 2-D DFT of a row-major rows x cols buffer.
void dft2(std::span<Complex> data, int rows, int cols, Direction dir);

}  // namespace eit::fft
