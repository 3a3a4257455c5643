#include "eitlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace eit::fft {
namespace {

// FFTW planning is not thread safe; execution with the new-array interface is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int rows, int cols, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(rows, cols, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<fftw_complex> scratch(static_cast<std::size_t>(rows) * cols);
    fftw_plan plan =
        rows == 1 ? fftw_plan_dft_1d(cols, scratch.data(), scratch.data(), sign,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED)
                  : fftw_plan_dft_2d(rows, cols, scratch.data(), scratch.data(), sign,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void run(std::span<Complex> data, int rows, int cols, Direction dir) {
  if (rows <= 0 || cols <= 0 || data.size() != static_cast<std::size_t>(rows) * cols) {
    throw std::invalid_argument("fft: buffer size does not match shape");
  }
  const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = cache().get(rows, cols, sign);
  // std::complex<double> is layout compatible with fftw_complex.
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

void dft(std::span<Complex> data, Direction dir) {
  run(data, 1, static_cast<int>(data.size()), dir);
}

void dft2(std::span<Complex> data, int rows, int cols, Direction dir) {
  run(data, rows, cols, dir);
}

}  // namespace eit::fft
