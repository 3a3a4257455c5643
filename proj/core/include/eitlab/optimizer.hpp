#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace eit {

struct AdamWConfig {
  double lr = 8e-3;
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct OptimizerState {
  std::vector<double> m, v;
  std::int64_t step = 0;

  OptimizerState() = default;
  explicit OptimizerState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// lr0 (1 + cos(pi t / T)) / 2, clamped to 0 for t >= T.
double cosine_lr(double lr0, double t, double horizon);

/// One AdamW update at learning rate lr. Weight decay is decoupled:
/// theta <- theta (1 - lr wd) before the bias-corrected moment step.
/// Entries with trainable[i] == 0 are left untouched (moments included).
void adamw_step(OptimizerState& state, std::span<double> params, std::span<const double> grads, double lr,
                const AdamWConfig& config, std::span<const std::uint8_t> trainable = {});

}  // namespace eit
