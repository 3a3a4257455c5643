#include "eitlab/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace eit {

double cosine_lr(double lr0, double t, double horizon) {
  if (horizon <= 0.0) throw std::invalid_argument("cosine_lr: horizon must be positive");
  if (t >= horizon) return 0.0;
  if (t <= 0.0) return lr0;
  return 0.5 * lr0 * (1.0 + std::cos(M_PI * t / horizon));
}

void adamw_step(OptimizerState& state, std::span<double> params, std::span<const double> grads, double lr,
                const AdamWConfig& cfg, std::span<const std::uint8_t> trainable) {
  const std::size_t n = params.size();
  if (grads.size() != n || state.m.size() != n || state.v.size() != n) {
    throw std::invalid_argument("adamw_step: shape mismatch");
  }
  if (!trainable.empty() && trainable.size() != n) throw std::invalid_argument("adamw_step: mask size mismatch");
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  const double decay = 1.0 - lr * cfg.weight_decay;
  for (std::size_t i = 0; i < n; ++i) {
    if (!trainable.empty() && !trainable[i]) continue;
    const double g = grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] = params[i] * decay - lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

}  // namespace eit
