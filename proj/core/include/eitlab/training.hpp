#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "eitlab/boundary_spectral.hpp"
#include "eitlab/conductivity.hpp"
#include "eitlab/fno_model.hpp"
#include "eitlab/optimizer.hpp"

namespace eit {

/// Pointwise mean/std of training kernels; std floored at 1e-8.
struct Standardizer {
  RealGrid mean, stddev;

  static constexpr double kFloor = 1e-8;
  static Standardizer fit(std::span<const RealGrid* const> inputs);
  RealGrid apply(const RealGrid& kernel) const;
};

struct Sample {
  KernelGrid kernel;
  ConductivityField gamma;
};

/// ||pred - target||_1 / (||target||_1 + eps) over the target mask, cell quadrature.
double relative_l1_loss(const RealGrid& pred, const ConductivityField& target, double eps = 1e-8);

/// d(loss)/d(pred) with sign(0) = 0, scaled by `scale`.
RealGrid relative_l1_grad(const RealGrid& pred, const ConductivityField& target, double scale = 1.0,
                          double eps = 1e-8);

/// Mean loss over a batch of (standardized input, target) pairs, writing the
/// exact gradient of the mean into grad. Work is split into min(batch, 8)
/// contiguous chunks reduced in order, so the result does not depend on the
/// thread count. Throws NumericalError on non-finite loss or gradient.
double batch_loss_and_gradient(const FnoParams& params, std::span<const RealGrid* const> inputs,
                               std::span<const ConductivityField* const> targets, std::vector<double>& grad);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double valid_loss = 0.0;
  double lr = 0.0;
  std::int64_t step = 0;
};

/// Keeps the parameters of the epoch with the lowest validation loss (first on ties).
class CheckpointSelector {
 public:
  void offer(int epoch, double valid_loss, const FnoParams& params);
  bool empty() const { return epoch_ < 0; }
  int best_epoch() const { return epoch_; }
  double best_loss() const { return loss_; }
  const FnoParams& best() const;

 private:
  int epoch_ = -1;
  double loss_ = std::numeric_limits<double>::infinity();
  std::vector<FnoParams> params_;
};

struct TrainConfig {
  int epochs = 30;
  int batch_size = 32;
  AdamWConfig adam;
  /// Cosine horizon in epochs; 0 means `epochs`.
  int schedule_horizon = 0;
  std::uint64_t seed = 0;
  /// Stop after this many optimizer steps (0 = no limit).
  std::int64_t max_steps = 0;
  /// Parameter tensors excluded from updates (gradients are still computed).
  std::vector<std::string> frozen;
};

/// Replaces a raw kernel before standardization (noise injection).
/// epoch is -1 for validation inputs.
using InputHook = std::function<RealGrid(const RealGrid& kernel, std::size_t index, int epoch)>;

struct TrainResult;

struct TrainHooks {
  InputHook train_input;
  InputHook valid_input;
  std::function<void(const TrainResult&)> on_epoch;
};

struct TrainResult {
  FnoParams params;
  CheckpointSelector selector;
  OptimizerState optimizer;
  Standardizer standardizer;
  std::vector<EpochRecord> history;
  bool diverged = false;
  std::string failure;

  const FnoParams& best_params() const { return selector.best(); }
  int best_epoch() const { return selector.best_epoch(); }
};

/// Seeded mini-batch AdamW with a per-epoch cosine schedule. Passing
/// `resume` continues from its last completed epoch and optimizer step.
TrainResult train(const FnoConfig& config, const std::vector<Sample>& train_set,
                  const std::vector<Sample>& valid_set, const TrainConfig& train_cfg, const TrainHooks& hooks = {},
                  const TrainResult* resume = nullptr);

/// Mean loss of params on a set (hook applied with epoch -1).
double validation_loss(const FnoParams& params, const Standardizer& standardizer, const std::vector<Sample>& set,
                       const InputHook& hook = {});

// --- Evaluation.

using Predictor = std::function<RealGrid(const RealGrid& kernel, std::size_t index)>;

Predictor fno_predictor(const FnoParams& params, const Standardizer& standardizer, InputHook input = {});

struct SampleMetrics {
  double rel_l1 = 0.0;
  double l0 = 0.0;
  double dice = 0.0;
};

struct EvalOptions {
  /// L0 and Dice are only meaningful for two-valued contrast data.
  bool shape_metrics = true;
  double threshold = 50.0;
};

struct EvalSummary {
  std::vector<SampleMetrics> samples;
  double mean_rel_l1 = 0.0, std_rel_l1 = 0.0;
  double mean_l0 = 0.0, mean_dice = 0.0;
  bool shape_metrics = true;
};

EvalSummary evaluate(const Predictor& predictor, const std::vector<Sample>& test_set, const EvalOptions& options = {});

}  // namespace eit
