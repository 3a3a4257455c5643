#include "eitlab/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "eitlab/metrics.hpp"
#include "eitlab/rng.hpp"

namespace eit {
namespace {

constexpr int kMaxChunks = 8;
constexpr std::uint64_t kShuffleStream = 0x5f;

void check_target(const RealGrid& pred, const ConductivityField& target) {
  if (pred.rows() != target.values.rows() || pred.cols() != target.values.cols()) {
    throw std::invalid_argument("loss: prediction and target grids differ");
  }
}

double target_l1(const ConductivityField& target) {
  const double h2 = std::pow(2.0 / target.values.rows(), 2);
  double s = 0.0;
  for (Eigen::Index r = 0; r < target.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < target.values.cols(); ++c) {
      if (target.mask(r, c)) s += std::abs(target.values(r, c));
    }
  }
  return s * h2;
}

std::vector<std::uint8_t> trainable_mask(const FnoConfig& cfg, const std::vector<std::string>& frozen) {
  const ParamLayout layout(cfg);
  std::vector<std::uint8_t> mask(layout.total(), 1);
  for (const auto& name : frozen) {
    const auto& t = layout.tensor(name);
    std::fill_n(mask.begin() + static_cast<std::ptrdiff_t>(t.offset), t.size(), std::uint8_t{0});
  }
  return mask;
}

}  // namespace

Standardizer Standardizer::fit(std::span<const RealGrid* const> inputs) {
  if (inputs.empty()) throw std::invalid_argument("Standardizer::fit: no inputs");
  const auto rows = inputs[0]->rows(), cols = inputs[0]->cols();
  Standardizer s;
  s.mean = RealGrid::Zero(rows, cols);
  for (const RealGrid* g : inputs) {
    if (g->rows() != rows || g->cols() != cols) throw std::invalid_argument("Standardizer::fit: grid sizes differ");
    s.mean += *g;
  }
  s.mean /= static_cast<double>(inputs.size());
  RealGrid var = RealGrid::Zero(rows, cols);
  for (const RealGrid* g : inputs) var.array() += (*g - s.mean).array().square();
  var /= static_cast<double>(inputs.size());
  s.stddev = var.array().sqrt().max(kFloor).matrix();
  return s;
}

RealGrid Standardizer::apply(const RealGrid& kernel) const {
  if (kernel.rows() != mean.rows() || kernel.cols() != mean.cols()) {
    throw std::invalid_argument("Standardizer: grid size " + std::to_string(kernel.rows()) +
                                " does not match fitted size " + std::to_string(mean.rows()));
  }
  return ((kernel - mean).array() / stddev.array()).matrix();
}

double relative_l1_loss(const RealGrid& pred, const ConductivityField& target, double eps) {
  check_target(pred, target);
  const double h2 = std::pow(2.0 / pred.rows(), 2);
  double num = 0.0;
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    for (Eigen::Index c = 0; c < pred.cols(); ++c) {
      if (target.mask(r, c)) num += std::abs(pred(r, c) - target.values(r, c));
    }
  }
  return num * h2 / (target_l1(target) + eps);
}

RealGrid relative_l1_grad(const RealGrid& pred, const ConductivityField& target, double scale, double eps) {
  check_target(pred, target);
  const double h2 = std::pow(2.0 / pred.rows(), 2);
  const double k = scale * h2 / (target_l1(target) + eps);
  RealGrid g = RealGrid::Zero(pred.rows(), pred.cols());
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    for (Eigen::Index c = 0; c < pred.cols(); ++c) {
      if (!target.mask(r, c)) continue;
      const double d = pred(r, c) - target.values(r, c);
      g(r, c) = d > 0 ? k : (d < 0 ? -k : 0.0);
    }
  }
  return g;
}

double batch_loss_and_gradient(const FnoParams& params, std::span<const RealGrid* const> inputs,
                               std::span<const ConductivityField* const> targets, std::vector<double>& grad) {
  const std::size_t batch = inputs.size();
  if (batch == 0 || targets.size() != batch) throw std::invalid_argument("batch: inputs and targets differ");
  const std::size_t total = params.values.size();
  const int chunks = static_cast<int>(std::min<std::size_t>(batch, kMaxChunks));
  std::vector<std::vector<double>> chunk_grad(chunks);
  std::vector<double> chunk_loss(chunks, 0.0);
  std::vector<std::string> errors(chunks);
  const double scale = 1.0 / static_cast<double>(batch);

#pragma omp parallel for schedule(static)
  for (int c = 0; c < chunks; ++c) {
    try {
      chunk_grad[c].assign(total, 0.0);
      const std::size_t begin = batch * c / chunks, end = batch * (c + 1) / chunks;
      ForwardCache cache;
      for (std::size_t i = begin; i < end; ++i) {
        const RealGrid pred = fno_forward(params, *inputs[i], &cache);
        chunk_loss[c] += relative_l1_loss(pred, *targets[i]);
        fno_backward(params, cache, relative_l1_grad(pred, *targets[i], scale), chunk_grad[c]);
      }
    } catch (const std::exception& e) {
      errors[c] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw NumericalError("batch gradient failed: " + e);
  }
  grad.assign(total, 0.0);
  double loss = 0.0;
  for (int c = 0; c < chunks; ++c) {
    loss += chunk_loss[c];
    for (std::size_t k = 0; k < total; ++k) grad[k] += chunk_grad[c][k];
  }
  loss *= scale;
  if (!std::isfinite(loss)) throw NumericalError("non-finite training loss");
  for (double g : grad) {
    if (!std::isfinite(g)) throw NumericalError("non-finite gradient entry");
  }
  return loss;
}

void CheckpointSelector::offer(int epoch, double valid_loss, const FnoParams& params) {
  if (!std::isfinite(valid_loss)) return;
  if (epoch_ < 0 || valid_loss < loss_) {
    epoch_ = epoch;
    loss_ = valid_loss;
    params_.assign(1, params);
  }
}

const FnoParams& CheckpointSelector::best() const {
  if (params_.empty()) throw std::logic_error("CheckpointSelector: no checkpoint offered");
  return params_.front();
}

double validation_loss(const FnoParams& params, const Standardizer& standardizer, const std::vector<Sample>& set,
                       const InputHook& hook) {
  if (set.empty()) throw std::invalid_argument("validation_loss: empty set");
  std::vector<double> losses(set.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < set.size(); ++i) {
    const RealGrid raw = hook ? hook(set[i].kernel.values, i, -1) : set[i].kernel.values;
    losses[i] = relative_l1_loss(fno_forward(params, standardizer.apply(raw)), set[i].gamma);
  }
  return std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(set.size());
}

TrainResult train(const FnoConfig& config, const std::vector<Sample>& train_set, const std::vector<Sample>& valid_set,
                  const TrainConfig& cfg, const TrainHooks& hooks, const TrainResult* resume) {
  if (train_set.empty() || valid_set.empty()) throw std::invalid_argument("train: empty train or validation set");
  if (cfg.epochs < 1 || cfg.batch_size < 1) throw std::invalid_argument("train: epochs and batch size must be >= 1");
  const int n = train_set.front().kernel.size();
  config.validate(n);
  const int horizon = cfg.schedule_horizon > 0 ? cfg.schedule_horizon : cfg.epochs;

  TrainResult result = resume ? *resume : TrainResult{init_params(config, cfg.seed), {}, {}, {}, {}, false, {}};
  if (!resume) {
    result.optimizer = OptimizerState(result.params.values.size());
    std::vector<const RealGrid*> raw;
    raw.reserve(train_set.size());
    for (const auto& s : train_set) raw.push_back(&s.kernel.values);
    result.standardizer = Standardizer::fit(raw);
  } else if (!(resume->params.config == config)) {
    throw std::invalid_argument("train: resume state has a different network configuration");
  }
  const auto trainable = trainable_mask(config, cfg.frozen);

  std::vector<std::size_t> order(train_set.size());
  std::vector<double> grad;
  const int first_epoch = static_cast<int>(result.history.size());
  for (int epoch = first_epoch; epoch < cfg.epochs; ++epoch) {
    if (cfg.max_steps > 0 && result.optimizer.step >= cfg.max_steps) break;
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, {kShuffleStream, static_cast<std::uint64_t>(epoch)}));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    const double lr = cosine_lr(cfg.adam.lr, epoch, horizon);
    double loss_sum = 0.0;
    std::size_t seen = 0;
    try {
      for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
        if (cfg.max_steps > 0 && result.optimizer.step >= cfg.max_steps) break;
        const std::size_t end = std::min(order.size(), start + cfg.batch_size);
        std::vector<RealGrid> inputs(end - start);
        std::vector<const RealGrid*> in_ptr;
        std::vector<const ConductivityField*> tgt_ptr;
        for (std::size_t k = start; k < end; ++k) {
          const Sample& s = train_set[order[k]];
          RealGrid& x = inputs[k - start];
          x = result.standardizer.apply(hooks.train_input ? hooks.train_input(s.kernel.values, order[k], epoch)
                                                          : s.kernel.values);
          in_ptr.push_back(&x);
          tgt_ptr.push_back(&s.gamma);
        }
        const double loss = batch_loss_and_gradient(result.params, in_ptr, tgt_ptr, grad);
        adamw_step(result.optimizer, result.params.values, grad, lr, cfg.adam, trainable);
        loss_sum += loss * static_cast<double>(end - start);
        seen += end - start;
      }
      EpochRecord rec;
      rec.epoch = epoch;
      rec.train_loss = loss_sum / static_cast<double>(std::max<std::size_t>(seen, 1));
      rec.valid_loss = validation_loss(result.params, result.standardizer, valid_set, hooks.valid_input);
      rec.lr = lr;
      rec.step = result.optimizer.step;
      if (!std::isfinite(rec.valid_loss)) throw NumericalError("non-finite validation loss");
      result.history.push_back(rec);
      result.selector.offer(epoch, rec.valid_loss, result.params);
    } catch (const NumericalError& e) {
      result.diverged = true;
      result.failure = e.what();
      return result;
    }
    if (hooks.on_epoch) hooks.on_epoch(result);
  }
  return result;
}

Predictor fno_predictor(const FnoParams& params, const Standardizer& standardizer, InputHook input) {
  return [&params, &standardizer, input](const RealGrid& kernel, std::size_t index) {
    const RealGrid raw = input ? input(kernel, index, -1) : kernel;
    return fno_forward(params, standardizer.apply(raw));
  };
}

EvalSummary evaluate(const Predictor& predictor, const std::vector<Sample>& test_set, const EvalOptions& options) {
  if (test_set.empty()) throw std::invalid_argument("evaluate: empty test set");
  EvalSummary out;
  out.shape_metrics = options.shape_metrics;
  out.samples.resize(test_set.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    const Sample& s = test_set[i];
    const RealGrid pred = predictor(s.kernel.values, i);
    SampleMetrics m;
    m.rel_l1 = rel_lp_error(pred, s.gamma, 1.0);
    if (options.shape_metrics) {
      m.l0 = l0_distance(pred, s.gamma, options.threshold);
      m.dice = dice(pred, s.gamma, options.threshold);
    }
    out.samples[i] = m;
  }
  const double count = static_cast<double>(test_set.size());
  for (const auto& m : out.samples) {
    out.mean_rel_l1 += m.rel_l1;
    out.mean_l0 += m.l0;
    out.mean_dice += m.dice;
  }
  out.mean_rel_l1 /= count;
  out.mean_l0 /= count;
  out.mean_dice /= count;
  for (const auto& m : out.samples) out.std_rel_l1 += std::pow(m.rel_l1 - out.mean_rel_l1, 2);
  out.std_rel_l1 = std::sqrt(out.std_rel_l1 / count);
  return out;
}

}  // namespace eit
