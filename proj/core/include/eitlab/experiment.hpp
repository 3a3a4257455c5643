#pragma once

// Run configuration, checkpoints and the train/eval/sweep orchestration
// behind the command line tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eitlab/dataset.hpp"
#include "eitlab/fno_model.hpp"
#include "eitlab/metrics.hpp"
#include "eitlab/noise.hpp"
#include "eitlab/training.hpp"

namespace eit {

struct NoiseConfig {
  double train_delta = 0.0;
  NoiseLaw train_law = NoiseLaw::Gaussian;
  double test_delta = 0.0;
  NoiseLaw test_law = NoiseLaw::UniformBounded;
  double alpha = 1.5;
  double tau = 10.0;

  NoiseSpec train_spec(int grid) const;
  NoiseSpec test_spec(int grid) const;
};

struct SweepConfig {
  std::vector<double> deltas = {0.0, 0.03, 0.1, 0.3};
  /// Train only at delta_test == delta_train.
  bool matched_only = false;
  std::vector<int> sample_counts = {25, 50, 100, 200};
  std::vector<std::uint64_t> seeds = {0, 1, 2};
};

struct RunConfig {
  DatasetConfig dataset;
  FnoConfig model;
  TrainConfig training;
  /// Use only the first train_samples training samples (0 = all).
  int train_samples = 0;
  NoiseConfig noise;
  SweepConfig sweep;

  void validate() const;
};

/// Strict JSON parsing: unknown keys and wrong types raise ConfigError.
/// Missing keys keep their defaults.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_to_json(const RunConfig& config);

/// Directory for relative run paths: $EITLAB_RUN_ROOT, else the working directory.
std::filesystem::path run_root();
std::filesystem::path resolve_run_path(const std::filesystem::path& p);

// --- Checkpoints: dir/header.json plus one .eitk per tensor.

struct Checkpoint {
  FnoParams params;
  Standardizer standardizer;
  std::optional<OptimizerState> optimizer;
  int epoch = -1;
  double valid_loss = 0.0;
};

void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& dir);

// --- Results.

/// One CSV row: dataset, delta_train, delta_test, N, seed, rel_l1, l0, dice, wall_seconds.
struct ResultRow {
  std::string dataset;
  double delta_train = 0.0, delta_test = 0.0;
  int n_train = 0;
  std::uint64_t seed = 0;
  double rel_l1 = 0.0, l0 = 0.0, dice = 0.0;
  double wall_seconds = 0.0;
};

inline constexpr const char* kResultHeader = "dataset,delta_train,delta_test,N,seed,rel_l1,l0,dice,wall_seconds";

std::string format_row(const ResultRow& row);
/// Appends rows, writing the header first if the file is new.
void append_rows(const std::filesystem::path& csv, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_rows(const std::filesystem::path& csv);

/// Noise seeds: training input of sample i at epoch e, and evaluation input i.
std::uint64_t train_noise_seed(std::uint64_t run_seed, std::size_t index, int epoch);
std::uint64_t eval_noise_seed(std::uint64_t run_seed, std::size_t index);

struct TrainingOutcome {
  TrainResult result;
  std::filesystem::path best_checkpoint;
  double wall_seconds = 0.0;
};

/// Trains on a complete dataset with on-the-fly training noise and writes
/// out_dir/{config.json, history.csv, best/, last/}. With resume, continues
/// from out_dir/last. Throws NumericalError after writing artifacts if the
/// loss diverged.
TrainingOutcome run_training(const RunConfig& config, const std::filesystem::path& dataset_dir,
                             const std::filesystem::path& out_dir, bool resume = false);

struct EvalOutcome {
  EvalSummary summary;
  ResultRow row;
};

/// Evaluates a checkpoint on the test split at config.noise.test_delta and
/// appends to out_dir/{metrics.csv, per_sample.csv}. If the dataset grid
/// differs from the training grid, the standardizer is resampled.
EvalOutcome run_eval(const RunConfig& config, const std::filesystem::path& checkpoint_dir,
                     const std::filesystem::path& dataset_dir, const std::filesystem::path& out_dir,
                     int n_train = 0);

/// For every seed and delta_train: train once, evaluate at every delta_test
/// (or only the matching one). Rows go to out_dir/results.csv.
std::vector<ResultRow> sweep_noise(const RunConfig& config, const std::filesystem::path& dataset_dir,
                                   const std::filesystem::path& out_dir);

/// For every seed and training-set size N: train and evaluate at test_delta.
std::vector<ResultRow> sweep_samples(const RunConfig& config, const std::filesystem::path& dataset_dir,
                                     const std::filesystem::path& out_dir);

enum class FitAxis { DeltaTest, SampleCount };

/// Averages rel_l1 over rows sharing the x value (optionally filtered to
/// delta_train == delta_test) and fits the law.
FitResult fit_rows(const std::vector<ResultRow>& rows, FitAxis axis, LawKind kind, bool matched_only = true);
std::string fit_to_json(const FitResult& fit);

}  // namespace eit
