// eitlab: dataset generation, training, evaluation and sweeps.
//
// Exit codes: 0 success, 1 configuration or input error, 2 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eitlab/array_io.hpp"
#include "eitlab/dataset.hpp"
#include "eitlab/experiment.hpp"
#include "eitlab/forward.hpp"
#include "eitlab/metrics.hpp"

namespace fs = std::filesystem;
using namespace eit;

namespace {

// Flags that override fields of the JSON run config.
struct Overrides {
  std::optional<std::string> distribution;
  std::optional<int> train, valid, test, grid, modes, rings;
  std::optional<std::uint64_t> dataset_seed;
  std::optional<int> epochs, batch_size, train_samples;
  std::optional<double> lr, train_delta, test_delta;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> train_law, test_law;

  void attach(CLI::App* app, bool dataset, bool training, bool noise) {
    if (dataset) {
      app->add_option("--distribution", distribution, "shape | three-phase | lognormal | homogeneous");
      app->add_option("--train", train, "training samples");
      app->add_option("--valid", valid, "validation samples");
      app->add_option("--test", test, "test samples");
      app->add_option("--grid", grid, "grid size N");
      app->add_option("--modes", modes, "boundary mode cutoff J");
      app->add_option("--rings", rings, "mesh rings R");
      app->add_option("--dataset-seed", dataset_seed, "master dataset seed");
    }
    if (training) {
      app->add_option("--epochs", epochs);
      app->add_option("--batch-size", batch_size);
      app->add_option("--lr", lr);
      app->add_option("--seed", seed, "training seed");
      app->add_option("--train-samples", train_samples, "use the first N training samples");
    }
    if (noise) {
      app->add_option("--train-delta", train_delta);
      app->add_option("--test-delta", test_delta);
      app->add_option("--train-law", train_law, "gaussian | uniform");
      app->add_option("--test-law", test_law, "gaussian | uniform");
    }
  }

  void apply(RunConfig& c) const {
    if (distribution) c.dataset.distribution = parse_distribution(*distribution);
    if (train) c.dataset.counts.train = *train;
    if (valid) c.dataset.counts.valid = *valid;
    if (test) c.dataset.counts.test = *test;
    if (grid) c.dataset.grid = *grid;
    if (modes) c.dataset.modes = *modes;
    if (rings) c.dataset.rings = *rings;
    if (dataset_seed) c.dataset.seed = *dataset_seed;
    if (epochs) c.training.epochs = *epochs;
    if (batch_size) c.training.batch_size = *batch_size;
    if (lr) c.training.adam.lr = *lr;
    if (seed) c.training.seed = *seed;
    if (train_samples) c.train_samples = *train_samples;
    if (train_delta) c.noise.train_delta = *train_delta;
    if (test_delta) c.noise.test_delta = *test_delta;
    try {
      if (train_law) c.noise.train_law = parse_noise_law(*train_law);
      if (test_law) c.noise.test_law = parse_noise_law(*test_law);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

// generate only needs the dataset section to be consistent
RunConfig make_config(const std::string& path, const Overrides& o, bool dataset_only = false) {
  RunConfig c = path.empty() ? RunConfig{} : load_run_config(resolve_run_path(path));
  o.apply(c);
  if (dataset_only) {
    c.dataset.validate();
  } else {
    c.validate();
  }
  return c;
}

void print_rows(const std::vector<ResultRow>& rows) {
  std::cout << kResultHeader << "\n";
  for (const auto& r : rows) std::cout << format_row(r) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation, training and evaluation for the disk impedance tomography laboratory"};
  app.require_subcommand(1);

  std::string config_path, dataset_dir, out_dir, checkpoint_dir;
  bool resume = false;
  Overrides ov;

  auto* gen = app.add_subcommand("generate", "simulate a dataset of conductivities and NtD kernels");
  gen->add_option("--config", config_path, "JSON run config");
  gen->add_option("--out", out_dir, "dataset directory")->required();
  ov.attach(gen, true, false, false);

  auto* trn = app.add_subcommand("train", "train an operator network on a dataset");
  trn->add_option("--config", config_path, "JSON run config");
  trn->add_option("--dataset", dataset_dir, "dataset directory")->required();
  trn->add_option("--out", out_dir, "run directory")->required();
  trn->add_flag("--resume", resume, "continue from <out>/last");
  ov.attach(trn, false, true, true);

  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
  ev->add_option("--config", config_path, "JSON run config");
  ev->add_option("--checkpoint", checkpoint_dir, "checkpoint directory")->required();
  ev->add_option("--dataset", dataset_dir, "dataset directory")->required();
  ev->add_option("--out", out_dir, "output directory")->required();
  ov.attach(ev, false, false, true);

  auto* swn = app.add_subcommand("sweep-noise", "train and evaluate over a grid of noise levels");
  swn->add_option("--config", config_path, "JSON run config");
  swn->add_option("--dataset", dataset_dir, "dataset directory")->required();
  swn->add_option("--out", out_dir, "sweep directory")->required();
  ov.attach(swn, false, true, true);

  auto* sws = app.add_subcommand("sweep-samples", "train and evaluate over training-set sizes");
  sws->add_option("--config", config_path, "JSON run config");
  sws->add_option("--dataset", dataset_dir, "dataset directory")->required();
  sws->add_option("--out", out_dir, "sweep directory")->required();
  ov.attach(sws, false, true, true);

  std::string csv_path, axis = "delta", kind = "power", fit_out;
  bool all_pairs = false;
  auto* fit = app.add_subcommand("fit-laws", "fit an offset power or log law to a results CSV");
  fit->add_option("--csv", csv_path, "results CSV")->required();
  fit->add_option("--axis", axis, "delta | N")->check(CLI::IsMember({"delta", "N"}));
  fit->add_option("--kind", kind, "power | log | sample-power")->check(CLI::IsMember({"power", "log", "sample-power"}));
  fit->add_flag("--all-pairs", all_pairs, "use rows with delta_train != delta_test too");
  fit->add_option("--out", fit_out, "write the fit as JSON");

  std::string phantom_kind = "shape";
  int ph_grid = 32, ph_modes = 16, ph_rings = 32;
  auto* ph = app.add_subcommand("phantom", "simulate the heart-and-lungs phantom, optionally reconstruct it");
  ph->add_option("--kind", phantom_kind, "shape | realistic")->check(CLI::IsMember({"shape", "realistic"}));
  ph->add_option("--grid", ph_grid);
  ph->add_option("--modes", ph_modes);
  ph->add_option("--rings", ph_rings);
  ph->add_option("--checkpoint", checkpoint_dir, "reconstruct with this checkpoint");
  ph->add_option("--out", out_dir, "output directory")->required();

  std::vector<std::string> inputs;
  auto* exp = app.add_subcommand("export-csv", "merge metrics.csv/results.csv files found under run directories");
  exp->add_option("inputs", inputs, "run directories")->required();
  exp->add_option("--out", out_dir, "merged CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      const RunConfig c = make_config(config_path, ov, true);
      const fs::path dir = resolve_run_path(out_dir);
      const auto m = generate_dataset(c.dataset, dir, [](std::size_t done, std::size_t total) {
        std::fprintf(stderr, "\rsample %zu/%zu", done, total);
        if (done == total) std::fprintf(stderr, "\n");
      });
      std::cout << "wrote " << m.samples.size() << " samples to " << dir.string() << "\n";
    } else if (*trn) {
      const RunConfig c = make_config(config_path, ov);
      const auto out = run_training(c, resolve_run_path(dataset_dir), resolve_run_path(out_dir), resume);
      const auto& last = out.result.history.back();
      std::cout << "epochs " << out.result.history.size() << ", best epoch " << out.result.best_epoch()
                << " (valid " << out.result.selector.best_loss() << "), last train loss " << last.train_loss << ", "
                << out.wall_seconds << " s\n";
    } else if (*ev) {
      const RunConfig c = make_config(config_path, ov);
      const auto out = run_eval(c, resolve_run_path(checkpoint_dir), resolve_run_path(dataset_dir),
                                resolve_run_path(out_dir));
      print_rows({out.row});
    } else if (*swn) {
      const RunConfig c = make_config(config_path, ov);
      print_rows(sweep_noise(c, resolve_run_path(dataset_dir), resolve_run_path(out_dir)));
    } else if (*sws) {
      const RunConfig c = make_config(config_path, ov);
      print_rows(sweep_samples(c, resolve_run_path(dataset_dir), resolve_run_path(out_dir)));
    } else if (*fit) {
      const auto rows = read_rows(resolve_run_path(csv_path));
      const FitResult f = fit_rows(rows, axis == "delta" ? FitAxis::DeltaTest : FitAxis::SampleCount,
                                   parse_law_kind(kind), !all_pairs);
      const std::string text = fit_to_json(f);
      std::cout << text << "\n";
      if (!fit_out.empty()) std::ofstream(resolve_run_path(fit_out)) << text << "\n";
    } else if (*ph) {
      const auto kindv = phantom_kind == "shape" ? PhantomKind::ShapeContrast : PhantomKind::Realistic;
      const fs::path dir = resolve_run_path(out_dir);
      const ConductivityField gamma = phantom(kindv, ph_grid);
      const SimulatedSample sim = simulate_sample(build_mesh(ph_rings), gamma, ph_modes);
      save_real(dir / "gamma.eitk", gamma.values);
      save_complex(dir / "ntd.eitk", sim.ntd.values());
      save_real(dir / "kernel.eitk", sim.kernel.values);
      std::cout << "phantom written to " << dir.string() << "\n";
      if (!checkpoint_dir.empty()) {
        const Checkpoint ck = load_checkpoint(resolve_run_path(checkpoint_dir));
        const RealGrid pred = fno_forward(ck.params, ck.standardizer.apply(sim.kernel.values));
        save_real(dir / "reconstruction.eitk", pred);
        std::cout << "rel_l1 " << rel_lp_error(pred, gamma, 1.0);
        if (kindv == PhantomKind::ShapeContrast) std::cout << " dice " << dice(pred, gamma);
        std::cout << "\n";
      }
    } else if (*exp) {
      std::vector<ResultRow> rows;
      for (const auto& in : inputs) {
        const fs::path root = resolve_run_path(in);
        std::vector<fs::path> found;
        for (const auto& e : fs::recursive_directory_iterator(root)) {
          const auto name = e.path().filename();
          if (name == "metrics.csv" || name == "results.csv") found.push_back(e.path());
        }
        std::sort(found.begin(), found.end());
        for (const auto& p : found) {
          // results.csv already aggregates the metrics.csv files below it
          if (p.filename() == "metrics.csv" && fs::exists(p.parent_path().parent_path() / "results.csv")) continue;
          const auto r = read_rows(p);
          rows.insert(rows.end(), r.begin(), r.end());
        }
      }
      const fs::path target = resolve_run_path(out_dir);
      if (fs::exists(target)) fs::remove(target);
      append_rows(target, rows);
      std::cout << "exported " << rows.size() << " rows to " << target.string() << "\n";
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
