#include "eitlab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "eitlab/array_io.hpp"
#include "eitlab/patches.hpp"
#include "eitlab/rng.hpp"

namespace eit {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kTrainNoiseStream = 0x7a1;
constexpr std::uint64_t kEvalNoiseStream = 0xe7a1;
constexpr int kCheckpointVersion = 1;

// --- Strict JSON reading.

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

void read_law(const json& obj, const char* key, const std::string& where, NoiseLaw& out) {
  std::string s;
  read(obj, key, where, s);
  if (s.empty()) return;
  try {
    out = parse_noise_law(s);
  } catch (const std::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

json model_json(const FnoConfig& m) {
  return {{"layers", m.layers},         {"modes", m.modes},
          {"width", m.width},           {"mlp_width", m.mlp_width},
          {"grid_concat", m.grid_concat}, {"padding_fraction", m.padding_fraction}};
}

FnoConfig model_from_json(const json& j, const std::string& where) {
  check_keys(j, where, {"layers", "modes", "width", "mlp_width", "grid_concat", "padding_fraction"});
  FnoConfig m;
  read(j, "layers", where, m.layers);
  read(j, "modes", where, m.modes);
  read(j, "width", where, m.width);
  read(j, "mlp_width", where, m.mlp_width);
  read(j, "grid_concat", where, m.grid_concat);
  read(j, "padding_fraction", where, m.padding_fraction);
  return m;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_history(const fs::path& path, const std::vector<EpochRecord>& history) {
  std::ofstream out(path);
  out << "epoch,train_loss,valid_loss,lr,step\n";
  for (const auto& r : history) {
    out << r.epoch << "," << fmt(r.train_loss) << "," << fmt(r.valid_loss) << "," << fmt(r.lr) << "," << r.step
        << "\n";
  }
}

std::vector<EpochRecord> read_history(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing training history " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<EpochRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    EpochRecord r;
    long long step = 0;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lld", &r.epoch, &r.train_loss, &r.valid_loss, &r.lr, &step) != 5) {
      throw FormatError("malformed history line: " + line);
    }
    r.step = step;
    out.push_back(r);
  }
  return out;
}

Standardizer resample(const Standardizer& s, int n) {
  if (s.mean.rows() == n) return s;
  Standardizer out;
  out.mean.resize(n, n);
  out.stddev.resize(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double th = kTwoPi * a / n, thp = kTwoPi * b / n;
      out.mean(a, b) = interpolate_periodic(s.mean, th, thp);
      out.stddev(a, b) = std::max(Standardizer::kFloor, interpolate_periodic(s.stddev, th, thp));
    }
  }
  return out;
}

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

NoiseSpec NoiseConfig::train_spec(int grid) const { return {train_delta, train_law, alpha, tau, grid}; }
NoiseSpec NoiseConfig::test_spec(int grid) const { return {test_delta, test_law, alpha, tau, grid}; }

void RunConfig::validate() const {
  dataset.validate();
  try {
    model.validate(dataset.grid);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (training.epochs < 1 || training.batch_size < 1) throw ConfigError("epochs and batch_size must be >= 1");
  if (!(training.adam.lr > 0.0)) throw ConfigError("lr must be positive");
  if (train_samples < 0) throw ConfigError("train_samples must be >= 0");
  try {
    noise.train_spec(dataset.grid).validate();
    noise.test_spec(dataset.grid).validate();
    for (double d : sweep.deltas) NoiseSpec{d, noise.test_law, noise.alpha, noise.tau, dataset.grid}.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (int n : sweep.sample_counts) {
    if (n < 1) throw ConfigError("sample counts must be >= 1");
  }
  const ParamLayout layout(model);
  for (const auto& name : training.frozen) {
    try {
      layout.tensor(name);
    } catch (const std::out_of_range&) {
      throw ConfigError("frozen: unknown parameter tensor '" + name + "'");
    }
  }
}

RunConfig parse_run_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc, "config", {"dataset", "model", "training", "train_samples", "noise", "sweep"});
  RunConfig c;
  if (doc.contains("dataset")) {
    const json& d = doc["dataset"];
    check_keys(d, "dataset", {"distribution", "train", "valid", "test", "grid", "modes", "rings", "seed"});
    std::string dist;
    read(d, "distribution", "dataset", dist);
    if (!dist.empty()) c.dataset.distribution = parse_distribution(dist);
    read(d, "train", "dataset", c.dataset.counts.train);
    read(d, "valid", "dataset", c.dataset.counts.valid);
    read(d, "test", "dataset", c.dataset.counts.test);
    read(d, "grid", "dataset", c.dataset.grid);
    read(d, "modes", "dataset", c.dataset.modes);
    read(d, "rings", "dataset", c.dataset.rings);
    read(d, "seed", "dataset", c.dataset.seed);
  }
  if (doc.contains("model")) c.model = model_from_json(doc["model"], "model");
  if (doc.contains("training")) {
    const json& t = doc["training"];
    check_keys(t, "training", {"epochs", "batch_size", "lr", "weight_decay", "beta1", "beta2", "eps",
                               "schedule_horizon", "seed", "max_steps", "frozen"});
    read(t, "epochs", "training", c.training.epochs);
    read(t, "batch_size", "training", c.training.batch_size);
    read(t, "lr", "training", c.training.adam.lr);
    read(t, "weight_decay", "training", c.training.adam.weight_decay);
    read(t, "beta1", "training", c.training.adam.beta1);
    read(t, "beta2", "training", c.training.adam.beta2);
    read(t, "eps", "training", c.training.adam.eps);
    read(t, "schedule_horizon", "training", c.training.schedule_horizon);
    read(t, "seed", "training", c.training.seed);
    read(t, "max_steps", "training", c.training.max_steps);
    read(t, "frozen", "training", c.training.frozen);
  }
  read(doc, "train_samples", "config", c.train_samples);
  if (doc.contains("noise")) {
    const json& n = doc["noise"];
    check_keys(n, "noise", {"train_delta", "train_law", "test_delta", "test_law", "alpha", "tau"});
    read(n, "train_delta", "noise", c.noise.train_delta);
    read_law(n, "train_law", "noise", c.noise.train_law);
    read(n, "test_delta", "noise", c.noise.test_delta);
    read_law(n, "test_law", "noise", c.noise.test_law);
    read(n, "alpha", "noise", c.noise.alpha);
    read(n, "tau", "noise", c.noise.tau);
  }
  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    check_keys(s, "sweep", {"deltas", "matched_only", "sample_counts", "seeds"});
    read(s, "deltas", "sweep", c.sweep.deltas);
    read(s, "matched_only", "sweep", c.sweep.matched_only);
    read(s, "sample_counts", "sweep", c.sweep.sample_counts);
    read(s, "seeds", "sweep", c.sweep.seeds);
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string run_config_to_json(const RunConfig& c) {
  const json doc = {
      {"dataset",
       {{"distribution", to_string(c.dataset.distribution)},
        {"train", c.dataset.counts.train},
        {"valid", c.dataset.counts.valid},
        {"test", c.dataset.counts.test},
        {"grid", c.dataset.grid},
        {"modes", c.dataset.modes},
        {"rings", c.dataset.rings},
        {"seed", c.dataset.seed}}},
      {"model", model_json(c.model)},
      {"training",
       {{"epochs", c.training.epochs},
        {"batch_size", c.training.batch_size},
        {"lr", c.training.adam.lr},
        {"weight_decay", c.training.adam.weight_decay},
        {"beta1", c.training.adam.beta1},
        {"beta2", c.training.adam.beta2},
        {"eps", c.training.adam.eps},
        {"schedule_horizon", c.training.schedule_horizon},
        {"seed", c.training.seed},
        {"max_steps", c.training.max_steps},
        {"frozen", c.training.frozen}}},
      {"train_samples", c.train_samples},
      {"noise",
       {{"train_delta", c.noise.train_delta},
        {"train_law", to_string(c.noise.train_law)},
        {"test_delta", c.noise.test_delta},
        {"test_law", to_string(c.noise.test_law)},
        {"alpha", c.noise.alpha},
        {"tau", c.noise.tau}}},
      {"sweep",
       {{"deltas", c.sweep.deltas},
        {"matched_only", c.sweep.matched_only},
        {"sample_counts", c.sweep.sample_counts},
        {"seeds", c.sweep.seeds}}}};
  return doc.dump(2);
}

fs::path run_root() {
  if (const char* env = std::getenv("EITLAB_RUN_ROOT"); env && *env) return fs::path(env);
  return fs::current_path();
}

fs::path resolve_run_path(const fs::path& p) { return p.is_absolute() ? p : run_root() / p; }

void save_checkpoint(const fs::path& dir, const Checkpoint& ckpt) {
  fs::create_directories(dir);
  const ParamLayout layout(ckpt.params.config);
  json tensors = json::array();
  for (const auto& t : layout.tensors()) {
    std::vector<std::uint64_t> shape(t.shape.begin(), t.shape.end());
    save_vector(dir / (t.name + ".eitk"), std::span<const double>(ckpt.params.values).subspan(t.offset, t.size()),
                shape);
    tensors.push_back(t.name);
  }
  save_real(dir / "standardizer_mean.eitk", ckpt.standardizer.mean);
  save_real(dir / "standardizer_std.eitk", ckpt.standardizer.stddev);
  if (ckpt.optimizer) {
    save_vector(dir / "adam_m.eitk", ckpt.optimizer->m);
    save_vector(dir / "adam_v.eitk", ckpt.optimizer->v);
  }
  const json header = {{"format_version", kCheckpointVersion},
                       {"model", model_json(ckpt.params.config)},
                       {"tensors", tensors},
                       {"epoch", ckpt.epoch},
                       {"valid_loss", ckpt.valid_loss},
                       {"step", ckpt.optimizer ? ckpt.optimizer->step : 0},
                       {"has_optimizer", ckpt.optimizer.has_value()},
                       {"grid", ckpt.standardizer.mean.rows()}};
  std::ofstream out(dir / "header.json");
  out << header.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write checkpoint header in " + dir.string());
}

Checkpoint load_checkpoint(const fs::path& dir) {
  std::ifstream in(dir / "header.json");
  if (!in) throw ConfigError("no checkpoint in " + dir.string());
  json header;
  try {
    header = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("malformed checkpoint header: " + std::string(e.what()));
  }
  if (header.value("format_version", 0) != kCheckpointVersion) throw FormatError("unsupported checkpoint version");
  Checkpoint ck{FnoParams(model_from_json(header.at("model"), "checkpoint.model")), {}, std::nullopt,
                header.at("epoch").get<int>(), header.at("valid_loss").get<double>()};
  const ParamLayout layout(ck.params.config);
  for (const auto& t : layout.tensors()) {
    std::vector<std::uint64_t> shape;
    const auto v = load_vector(dir / (t.name + ".eitk"), &shape);
    if (v.size() != t.size() || !std::equal(shape.begin(), shape.end(), t.shape.begin(), t.shape.end())) {
      throw FormatError("checkpoint tensor " + t.name + " has the wrong shape");
    }
    std::copy(v.begin(), v.end(), ck.params.values.begin() + static_cast<std::ptrdiff_t>(t.offset));
  }
  ck.standardizer.mean = load_real(dir / "standardizer_mean.eitk");
  ck.standardizer.stddev = load_real(dir / "standardizer_std.eitk");
  if (header.at("has_optimizer").get<bool>()) {
    OptimizerState st;
    st.m = load_vector(dir / "adam_m.eitk");
    st.v = load_vector(dir / "adam_v.eitk");
    st.step = header.at("step").get<std::int64_t>();
    if (st.m.size() != ck.params.values.size() || st.v.size() != st.m.size()) {
      throw FormatError("optimizer moments do not match the parameter count");
    }
    ck.optimizer = std::move(st);
  }
  return ck;
}

std::string format_row(const ResultRow& r) {
  std::ostringstream os;
  os << r.dataset << "," << fmt(r.delta_train) << "," << fmt(r.delta_test) << "," << r.n_train << "," << r.seed << ","
     << fmt(r.rel_l1) << "," << fmt(r.l0) << "," << fmt(r.dice) << "," << fmt(r.wall_seconds);
  return os.str();
}

void append_rows(const fs::path& csv, const std::vector<ResultRow>& rows) {
  const bool fresh = !fs::exists(csv);
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  std::ofstream out(csv, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to " + csv.string());
  if (fresh) out << kResultHeader << "\n";
  for (const auto& r : rows) out << format_row(r) << "\n";
}

std::vector<ResultRow> read_rows(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw ConfigError("cannot read " + csv.string());
  std::string line;
  std::getline(in, line);
  if (line != kResultHeader) throw FormatError(csv.string() + ": unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> f;
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 9) throw FormatError(csv.string() + ": malformed row: " + line);
    try {
      rows.push_back({f[0], std::stod(f[1]), std::stod(f[2]), std::stoi(f[3]), std::stoull(f[4]), std::stod(f[5]),
                      std::stod(f[6]), std::stod(f[7]), std::stod(f[8])});
    } catch (const std::logic_error&) {
      throw FormatError(csv.string() + ": malformed row: " + line);
    }
  }
  return rows;
}

std::uint64_t train_noise_seed(std::uint64_t run_seed, std::size_t index, int epoch) {
  return derive_seed(run_seed, {kTrainNoiseStream, index, static_cast<std::uint64_t>(epoch)});
}

std::uint64_t eval_noise_seed(std::uint64_t run_seed, std::size_t index) {
  return derive_seed(run_seed, {kEvalNoiseStream, index});
}

TrainingOutcome run_training(const RunConfig& config, const fs::path& dataset_dir, const fs::path& out_dir,
                             bool resume) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const DatasetManifest manifest = load_manifest(dataset_dir);
  if (!manifest.complete) throw ConfigError("dataset in " + dataset_dir.string() + " is incomplete");
  const int grid = manifest.config.grid;
  config.model.validate(grid);
  const auto train_set = load_split(dataset_dir, manifest, "train", config.train_samples);
  const auto valid_set = load_split(dataset_dir, manifest, "valid");

  fs::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "config.json");
    out << run_config_to_json(config) << "\n";
  }

  const NoiseSpec train_spec = config.noise.train_spec(grid);
  const std::uint64_t seed = config.training.seed;
  TrainHooks hooks;
  if (train_spec.delta > 0.0) {
    hooks.train_input = [train_spec, seed](const RealGrid& k, std::size_t i, int epoch) {
      return perturb_kernel(KernelGrid{k}, train_spec, train_noise_seed(seed, i, epoch)).values;
    };
    hooks.valid_input = [train_spec, seed](const RealGrid& k, std::size_t i, int) {
      return perturb_kernel(KernelGrid{k}, train_spec, eval_noise_seed(seed ^ 0x5a5a, i)).values;
    };
  }
  hooks.on_epoch = [&](const TrainResult& r) {
    write_history(out_dir / "history.csv", r.history);
    save_checkpoint(out_dir / "last", {r.params, r.standardizer, r.optimizer, r.history.back().epoch,
                                       r.history.back().valid_loss});
    if (r.best_epoch() == r.history.back().epoch) {
      save_checkpoint(out_dir / "best", {r.best_params(), r.standardizer, std::nullopt, r.best_epoch(),
                                         r.selector.best_loss()});
    }
  };

  std::optional<TrainResult> state;
  if (resume && fs::exists(out_dir / "last" / "header.json")) {
    Checkpoint last = load_checkpoint(out_dir / "last");
    if (!last.optimizer) throw FormatError("resume checkpoint lacks optimizer state");
    Checkpoint best = load_checkpoint(out_dir / "best");
    TrainResult r{std::move(last.params), {}, std::move(*last.optimizer), std::move(last.standardizer),
                  read_history(out_dir / "history.csv"), false, {}};
    if (static_cast<int>(r.history.size()) != last.epoch + 1) {
      throw FormatError("history and resume checkpoint disagree on the epoch count");
    }
    r.selector.offer(best.epoch, best.valid_loss, best.params);
    state = std::move(r);
  }

  TrainResult result = train(config.model, train_set, valid_set, config.training, hooks, state ? &*state : nullptr);
  write_history(out_dir / "history.csv", result.history);
  if (result.diverged) throw NumericalError("training diverged: " + result.failure);
  if (result.selector.empty()) throw NumericalError("training produced no finite validation loss");
  return {std::move(result), out_dir / "best", seconds_since(t0)};
}

EvalOutcome run_eval(const RunConfig& config, const fs::path& checkpoint_dir, const fs::path& dataset_dir,
                     const fs::path& out_dir, int n_train) {
  const auto t0 = std::chrono::steady_clock::now();
  const Checkpoint ck = load_checkpoint(checkpoint_dir);
  const DatasetManifest manifest = load_manifest(dataset_dir);
  if (!manifest.complete) throw ConfigError("dataset in " + dataset_dir.string() + " is incomplete");
  const int grid = manifest.config.grid;
  try {
    ck.params.config.validate(grid);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto test_set = load_split(dataset_dir, manifest, "test");
  const Standardizer standardizer = resample(ck.standardizer, grid);
  const NoiseSpec spec = config.noise.test_spec(grid);
  const std::uint64_t seed = config.training.seed;
  InputHook hook;
  if (spec.delta > 0.0) {
    hook = [spec, seed](const RealGrid& k, std::size_t i, int) {
      return perturb_kernel(KernelGrid{k}, spec, eval_noise_seed(seed, i)).values;
    };
  }
  EvalOptions opts;
  opts.shape_metrics = manifest.config.distribution == Distribution::Shape;
  EvalOutcome out;
  out.summary = evaluate(fno_predictor(ck.params, standardizer, hook), test_set, opts);
  out.row.dataset = to_string(manifest.config.distribution);
  out.row.delta_train = config.noise.train_delta;
  out.row.delta_test = spec.delta;
  out.row.n_train = n_train > 0 ? n_train : (config.train_samples > 0 ? config.train_samples : manifest.config.counts.train);
  out.row.seed = seed;
  out.row.rel_l1 = out.summary.mean_rel_l1;
  out.row.l0 = out.summary.mean_l0;
  out.row.dice = out.summary.mean_dice;
  out.row.wall_seconds = seconds_since(t0);

  append_rows(out_dir / "metrics.csv", {out.row});
  const fs::path per_sample = out_dir / "per_sample.csv";
  const bool fresh = !fs::exists(per_sample);
  std::ofstream ps(per_sample, std::ios::app);
  if (fresh) ps << "delta_train,delta_test,N,seed,index,rel_l1,l0,dice\n";
  for (std::size_t i = 0; i < out.summary.samples.size(); ++i) {
    const auto& m = out.summary.samples[i];
    ps << fmt(out.row.delta_train) << "," << fmt(out.row.delta_test) << "," << out.row.n_train << "," << seed << ","
       << i << "," << fmt(m.rel_l1) << "," << fmt(m.l0) << "," << fmt(m.dice) << "\n";
  }
  return out;
}

std::vector<ResultRow> sweep_noise(const RunConfig& config, const fs::path& dataset_dir, const fs::path& out_dir) {
  std::vector<ResultRow> rows;
  for (std::uint64_t seed : config.sweep.seeds) {
    for (double dtrain : config.sweep.deltas) {
      RunConfig rc = config;
      rc.training.seed = seed;
      rc.noise.train_delta = dtrain;
      const fs::path run_dir = out_dir / ("seed" + std::to_string(seed) + "_train" + tag(dtrain));
      const TrainingOutcome trained = run_training(rc, dataset_dir, run_dir, true);
      for (double dtest : config.sweep.deltas) {
        if (config.sweep.matched_only && dtest != dtrain) continue;
        rc.noise.test_delta = dtest;
        EvalOutcome ev = run_eval(rc, trained.best_checkpoint, dataset_dir, run_dir);
        ev.row.wall_seconds += trained.wall_seconds;
        append_rows(out_dir / "results.csv", {ev.row});
        rows.push_back(ev.row);
      }
    }
  }
  return rows;
}

std::vector<ResultRow> sweep_samples(const RunConfig& config, const fs::path& dataset_dir, const fs::path& out_dir) {
  std::vector<ResultRow> rows;
  for (std::uint64_t seed : config.sweep.seeds) {
    for (int n : config.sweep.sample_counts) {
      RunConfig rc = config;
      rc.training.seed = seed;
      rc.train_samples = n;
      const fs::path run_dir = out_dir / ("seed" + std::to_string(seed) + "_N" + std::to_string(n));
      const TrainingOutcome trained = run_training(rc, dataset_dir, run_dir, true);
      EvalOutcome ev = run_eval(rc, trained.best_checkpoint, dataset_dir, run_dir, n);
      ev.row.wall_seconds += trained.wall_seconds;
      append_rows(out_dir / "results.csv", {ev.row});
      rows.push_back(ev.row);
    }
  }
  return rows;
}

FitResult fit_rows(const std::vector<ResultRow>& rows, FitAxis axis, LawKind kind, bool matched_only) {
  std::map<double, std::pair<double, int>> groups;
  for (const auto& r : rows) {
    if (axis == FitAxis::DeltaTest && matched_only && r.delta_train != r.delta_test) continue;
    const double x = axis == FitAxis::DeltaTest ? r.delta_test : static_cast<double>(r.n_train);
    if (!(x > 0.0)) continue;
    auto& g = groups[x];
    g.first += r.rel_l1;
    g.second += 1;
  }
  std::vector<double> xs, ys;
  for (const auto& [x, g] : groups) {
    xs.push_back(x);
    ys.push_back(g.first / g.second);
  }
  if (xs.size() < 4) {
    throw ConfigError("fit needs at least 4 distinct positive x values, found " + std::to_string(xs.size()));
  }
  return fit_law(xs, ys, kind);
}

std::string fit_to_json(const FitResult& f) {
  return json{{"kind", to_string(f.kind)}, {"C", f.C},           {"rho", f.rho},
              {"e", f.e},                  {"residual", f.residual}, {"monotone", f.monotone}}
      .dump(2);
}

}  // namespace eit
