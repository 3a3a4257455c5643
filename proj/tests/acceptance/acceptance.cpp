// Acceptance checks. Each criterion prints one line:
//
//   criterion <k> PASS|FAIL <seconds>s <detail>
//
// Usage: eitlab_acceptance [--workdir DIR] [--only 1,5,12]

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "eitlab/boundary_spectral.hpp"
#include "eitlab/conductivity.hpp"
#include "eitlab/dataset.hpp"
#include "eitlab/experiment.hpp"
#include "eitlab/fno_model.hpp"
#include "eitlab/forward.hpp"
#include "eitlab/metrics.hpp"
#include "eitlab/noise.hpp"
#include "eitlab/patches.hpp"
#include "eitlab/rng.hpp"
#include "eitlab/training.hpp"

using namespace eit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

fs::path g_workdir;

// --- 1. Homogeneous spectrum.

double worst_diagonal_error(const NtDMatrix& m, int cutoff) {
  double worst = 0;
  for (int j = -cutoff; j <= cutoff; ++j) {
    if (j == 0) continue;
    worst = std::max(worst, std::abs(m(j, j) - 1.0 / std::abs(j)) * std::abs(j));
  }
  return worst;
}

Outcome homogeneous_spectrum() {
  const int cutoff = 8, n = 32;
  const DiskMesh m32 = build_mesh(32), m64 = build_mesh(64);
  const NtDMatrix a = assemble_ntd(m32, std::vector<double>(m32.triangles.size(), 1.0), cutoff, n);
  const NtDMatrix b = assemble_ntd(m64, std::vector<double>(m64.triangles.size(), 1.0), cutoff, n);
  double off = 0;
  for (int j = -cutoff; j <= cutoff; ++j) {
    for (int k = -cutoff; k <= cutoff; ++k) {
      if (j != 0 && k != 0 && j != k) off = std::max(off, std::abs(a(j, k)));
    }
  }
  const double e32 = worst_diagonal_error(a, cutoff), e64 = worst_diagonal_error(b, cutoff);
  return {e32 <= 0.02 && off <= 1e-2 && e32 >= 2 * e64,
          "diag rel err R32 " + fmt(e32) + ", R64 " + fmt(e64) + ", max off-diag " + fmt(off)};
}

// --- 2. Radial inclusion.

Outcome radial_inclusion() {
  const double rho = 0.5;
  const std::vector<double> contrasts = {0.5, 2.0, 5.0};
  const DiskMesh mesh = build_mesh(48);
  std::vector<NtDMatrix> fem;
  double worst = 0;
  for (double c : contrasts) {
    auto gamma = [c, rho](double x, double y) { return std::hypot(x, y) < rho ? c : 1.0; };
    fem.push_back(assemble_ntd(mesh, element_conductivity(mesh, gamma), 8, 32));
    for (int j = -8; j <= 8; ++j) {
      if (j == 0) continue;
      const double oracle = radial_ntd_oracle(c, rho, std::abs(j));
      worst = std::max(worst, std::abs(fem.back()(j, j).real() - oracle) / oracle);
    }
  }
  bool monotone = true;
  for (int j = 1; j <= 8; ++j) {
    for (std::size_t i = 0; i + 1 < contrasts.size(); ++i) {
      const double d_oracle = radial_ntd_oracle(contrasts[i + 1], rho, j) - radial_ntd_oracle(contrasts[i], rho, j);
      const double d_fem = fem[i + 1](j, j).real() - fem[i](j, j).real();
      if (d_oracle * d_fem <= 0) monotone = false;
    }
  }
  return {worst <= 0.05 && monotone, "max rel err " + fmt(worst) + (monotone ? ", monotone" : ", not monotone")};
}

// --- 3. Log-sine kernel.

Outcome log_sine_kernel() {
  const int n = 256;
  NtDMatrix m(n);
  for (int j : m.index_set().indices()) m(j, j) = 1.0 / std::abs(j);
  const KernelGrid k = kernel_from_matrix(m);
  double worst = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double x = kTwoPi * (a - b) / n;
      if (std::abs(std::remainder(x, kTwoPi)) < kPi / 4) continue;
      worst = std::max(worst, std::abs(k.values(a, b) + std::log(2 * std::abs(std::sin(x / 2))) / kPi));
    }
  }
  const double at_pi = k.values(n / 2, 0);
  const bool pi_ok = std::abs(at_pi + std::log(2.0) / kPi) <= 0.01;
  return {worst <= 0.01 && pi_ok, "max abs err " + fmt(worst) + ", value at pi " + fmt(at_pi)};
}

// --- 4. Symmetry and reality.

Outcome symmetry_reality() {
  const int n = 32, modes = 16;
  const DiskMesh mesh = build_mesh(24);
  std::vector<ConductivityField> fields;
  for (std::uint64_t s = 0; s < 4; ++s) {
    fields.push_back(sample_shape(derive_seed(7, {s}), n));
    fields.push_back(sample_three_phase(derive_seed(8, {s}), n));
    fields.push_back(sample_lognormal(derive_seed(9, {s}), n));
  }
  fields.push_back(phantom(PhantomKind::Realistic, n));
  fields.push_back(homogeneous_field(n));
  double herm = 0, imag = 0;
  for (const auto& f : fields) {
    const NtDMatrix m = assemble_ntd(mesh, f, modes, n);
    herm = std::max(herm, m.hermitian_residual());
    imag = std::max(imag, synthesize_kernel(symmetrize_reality(m).matrix).imaginary_residue);
  }
  return {herm <= 1e-2 && imag <= 1e-12, std::to_string(fields.size()) + " matrices, max hermitian residual " +
                                             fmt(herm) + ", max imaginary residue " + fmt(imag)};
}

// --- 5. Patch left inverse.

KernelGrid trig_kernel(int n, double phase) {
  KernelGrid k;
  k.values.resize(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double t = kTwoPi * a / n, s = kTwoPi * b / n;
      k.values(a, b) = std::cos(8 * t + phase) * std::sin(5 * s) + 0.4 * std::sin(3 * t - 8 * s) +
                       0.2 * std::cos(t + 2 * s + phase) + 0.1;
    }
  }
  return k;
}

Outcome patch_left_inverse() {
  const Atlas atlas = build_atlas();
  auto err = [&](const KernelGrid& h) {
    return (local_to_global(global_to_local(h, atlas), atlas).values - h.values).norm() / h.values.norm();
  };
  double worst256 = 0, worst_ratio = std::numeric_limits<double>::infinity();
  for (double phase : {0.0, 0.7, 2.1}) {
    const double e256 = err(trig_kernel(256, phase)), e128 = err(trig_kernel(128, phase));
    worst256 = std::max(worst256, e256);
    worst_ratio = std::min(worst_ratio, e128 / e256);
  }
  return {worst256 <= 1e-3 && worst_ratio >= 2.0,
          "max rel err at 256 " + fmt(worst256) + ", min error ratio 128/256 " + fmt(worst_ratio)};
}

// --- 6. Gradient check.

struct GradientReport {
  double worst = 0;
  int checked = 0, skipped = 0;
};

GradientReport fno_gradient_error(const FnoConfig& cfg, int count, std::uint64_t seed) {
  const int n = 16;
  FnoParams p = init_params(cfg, seed);
  std::vector<RealGrid> in;
  std::vector<ConductivityField> tgt;
  for (int s = 0; s < 2; ++s) {
    RealGrid g(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const double t = kTwoPi * a / n, u = kTwoPi * b / n;
        g(a, b) = std::cos(t - u + s) + 0.5 * std::sin(2 * t) - 0.3 * std::cos(u + 2.0 * s);
      }
    }
    in.push_back(g);
    tgt.push_back(sample_shape(derive_seed(seed, {static_cast<std::uint64_t>(s)}), n));
  }
  std::vector<const RealGrid*> ip = {&in[0], &in[1]};
  std::vector<const ConductivityField*> tp = {&tgt[0], &tgt[1]};
  std::vector<double> grad;
  batch_loss_and_gradient(p, ip, tp, grad);
  auto loss = [&] { return 0.5 * (relative_l1_loss(fno_forward(p, in[0]), tgt[0]) +
                                  relative_l1_loss(fno_forward(p, in[1]), tgt[1])); };
  // Which side of every ReLU and |.| kink each sample sits on. A central
  // difference is only a valid oracle when this pattern is constant over the stencil.
  auto pattern = [&] {
    std::vector<bool> bits;
    for (int s = 0; s < 2; ++s) {
      ForwardCache cache;
      const RealGrid out = fno_forward(p, in[s], &cache);
      for (std::size_t l = 0; l + 1 < cache.pre_act.size(); ++l) {
        for (Eigen::Index i = 0; i < cache.pre_act[l].size(); ++i) bits.push_back(cache.pre_act[l].data()[i] > 0);
      }
      for (Eigen::Index i = 0; i < cache.mlp_pre.size(); ++i) bits.push_back(cache.mlp_pre.data()[i] > 0);
      for (Eigen::Index i = 0; i < out.size(); ++i) bits.push_back(out.data()[i] > tgt[s].values.data()[i]);
    }
    return bits;
  };

  // one parameter from every tensor first, then uniform picks
  Rng rng(seed ^ 0xfd);
  std::vector<std::size_t> picks;
  const ParamLayout layout = p.layout();
  for (const auto& t : layout.tensors()) picks.push_back(t.offset + rng.below(t.size()));
  while (picks.size() < 4 * static_cast<std::size_t>(count)) picks.push_back(rng.below(p.values.size()));

  GradientReport rep;
  for (std::size_t i = 0; i < picks.size(); ++i) {
    if (rep.checked >= count && i >= layout.tensors().size()) break;
    const std::size_t k = picks[i];
    const double keep = p.values[k], h = 1e-5;
    p.values[k] = keep + h;
    const double up = loss();
    const auto pat_up = pattern();
    p.values[k] = keep - h;
    const double down = loss();
    const auto pat_down = pattern();
    p.values[k] = keep;
    if (pat_up != pat_down) {
      ++rep.skipped;
      continue;
    }
    const double fd = (up - down) / (2 * h);
    rep.worst = std::max(rep.worst, std::abs(fd - grad[k]) / std::max({std::abs(fd), std::abs(grad[k]), 1e-6}));
    ++rep.checked;
  }
  return rep;
}

Outcome fno_gradient() {
  FnoConfig a;
  a.modes = 2;
  a.width = 4;
  a.mlp_width = 8;
  FnoConfig b;
  b.layers = 3;
  b.modes = 4;
  b.width = 6;
  b.mlp_width = 12;
  const GradientReport ra = fno_gradient_error(a, 40, 11), rb = fno_gradient_error(b, 40, 12);
  const bool ok = std::max(ra.worst, rb.worst) <= 1e-4 && std::min(ra.checked, rb.checked) >= 25;
  auto describe = [](const GradientReport& r) {
    return std::to_string(r.checked) + " checked (" + std::to_string(r.skipped) + " stencils crossing a kink skipped), max rel err " + fmt(r.worst);
  };
  return {ok, "config A " + describe(ra) + "; config B " + describe(rb)};
}

// --- 7. Overfit.

DatasetConfig shape_dataset(int train, int valid, int test) {
  DatasetConfig d;
  d.distribution = Distribution::Shape;
  d.counts = {train, valid, test};
  d.grid = 32;
  d.modes = 16;
  d.rings = 32;
  d.seed = 2024;
  return d;
}

Outcome overfit() {
  const fs::path dir = g_workdir / "overfit";
  fs::remove_all(dir);
  const auto manifest = generate_dataset(shape_dataset(8, 1, 1), dir / "data");
  const auto train_set = load_split(dir / "data", manifest, "train");
  TrainConfig tc;
  tc.batch_size = 8;
  tc.epochs = 500;  // one step per epoch
  tc.seed = 3;
  const TrainResult r = train(FnoConfig{}, train_set, train_set, tc);
  if (r.diverged) return {false, "training diverged: " + r.failure};
  const double final_loss = validation_loss(r.params, r.standardizer, train_set);
  return {final_loss <= 0.05, std::to_string(r.history.back().step) + " steps, train rel L1 " + fmt(final_loss)};
}

// --- 8. Learning signal.

fs::path desk_dataset() {
  const fs::path dir = g_workdir / "shape_200";
  generate_dataset(shape_dataset(200, 50, 50), dir);
  return dir;
}

RunConfig desk_run() {
  RunConfig rc;
  rc.dataset = shape_dataset(200, 50, 50);
  rc.training.epochs = 30;
  return rc;
}

Outcome learning_signal() {
  fs::remove_all(g_workdir / "shape_200");
  fs::remove_all(g_workdir / "learning");
  const fs::path data = desk_dataset();
  const RunConfig rc = desk_run();
  const TrainingOutcome trained = run_training(rc, data, g_workdir / "learning" / "run");
  const EvalOutcome ev = run_eval(rc, trained.best_checkpoint, data, g_workdir / "learning" / "eval");

  const auto manifest = load_manifest(data);
  const auto test_set = load_split(data, manifest, "test");
  const int n = manifest.config.grid;
  const Predictor background = [n](const RealGrid&, std::size_t) {
    RealGrid g = RealGrid::Zero(n, n);
    const MaskGrid mask = disk_mask(n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) g(r, c) = mask(r, c) ? 1.0 : 0.0;
    }
    return g;
  };
  const EvalSummary base = evaluate(background, test_set);
  const double ratio = ev.summary.mean_rel_l1 / base.mean_rel_l1;
  return {ratio <= 0.8 && ev.summary.mean_dice >= 0.5,
          "test rel L1 " + fmt(ev.summary.mean_rel_l1) + " vs background " + fmt(base.mean_rel_l1) + " (ratio " +
              fmt(ratio) + "), mean Dice " + fmt(ev.summary.mean_dice)};
}

// --- 9. Noise trend.

Outcome noise_trend() {
  fs::remove_all(g_workdir / "noise_trend");
  const fs::path data = desk_dataset();
  RunConfig rc = desk_run();
  rc.sweep.deltas = {0.0, 0.03, 0.10};
  rc.sweep.seeds = {0, 1, 2};
  rc.sweep.matched_only = true;
  const auto rows = sweep_noise(rc, data, g_workdir / "noise_trend");
  std::vector<double> mean, sd;
  std::string detail;
  for (double d : rc.sweep.deltas) {
    std::vector<double> v;
    for (const auto& r : rows) {
      if (r.delta_test == d) v.push_back(r.rel_l1);
    }
    const double mu = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double var = 0;
    for (double x : v) var += (x - mu) * (x - mu);
    mean.push_back(mu);
    sd.push_back(std::sqrt(var / (v.size() - 1)));
    detail += (detail.empty() ? "" : ", ") + std::string("delta ") + fmt(d) + ": " + fmt(mu) + " +- " + fmt(sd.back());
  }
  bool ok = true;
  for (std::size_t i = 0; i + 1 < mean.size(); ++i) ok = ok && mean[i + 1] >= mean[i] - 2 * sd[i];
  return {ok, detail};
}

// --- 10. Forward continuity.

Outcome forward_continuity() {
  const int n = 32, modes = 16;
  const DiskMesh mesh = build_mesh(32);
  const ConductivityField shape = sample_shape(derive_seed(5, {10}), n);
  const KernelGrid background = simulate_sample(mesh, homogeneous_field(n), modes).kernel;
  auto distance = [&](double t) {
    ConductivityField g = shape;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (g.mask(r, c)) g.values(r, c) = 1.0 + t * (shape.values(r, c) - 1.0);
      }
    }
    return torus_l2_norm(simulate_sample(mesh, g, modes).kernel.values - background.values);
  };
  std::vector<double> d;
  std::string detail;
  for (double t : {1.0, 0.5, 0.25, 0.125, 0.0}) {
    d.push_back(distance(t));
    detail += (detail.empty() ? "" : ", ") + std::string("t=") + fmt(t) + ": " + fmt(d.back());
  }
  bool ok = d.back() <= 1e-12 * d.front();
  for (std::size_t i = 0; i + 1 < d.size(); ++i) ok = ok && d[i + 1] < d[i];
  return {ok, detail};
}

// --- 11. Law-fit recovery.

Outcome law_fit_recovery() {
  const double rho = 0.25, e = 0.2, C = 1.0;
  std::vector<double> xs;
  for (int i = 0; i < 8; ++i) xs.push_back(std::pow(10.0, -3.0 + 2.7 * i / 7.0));
  int rho_ok[2] = {0, 0}, family_ok[2] = {0, 0};
  for (int trial = 0; trial < 100; ++trial) {
    for (int which = 0; which < 2; ++which) {
      const LawKind truth = which == 0 ? LawKind::Power : LawKind::Log;
      const FitResult law{truth, C, rho, e, 0.0, true};
      Rng rng(derive_seed(0x1a3, {static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(which)}));
      std::vector<double> ys;
      for (double x : xs) ys.push_back(law_value(law, x) * (1.0 + 0.05 * rng.normal()));
      const FitResult power = fit_law(xs, ys, LawKind::Power), log = fit_law(xs, ys, LawKind::Log);
      const FitResult& fit = which == 0 ? power : log;
      const FitResult& other = which == 0 ? log : power;
      if (std::abs(fit.rho - rho) <= 0.15 * rho) ++rho_ok[which];
      if (fit.residual < other.residual) ++family_ok[which];
    }
  }
  const bool ok = std::min(rho_ok[0], rho_ok[1]) >= 90 && std::min(family_ok[0], family_ok[1]) >= 90;
  return {ok, "rho within 15%: power " + std::to_string(rho_ok[0]) + "/100, log " + std::to_string(rho_ok[1]) +
                  "/100; correct family: power " + std::to_string(family_ok[0]) + "/100, log " +
                  std::to_string(family_ok[1]) + "/100"};
}

// --- 12. Noise statistics.

Outcome noise_statistics() {
  NoiseSpec spec;
  spec.grid_size = 32;
  spec.delta = 1.0;
  const double sum = noise_coeff_sum(spec);
  double mean_sq = 0;
  for (std::uint64_t s = 0; s < 200; ++s) mean_sq += std::pow(torus_l2_norm(sample_noise_field(spec, s).values), 2);
  mean_sq /= 200;
  spec.law = NoiseLaw::UniformBounded;
  double worst = 0, mean_sq_u = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const double norm = torus_l2_norm(sample_noise_field(spec, 1000 + s).values);
    worst = std::max(worst, norm);
    mean_sq_u += norm * norm / 200;
  }
  const double rel = std::abs(mean_sq / sum - 1), rel_u = std::abs(mean_sq_u / sum - 1);
  const double bound = std::sqrt(3 * sum);
  return {rel <= 0.1 && rel_u <= 0.1 && worst <= bound,
          "E|xi|^2 rel dev gaussian " + fmt(rel) + ", uniform " + fmt(rel_u) + "; max uniform norm " + fmt(worst) +
              " vs bound " + fmt(bound)};
}

struct Criterion {
  int id;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string workdir = "acceptance_work";
  std::vector<int> only;
  app.add_option("--workdir", workdir, "scratch directory");
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  g_workdir = fs::absolute(workdir);
  fs::create_directories(g_workdir);

  const std::vector<Criterion> criteria = {
      {1, 120, homogeneous_spectrum},    {2, 180, radial_inclusion},  {3, 10, log_sine_kernel},
      {4, 60, symmetry_reality},         {5, 30, patch_left_inverse}, {6, 60, fno_gradient},
      {7, 300, overfit},                 {8, 1200, learning_signal},  {9, 3600, noise_trend},
      {10, 300, forward_continuity},     {11, 10, law_fit_recovery},  {12, 30, noise_statistics},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_seconds) {
      o.pass = false;
      o.detail += "; over time budget of " + fmt(c.budget_seconds) + "s";
    }
    std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << " " << fmt(secs) << "s " << o.detail
              << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
