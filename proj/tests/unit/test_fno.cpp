#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eitlab/fno_model.hpp"
#include "eitlab/optimizer.hpp"
#include "eitlab/rng.hpp"
#include "eitlab/training.hpp"

using namespace eit;

namespace {

FnoConfig tiny(int modes, int width, int mlp = 8) {
  FnoConfig c;
  c.modes = modes;
  c.width = width;
  c.mlp_width = mlp;
  return c;
}

RealGrid smooth_input(int n, double phase = 0.0) {
  RealGrid g(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double t = kTwoPi * a / n, s = kTwoPi * b / n;
      g(a, b) = std::cos(t - s + phase) + 0.5 * std::sin(2 * t) - 0.3 * std::cos(s + 2 * phase);
    }
  }
  return g;
}

ConductivityField two_level_target(int n, double cx) {
  ConductivityField f = homogeneous_field(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double x = -1 + (2.0 * c + 1) / n, y = -1 + (2.0 * r + 1) / n;
      if (f.mask(r, c) && std::hypot(x - cx, y) < 0.4) f.values(r, c) = 3.0;
    }
  }
  return f;
}

double batch_loss(const FnoParams& p, const std::vector<RealGrid>& in, const std::vector<ConductivityField>& tgt) {
  double s = 0;
  for (std::size_t i = 0; i < in.size(); ++i) s += relative_l1_loss(fno_forward(p, in[i]), tgt[i]);
  return s / in.size();
}

// Max relative error of the analytic gradient against central differences
// (step 1e-5) on `count` random parameters; entries below 1e-6 in both are
// compared in absolute terms.
double gradient_check(const FnoConfig& cfg, int count, std::uint64_t seed, const std::string& only = "") {
  FnoParams p = init_params(cfg, seed);
  const int n = 16;
  std::vector<RealGrid> in = {smooth_input(n, 0.0), smooth_input(n, 1.3)};
  std::vector<ConductivityField> tgt = {two_level_target(n, 0.2), two_level_target(n, -0.3)};
  std::vector<const RealGrid*> ip = {&in[0], &in[1]};
  std::vector<const ConductivityField*> tp = {&tgt[0], &tgt[1]};
  std::vector<double> grad;
  batch_loss_and_gradient(p, ip, tp, grad);

  std::size_t lo = 0, hi = p.values.size();
  if (!only.empty()) {
    const auto t = p.layout().tensor(only);
    lo = t.offset;
    hi = t.offset + t.size();
  }
  Rng rng(seed + 99);
  double worst = 0;
  for (int i = 0; i < count; ++i) {
    const std::size_t k = lo + rng.below(hi - lo);
    const double keep = p.values[k], h = 1e-5;
    p.values[k] = keep + h;
    const double up = batch_loss(p, in, tgt);
    p.values[k] = keep - h;
    const double down = batch_loss(p, in, tgt);
    p.values[k] = keep;
    const double fd = (up - down) / (2 * h);
    const double denom = std::max({std::abs(fd), std::abs(grad[k]), 1e-6});
    worst = std::max(worst, std::abs(fd - grad[k]) / denom);
  }
  return worst;
}

RealGrid harmonic(int P, int k1, int k2) {
  RealGrid h(1, P * P);
  for (int a = 0; a < P; ++a) {
    for (int b = 0; b < P; ++b) h(0, a * P + b) = std::cos(kTwoPi * (double(k1) * a + double(k2) * b) / P);
  }
  return h;
}

}  // namespace

TEST(FnoConfig, ParameterCountByHand) {
  const FnoConfig c = tiny(2, 4, 8);
  const std::size_t in = 5, w = 4, m = 2, mlp = 8;
  const std::size_t lift = in * w + w;
  const std::size_t layer = 2 * (m * m) * w * w + w * w + w;
  const std::size_t proj = mlp * w + mlp + mlp * 1 + 1;
  EXPECT_EQ(parameter_count(c), lift + 2 * layer + proj);
  EXPECT_EQ(parameter_count(c), 369u);
  EXPECT_EQ(parameter_count(FnoConfig{}), 1344897u);
}

TEST(FnoConfig, Validation) {
  EXPECT_THROW(tiny(0, 4).validate(), std::invalid_argument);
  EXPECT_THROW(tiny(12, 4).validate(16), std::invalid_argument);
  EXPECT_NO_THROW(tiny(8, 4).validate(16));
  EXPECT_EQ(FnoConfig{}.padding(32), 4);
  EXPECT_EQ(FnoConfig{}.padding(33), 5);
}

TEST(SpectralConv, HarmonicWithinCutoffPassesThrough) {
  const int P = 16, modes = 4;
  const SpectralBasis basis(P, modes);
  std::vector<double> re(modes * modes, 1.0), im(modes * modes, 0.0);
  for (auto [k1, k2] : {std::pair{1, 2}, std::pair{-1, 3}, std::pair{2, 1}, std::pair{0, 0}, std::pair{1, 0}}) {
    const RealGrid h = harmonic(P, k1, k2);
    const RealGrid y = spectral_conv(basis, h, re, im, 1);
    EXPECT_LT((y - h).cwiseAbs().maxCoeff(), 1e-12) << k1 << "," << k2;
  }
}

TEST(SpectralConv, HarmonicAboveCutoffVanishes) {
  const int P = 16, modes = 4;
  const SpectralBasis basis(P, modes);
  std::vector<double> re(modes * modes, 1.0), im(modes * modes, 0.5);
  for (auto [k1, k2] : {std::pair{0, 4}, std::pair{3, 1}, std::pair{-2, 2}, std::pair{5, 6}}) {
    const RealGrid y = spectral_conv(basis, harmonic(P, k1, k2), re, im, 1);
    EXPECT_LT(y.cwiseAbs().maxCoeff(), 1e-12) << k1 << "," << k2;
  }
}

TEST(SpectralConv, ImaginaryWeightShiftsPhase) {
  // multiplying mode (k1,k2) by i turns cos into -sin
  const int P = 16, modes = 4;
  const SpectralBasis basis(P, modes);
  std::vector<double> re(modes * modes, 0.0), im(modes * modes, 1.0);
  const RealGrid y = spectral_conv(basis, harmonic(P, 1, 2), re, im, 1);
  for (int a = 0; a < P; ++a) {
    for (int b = 0; b < P; ++b) EXPECT_NEAR(y(0, a * P + b), -std::sin(kTwoPi * (a + 2.0 * b) / P), 1e-12);
  }
}

TEST(SpectralConv, Linear) {
  const int P = 12, modes = 4, C = 3;
  const SpectralBasis basis(P, modes);
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  std::vector<double> re(modes * modes * C * C), im(re.size());
  for (auto& v : re) v = nd(gen);
  for (auto& v : im) v = nd(gen);
  RealGrid h1(C, P * P), h2(C, P * P);
  for (Eigen::Index i = 0; i < h1.size(); ++i) {
    h1.data()[i] = nd(gen);
    h2.data()[i] = nd(gen);
  }
  const RealGrid lhs = spectral_conv(basis, RealGrid(1.7 * h1 - h2), re, im, C);
  const RealGrid rhs = 1.7 * spectral_conv(basis, h1, re, im, C) - spectral_conv(basis, h2, re, im, C);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SpectralConv, RejectsSmallGrid) { EXPECT_THROW(SpectralBasis(6, 4), std::invalid_argument); }

TEST(FnoForward, ConstantPath) {
  FnoParams p(tiny(2, 4));
  p.tensor("proj2_b")[0] = 2.5;
  const RealGrid out = fno_forward(p, smooth_input(16));
  const MaskGrid mask = disk_mask(16);
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) EXPECT_EQ(out(r, c), mask(r, c) ? 2.5 : 0.0);
  }
}

TEST(FnoForward, ZeroOutsideDiskAndPure) {
  const FnoParams p = init_params(tiny(4, 8), 3);
  const RealGrid in = smooth_input(16);
  const RealGrid a = fno_forward(p, in), b = fno_forward(p, in);
  EXPECT_EQ((a - b).norm(), 0.0);
  const MaskGrid mask = disk_mask(16);
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) {
      if (!mask(r, c)) { EXPECT_EQ(a(r, c), 0.0); }
    }
  }
  EXPECT_GT(a.norm(), 0.0);
}

TEST(FnoForward, RejectsNonSquareInput) {
  const FnoParams p = init_params(tiny(2, 4), 1);
  EXPECT_THROW(fno_forward(p, RealGrid::Zero(16, 12)), std::invalid_argument);
}

TEST(FnoForward, ResolutionTransfer) {
  const FnoParams p = init_params(tiny(4, 8, 16), 7);
  const RealGrid coarse = fno_forward(p, smooth_input(32));
  const RealGrid fine = fno_forward(p, smooth_input(64));
  const MaskGrid mc = disk_mask(32), mf = disk_mask(64);
  double num = 0, den = 0;
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) {
      if (!mc(r, c) || !mf(2 * r, 2 * c)) continue;
      num += std::pow(coarse(r, c) - fine(2 * r, 2 * c), 2);
      den += std::pow(fine(2 * r, 2 * c), 2);
    }
  }
  EXPECT_LT(std::sqrt(num / den), 0.05);
}

TEST(Loss, Examples) {
  const auto t = two_level_target(16, 0.1);
  EXPECT_EQ(relative_l1_loss(t.values, t), 0.0);
  const double l1 = t.values.cwiseAbs().sum() * std::pow(2.0 / 16, 2);
  EXPECT_NEAR(relative_l1_loss(RealGrid::Zero(16, 16), t), l1 / (l1 + 1e-8), 1e-15);
  RealGrid pred = t.values;
  pred(5, 5) += 0.5;
  const double base = relative_l1_loss(pred, t);
  EXPECT_GT(base, 0.0);
  pred(0, 0) = 1e6;  // outside the disk
  EXPECT_EQ(relative_l1_loss(pred, t), base);
}

TEST(Backward, ZeroSignalGivesZeroSpectralGradient) {
  FnoConfig cfg = tiny(2, 4);
  cfg.grid_concat = false;
  FnoParams p = init_params(cfg, 2);
  for (auto name : {"lift_b", "layer0_b", "layer1_b"}) {
    for (double& v : p.tensor(name)) v = 0.0;
  }
  ConductivityField zero = homogeneous_field(16);
  zero.values.setZero();
  const RealGrid in = RealGrid::Zero(16, 16);
  std::vector<const RealGrid*> ip = {&in};
  std::vector<const ConductivityField*> tp = {&zero};
  std::vector<double> grad;
  batch_loss_and_gradient(p, ip, tp, grad);
  const ParamLayout layout(cfg);
  for (auto name : {"layer0_spec_re", "layer0_spec_im", "layer1_spec_re", "layer1_spec_im"}) {
    const auto& t = layout.tensor(name);
    for (std::size_t i = t.offset; i < t.offset + t.size(); ++i) EXPECT_EQ(grad[i], 0.0);
  }
}

class GradientCheck : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  const auto [modes, width] = GetParam();
  EXPECT_LE(gradient_check(tiny(modes, width), 25, 11 + modes * width), 1e-4);
}

INSTANTIATE_TEST_SUITE_P(Configs, GradientCheck,
                         ::testing::Values(std::pair{2, 4}, std::pair{2, 8}, std::pair{4, 4}, std::pair{4, 8}));

TEST(Backward, SpectralWeightsMatchCentralDifferences) {
  EXPECT_LE(gradient_check(tiny(4, 4), 25, 5, "layer0_spec_im"), 1e-4);
  EXPECT_LE(gradient_check(tiny(4, 4), 25, 6, "layer1_spec_re"), 1e-4);
}

TEST(Backward, FrozenTensorStillHasGradient) {
  // The update mask does not affect gradient computation.
  EXPECT_LE(gradient_check(tiny(2, 4), 10, 8, "lift_w"), 1e-4);
  FnoParams p = init_params(tiny(2, 4), 8);
  const auto before = p.values;
  TrainConfig tc;
  tc.frozen = {"lift_w"};
  std::vector<double> grad(p.values.size(), 1.0);
  std::vector<std::uint8_t> mask(p.values.size(), 1);
  const auto t = p.layout().tensor("lift_w");
  std::fill_n(mask.begin() + t.offset, t.size(), 0);
  OptimizerState st(p.values.size());
  adamw_step(st, p.values, grad, 1e-2, AdamWConfig{}, mask);
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    const bool frozen = i >= t.offset && i < t.offset + t.size();
    if (frozen) {
      EXPECT_EQ(p.values[i], before[i]);
    } else {
      EXPECT_NE(p.values[i], before[i]);
    }
  }
}

TEST(AdamW, ZeroGradientZeroDecayIsIdentity) {
  std::vector<double> p = {1.0, -2.0, 3.0}, g(3, 0.0);
  OptimizerState st(3);
  AdamWConfig cfg;
  cfg.weight_decay = 0.0;
  adamw_step(st, p, g, 1e-2, cfg);
  EXPECT_EQ(p, (std::vector<double>{1.0, -2.0, 3.0}));
  EXPECT_EQ(st.step, 1);
}

TEST(AdamW, CosineEndpoints) {
  EXPECT_EQ(cosine_lr(8e-3, 0, 250), 8e-3);
  EXPECT_EQ(cosine_lr(8e-3, 250, 250), 0.0);
  EXPECT_NEAR(cosine_lr(8e-3, 125, 250), 4e-3, 1e-18);
}

TEST(AdamW, FirstStepByHand) {
  std::vector<double> p = {0.5, -1.0, 2.0, 0.0}, g = {0.3, -2e-9, 4.0, 0.0};
  OptimizerState st(4);
  AdamWConfig cfg;
  cfg.weight_decay = 0.0;
  const double lr = 8e-3;
  adamw_step(st, p, g, lr, cfg);
  const std::vector<double> start = {0.5, -1.0, 2.0, 0.0};
  for (int i = 0; i < 4; ++i) {
    // m = 0.1 g, v = 0.001 g^2; bias corrected: m/0.1 = g, v/0.001 = g^2
    const double expected = start[i] - lr * g[i] / (std::abs(g[i]) + cfg.eps);
    EXPECT_NEAR(p[i], expected, 1e-15);
  }
  // decoupled decay
  std::vector<double> q = {1.0}, zero = {0.0};
  OptimizerState s2(1);
  AdamWConfig c2;
  c2.weight_decay = 0.1;
  adamw_step(s2, q, zero, 0.5, c2);
  EXPECT_NEAR(q[0], 1.0 - 0.5 * 0.1, 1e-15);
}
