#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "eitlab/dataset.hpp"
#include "eitlab/training.hpp"

using namespace eit;

namespace {

std::vector<Sample> small_set(int count, std::uint64_t seed) {
  const DiskMesh mesh = build_mesh(8);
  std::vector<Sample> out;
  for (int i = 0; i < count; ++i) {
    Sample s;
    s.gamma = sample_shape(seed + i, 16);
    s.kernel = simulate_sample(mesh, s.gamma, 4).kernel;
    out.push_back(std::move(s));
  }
  return out;
}

FnoConfig tiny() {
  FnoConfig c;
  c.modes = 4;
  c.width = 6;
  c.mlp_width = 16;
  return c;
}

TrainConfig quick(int epochs) {
  TrainConfig t;
  t.epochs = epochs;
  t.batch_size = 3;
  t.seed = 4;
  return t;
}

}  // namespace

TEST(Standardizer, ZeroMeanUnitVarianceWithFloor) {
  RealGrid a = RealGrid::Constant(4, 4, 1.0), b = RealGrid::Constant(4, 4, 3.0);
  a(0, 0) = b(0, 0) = 7.0;  // constant across samples
  std::vector<const RealGrid*> in = {&a, &b};
  const auto s = Standardizer::fit(in);
  EXPECT_EQ(s.stddev(0, 0), Standardizer::kFloor);
  EXPECT_NEAR(s.apply(a)(1, 1), -1.0, 1e-15);
  EXPECT_NEAR(s.apply(b)(1, 1), 1.0, 1e-15);
  EXPECT_EQ(s.apply(a)(0, 0), 0.0);
  EXPECT_THROW(s.apply(RealGrid::Zero(8, 8)), std::invalid_argument);
}

TEST(Train, SameSeedSameHistory) {
  const auto tr = small_set(6, 10), va = small_set(2, 50);
  const auto a = train(tiny(), tr, va, quick(3));
  const auto b = train(tiny(), tr, va, quick(3));
  ASSERT_EQ(a.history.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.history[i].train_loss, b.history[i].train_loss);
    EXPECT_EQ(a.history[i].valid_loss, b.history[i].valid_loss);
  }
  EXPECT_EQ(a.params.values, b.params.values);
  EXPECT_EQ(a.history[2].step, 6);
  EXPECT_NEAR(a.history[1].lr, cosine_lr(8e-3, 1, 3), 1e-18);
}

TEST(Train, ResumeMatchesUninterruptedRun) {
  const auto tr = small_set(6, 10), va = small_set(2, 50);
  const auto full = train(tiny(), tr, va, quick(4));
  // run two epochs by capping steps, then continue
  TrainConfig two = quick(4);
  two.max_steps = 4;
  const TrainResult partial = train(tiny(), tr, va, two);
  ASSERT_EQ(partial.history.size(), 2u);
  const auto resumed = train(tiny(), tr, va, quick(4), {}, &partial);
  ASSERT_EQ(resumed.history.size(), 4u);
  EXPECT_EQ(resumed.params.values, full.params.values);
  EXPECT_EQ(resumed.history.back().valid_loss, full.history.back().valid_loss);
  EXPECT_EQ(resumed.best_epoch(), full.best_epoch());
}

TEST(Train, DivergenceIsReportedWithHistory) {
  const auto tr = small_set(4, 10), va = small_set(2, 50);
  TrainHooks hooks;
  hooks.train_input = [](const RealGrid& k, std::size_t, int epoch) {
    return epoch == 1 ? RealGrid(k.array() * std::numeric_limits<double>::quiet_NaN()) : k;
  };
  const auto r = train(tiny(), tr, va, quick(3), hooks);
  EXPECT_TRUE(r.diverged);
  EXPECT_EQ(r.history.size(), 1u);
  EXPECT_FALSE(r.failure.empty());
}

TEST(Train, RejectsEmptySets) {
  const auto tr = small_set(2, 1);
  EXPECT_THROW(train(tiny(), tr, {}, quick(1)), std::invalid_argument);
}

TEST(CheckpointSelector, ReturnsArgminEpoch) {
  CheckpointSelector sel;
  const std::vector<double> losses = {0.9, 0.7, 0.4, 0.5, 0.45, 0.6};
  for (int e = 0; e < static_cast<int>(losses.size()); ++e) {
    FnoParams p(tiny());
    std::fill(p.values.begin(), p.values.end(), double(e));
    sel.offer(e, losses[e], p);
  }
  EXPECT_EQ(sel.best_epoch(), 2);
  EXPECT_EQ(sel.best().values.front(), 2.0);
  EXPECT_EQ(sel.best_loss(), 0.4);
}

TEST(CheckpointSelector, IgnoresNonFinite) {
  CheckpointSelector sel;
  FnoParams p(tiny());
  sel.offer(0, std::nan(""), p);
  EXPECT_TRUE(sel.empty());
  EXPECT_THROW(sel.best(), std::logic_error);
}

TEST(Evaluate, PerfectAndConstantPredictors) {
  const auto test = small_set(5, 100);
  const auto perfect = evaluate([&](const RealGrid&, std::size_t i) { return test[i].gamma.values; }, test);
  EXPECT_EQ(perfect.mean_rel_l1, 0.0);
  EXPECT_NEAR(perfect.mean_dice, 1.0, 1e-7);
  EXPECT_EQ(perfect.mean_l0, 0.0);

  const auto ones = evaluate([](const RealGrid& k, std::size_t) { return RealGrid(RealGrid::Ones(k.rows(), k.cols())); },
                             test);
  double oracle = 0;
  for (const auto& s : test) {
    double num = 0, den = 0;
    for (int r = 0; r < 16; ++r) {
      for (int c = 0; c < 16; ++c) {
        if (!s.gamma.mask(r, c)) continue;
        num += std::abs(s.gamma.values(r, c) - 1.0);
        den += std::abs(s.gamma.values(r, c));
      }
    }
    oracle += num / den;
  }
  EXPECT_NEAR(ones.mean_rel_l1, oracle / test.size(), 1e-14);
}

TEST(Evaluate, OrderInvariant) {
  auto test = small_set(6, 200);
  auto pred = [](const RealGrid& k, std::size_t) { return RealGrid((k.array() * 40.0 + 50.0).matrix()); };
  const auto a = evaluate(pred, test);
  std::reverse(test.begin(), test.end());
  const auto b = evaluate(pred, test);
  EXPECT_NEAR(a.mean_rel_l1, b.mean_rel_l1, 1e-14);
  EXPECT_NEAR(a.mean_dice, b.mean_dice, 1e-14);
  EXPECT_NEAR(a.mean_l0, b.mean_l0, 1e-14);
}
