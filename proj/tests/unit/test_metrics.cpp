#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "eitlab/metrics.hpp"
#include "eitlab/rng.hpp"

using namespace eit;

namespace {

constexpr int kN = 128;

double cell_area() { return std::pow(2.0 / kN, 2); }

double masked_area(const MaskGrid& m) { return m.cast<double>().sum() * cell_area(); }

RealGrid indicator(auto&& inside) {
  const auto x = cell_centers(kN);
  RealGrid g(kN, kN);
  for (int r = 0; r < kN; ++r) {
    for (int c = 0; c < kN; ++c) g(r, c) = inside(x[c], x[r]) ? 100.0 : 1.0;
  }
  return g;
}

}  // namespace

TEST(RelLp, Examples) {
  const ConductivityField t = phantom(PhantomKind::Realistic, kN);
  for (double p : {1.0, 2.0, 3.5}) {
    EXPECT_EQ(rel_lp_error(t.values, t, p), 0.0);
    EXPECT_NEAR(rel_lp_error(RealGrid(2.0 * t.values), t, p), 1.0, 1e-14);
  }
  // half the masked pixels off by +1 against a unit target
  const ConductivityField one = homogeneous_field(kN);
  RealGrid pred = one.values;
  int count = 0, total = 0;
  for (int r = 0; r < kN; ++r) {
    for (int c = 0; c < kN; ++c) {
      if (!one.mask(r, c)) continue;
      if (total++ % 2 == 0) {
        pred(r, c) += 1.0;
        ++count;
      }
    }
  }
  EXPECT_NEAR(rel_lp_error(pred, one, 1.0), double(count) / total, 1e-15);
  EXPECT_NEAR(rel_lp_error(pred, one, 1.0), 0.5, 1e-3);
  ConductivityField zero = one;
  zero.values.setZero();
  EXPECT_THROW(rel_lp_error(pred, zero, 1.0), std::domain_error);
  EXPECT_THROW(rel_lp_error(pred, one, 0.5), std::invalid_argument);
}

TEST(L0, Examples) {
  const MaskGrid mask = disk_mask(kN);
  const RealGrid a = indicator([](double x, double) { return x < 0; });
  const RealGrid b = indicator([](double x, double) { return x >= 0; });
  EXPECT_EQ(l0_distance(a, a, mask), 0.0);
  EXPECT_NEAR(l0_distance(a, b, mask), masked_area(mask), 1e-12);
  EXPECT_NEAR(l0_distance(a, b, mask), kPi, 0.02);
  const RealGrid empty = indicator([](double, double) { return false; });
  // pixel-count oracle for the half disk
  double half = 0;
  for (int r = 0; r < kN; ++r) {
    for (int c = 0; c < kN; ++c) half += mask(r, c) && a(r, c) > 50;
  }
  EXPECT_NEAR(l0_distance(empty, a, mask), half * cell_area(), 1e-12);
  EXPECT_NEAR(l0_distance(empty, a, mask), kPi / 2, 0.02);
}

TEST(Dice, Examples) {
  const MaskGrid mask = disk_mask(kN);
  const RealGrid a = indicator([](double x, double y) { return x < 0 && y < 0; });
  const RealGrid b = indicator([](double x, double y) { return x > 0 && y > 0; });
  EXPECT_NEAR(dice(a, a, mask), 1.0, 1e-7);
  EXPECT_EQ(dice(a, b, mask), 0.0);
  // quarter disks overlapping in an eighth
  const RealGrid q1 = indicator([](double x, double y) { return y < 0 && x < 0; });
  const RealGrid q2 = indicator([](double x, double y) { return y < -std::abs(x); });
  EXPECT_NEAR(dice(q1, q2, mask), 0.5, 0.01);
  const double d = dice(q1, q2, mask);
  EXPECT_GE(d, 0.0);
  EXPECT_LE(d, 1.0);
}

TEST(Tv, Examples) {
  const MaskGrid mask = disk_mask(kN);
  EXPECT_EQ(total_variation(RealGrid::Constant(kN, kN, 3.0), mask), 0.0);
  const RealGrid step = indicator([](double x, double) { return x >= 0; }) / 99.0;
  const double tv = total_variation(step, mask);
  EXPECT_NEAR(tv, 2.0, 0.1);
  EXPECT_NEAR(total_variation(RealGrid(-2.5 * step), mask), 2.5 * tv, 1e-12);
}

TEST(Metrics, IgnoreValuesOutsideMask) {
  const ConductivityField t = phantom(PhantomKind::ShapeContrast, 64);
  RealGrid p = t.values * 0.9;
  const double r = rel_lp_error(p, t), l = l0_distance(p, t), d = dice(p, t);
  p(0, 0) = 1e9;
  p(63, 0) = -1e9;
  EXPECT_EQ(rel_lp_error(p, t), r);
  EXPECT_EQ(l0_distance(p, t), l);
  EXPECT_EQ(dice(p, t), d);
}

namespace {

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return x;
}

}  // namespace

TEST(FitLaw, ExactPowerData) {
  const auto xs = log_spaced(1e-3, 0.3, 8);
  std::vector<double> ys;
  for (double x : xs) ys.push_back(0.2 + 1.0 * std::pow(x, 0.25));
  const FitResult f = fit_law(xs, ys, LawKind::Power);
  EXPECT_NEAR(f.e, 0.2, 1e-6);
  EXPECT_NEAR(f.C, 1.0, 1e-6);
  EXPECT_NEAR(f.rho, 0.25, 1e-6);
  EXPECT_LT(f.residual, 1e-8);
  EXPECT_TRUE(f.monotone);
}

TEST(FitLaw, ExactSamplePowerData) {
  const std::vector<double> xs = {25, 50, 100, 200, 400, 800};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(0.05 + 2.0 * std::pow(x, -0.5));
  const FitResult f = fit_law(xs, ys, LawKind::SamplePower);
  EXPECT_NEAR(f.rho, 0.5, 1e-6);
  EXPECT_NEAR(f.e, 0.05, 1e-6);
  EXPECT_NEAR(law_value(f, 300.0), 0.05 + 2.0 * std::pow(300.0, -0.5), 1e-8);
}

TEST(FitLaw, LogDataPrefersLogFamily) {
  const auto xs = log_spaced(1e-3, 0.3, 8);
  std::vector<double> ys;
  for (double x : xs) ys.push_back(0.2 + std::pow(std::log(1.0 / x), -0.3));
  EXPECT_LT(fit_law(xs, ys, LawKind::Log).residual, fit_law(xs, ys, LawKind::Power).residual);
  EXPECT_NEAR(fit_law(xs, ys, LawKind::Log).rho, 0.3, 1e-6);
}

TEST(FitLaw, ScaleEquivariant) {
  const auto xs = log_spaced(1e-3, 0.3, 8);
  std::vector<double> ys, scaled;
  Rng rng(3);
  for (double x : xs) ys.push_back((0.2 + std::pow(x, 0.4)) * (1 + 0.02 * rng.normal()));
  for (double y : ys) scaled.push_back(7.0 * y);
  const FitResult a = fit_law(xs, ys, LawKind::Power), b = fit_law(xs, scaled, LawKind::Power);
  EXPECT_NEAR(b.rho, a.rho, 1e-4);
  EXPECT_NEAR(b.C, 7.0 * a.C, 1e-3 * b.C);
  EXPECT_NEAR(b.e, 7.0 * a.e, 1e-3 * b.e + 1e-9);
}

TEST(FitLaw, FlagsNonMonotoneData) {
  const std::vector<double> xs = {0.01, 0.03, 0.1, 0.3};
  const std::vector<double> ys = {0.5, 0.3, 0.6, 0.7};
  const FitResult f = fit_law(xs, ys, LawKind::Power);
  EXPECT_FALSE(f.monotone);
  EXPECT_TRUE(std::isfinite(f.residual));
}

TEST(FitLaw, RejectsBadInput) {
  const std::vector<double> three = {0.1, 0.2, 0.3};
  EXPECT_THROW(fit_law(three, three, LawKind::Power), std::invalid_argument);
  const std::vector<double> xs = {0.1, 0.2, 0.3, 1.5}, ys = {1, 2, 3, 4};
  EXPECT_THROW(fit_law(xs, ys, LawKind::Log), std::invalid_argument);
  const std::vector<double> neg = {-0.1, 0.2, 0.3, 0.4};
  EXPECT_THROW(fit_law(neg, ys, LawKind::Power), std::invalid_argument);
}
