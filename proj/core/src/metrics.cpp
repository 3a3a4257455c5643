#include "eitlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace eit {
namespace {

void check_shapes(const RealGrid& a, const RealGrid& b, const MaskGrid& mask) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != mask.rows() || a.cols() != mask.cols()) {
    throw std::invalid_argument("metric: grid shapes differ");
  }
}

double cell_area(const RealGrid& g) {
  const double h = 2.0 / static_cast<double>(g.rows());
  return h * h;
}

struct Overlap {
  double a = 0, b = 0, both = 0, differ = 0;
};

Overlap threshold_overlap(const RealGrid& pred, const RealGrid& target, const MaskGrid& mask, double c) {
  check_shapes(pred, target, mask);
  Overlap o;
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    for (Eigen::Index k = 0; k < pred.cols(); ++k) {
      if (!mask(r, k)) continue;
      const bool a = pred(r, k) > c, b = target(r, k) > c;
      o.a += a;
      o.b += b;
      o.both += a && b;
      o.differ += a != b;
    }
  }
  const double h2 = cell_area(pred);
  o.a *= h2;
  o.b *= h2;
  o.both *= h2;
  o.differ *= h2;
  return o;
}

double phi(LawKind kind, double x) {
  switch (kind) {
    case LawKind::Power: return std::log(x);
    case LawKind::Log: return -std::log(std::log(1.0 / x));
    case LawKind::SamplePower: return -std::log(x);
  }
  return 0.0;
}

struct LineFit {
  double log_c, rho;
};

LineFit regress(const std::vector<double>& u, const std::vector<double>& v) {
  const double n = static_cast<double>(u.size());
  double mu = 0, mv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    mu += u[i];
    mv += v[i];
  }
  mu /= n;
  mv /= n;
  double suu = 0, suv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suv += (u[i] - mu) * (v[i] - mv);
  }
  const double rho = suv / suu;
  return {mv - rho * mu, rho};
}

}  // namespace

double rel_lp_error(const RealGrid& pred, const RealGrid& target, const MaskGrid& mask, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("rel_lp_error: p must be >= 1");
  check_shapes(pred, target, mask);
  double num = 0, den = 0;
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    for (Eigen::Index k = 0; k < pred.cols(); ++k) {
      if (!mask(r, k)) continue;
      num += std::pow(std::abs(pred(r, k) - target(r, k)), p);
      den += std::pow(std::abs(target(r, k)), p);
    }
  }
  if (den == 0.0) throw std::domain_error("rel_lp_error: target has zero norm on the mask");
  return std::pow(num / den, 1.0 / p);
}

double rel_lp_error(const RealGrid& pred, const ConductivityField& target, double p) {
  return rel_lp_error(pred, target.values, target.mask, p);
}

double l0_distance(const RealGrid& pred, const RealGrid& target, const MaskGrid& mask, double c) {
  return threshold_overlap(pred, target, mask, c).differ;
}

double l0_distance(const RealGrid& pred, const ConductivityField& target, double c) {
  return l0_distance(pred, target.values, target.mask, c);
}

double dice(const RealGrid& pred, const RealGrid& target, const MaskGrid& mask, double c, double eps) {
  const Overlap o = threshold_overlap(pred, target, mask, c);
  return 2.0 * o.both / (eps + o.a + o.b);
}

double dice(const RealGrid& pred, const ConductivityField& target, double c, double eps) {
  return dice(pred, target.values, target.mask, c, eps);
}

double total_variation(const RealGrid& f, const MaskGrid& mask) {
  if (f.rows() != mask.rows() || f.cols() != mask.cols()) throw std::invalid_argument("total_variation: shape");
  const double h = 2.0 / static_cast<double>(f.rows());
  double tv = 0.0;
  for (Eigen::Index r = 0; r + 1 < f.rows(); ++r) {
    for (Eigen::Index k = 0; k + 1 < f.cols(); ++k) {
      if (!mask(r, k) || !mask(r, k + 1) || !mask(r + 1, k)) continue;
      const double dx = f(r, k + 1) - f(r, k);
      const double dy = f(r + 1, k) - f(r, k);
      tv += std::sqrt(dx * dx + dy * dy) * h;
    }
  }
  return tv;
}

double total_variation(const ConductivityField& field) { return total_variation(field.values, field.mask); }

LawKind parse_law_kind(const std::string& name) {
  if (name == "power") return LawKind::Power;
  if (name == "log") return LawKind::Log;
  if (name == "sample-power") return LawKind::SamplePower;
  throw std::invalid_argument("unknown law kind: " + name);
}

std::string to_string(LawKind kind) {
  switch (kind) {
    case LawKind::Power: return "power";
    case LawKind::Log: return "log";
    case LawKind::SamplePower: return "sample-power";
  }
  return "?";
}

double law_value(const FitResult& fit, double x) { return fit.e + fit.C * std::exp(fit.rho * phi(fit.kind, x)); }

FitResult fit_law(std::span<const double> xs, std::span<const double> ys, LawKind kind) {
  const std::size_t n = xs.size();
  if (n != ys.size()) throw std::invalid_argument("fit_law: xs and ys differ in length");
  if (n < 4) throw std::invalid_argument("fit_law: need at least 4 points");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0)) throw std::invalid_argument("fit_law: xs must be positive");
    if (!(ys[i] > 0.0)) throw std::invalid_argument("fit_law: ys must be positive");
    if (kind == LawKind::Log && !(xs[i] < 1.0)) throw std::invalid_argument("fit_law: log law needs xs < 1");
  }
  std::vector<double> u(n), logy(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = phi(kind, xs[i]);
    logy[i] = std::log(ys[i]);
  }
  {
    const double u0 = u.front();
    if (std::all_of(u.begin(), u.end(), [&](double v) { return v == u0; })) {
      throw std::invalid_argument("fit_law: xs must not all coincide");
    }
  }

  std::vector<double> v(n);
  auto evaluate = [&](double e, LineFit* out) {
    for (std::size_t i = 0; i < n; ++i) v[i] = std::log(ys[i] - e);
    const LineFit lf = regress(u, v);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double model = e + std::exp(lf.log_c + lf.rho * u[i]);
      const double d = logy[i] - std::log(model);
      ss += d * d;
    }
    if (out) *out = lf;
    return std::sqrt(ss / static_cast<double>(n));
  };

  const double ymin = *std::min_element(ys.begin(), ys.end());
  const double e_max = ymin * (1.0 - 1e-9);
  constexpr int kScan = 400;
  const double step = e_max / kScan;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScan; ++i) {
    const double val = evaluate(step * i, nullptr);
    if (val < best_val) {
      best_val = val;
      best = i;
    }
  }
  // Golden-section refinement on the bracketing grid cells.
  double lo = step * std::max(0, best - 1);
  double hi = std::min(e_max, step * (best + 1));
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = evaluate(a, nullptr), fb = evaluate(b, nullptr);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, ymin); ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = evaluate(a, nullptr);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = evaluate(b, nullptr);
    }
  }
  double e = 0.5 * (lo + hi);
  LineFit lf{};
  double res = evaluate(e, &lf);
  LineFit lf_grid{};
  const double res_grid = evaluate(step * best, &lf_grid);
  if (res_grid < res) {
    e = step * best;
    res = res_grid;
    lf = lf_grid;
  }

  FitResult fit;
  fit.kind = kind;
  fit.C = std::exp(lf.log_c);
  fit.rho = lf.rho;
  fit.e = e;
  fit.residual = res;
  // Every law family is increasing in phi; data sorted by phi must follow.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return u[i] < u[j]; });
  for (std::size_t k = 1; k < n; ++k) {
    if (ys[order[k]] < ys[order[k - 1]]) fit.monotone = false;
  }
  return fit;
}

}  // namespace eit
