#include "eitlab/conductivity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eitlab/rng.hpp"

namespace eit {

MaskGrid disk_mask(int n) {
  const auto x = cell_centers(n);
  MaskGrid mask(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) mask(r, c) = x[c] * x[c] + x[r] * x[r] < 1.0;
  }
  return mask;
}

RealGrid cell_radius(int n) {
  const auto x = cell_centers(n);
  RealGrid rad(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) rad(r, c) = std::hypot(x[c], x[r]);
  }
  return rad;
}

double ConductivityField::at_point(double x, double y) const {
  const int n = grid_size();
  const int c = std::clamp(static_cast<int>(std::floor((x + 1.0) * 0.5 * n)), 0, n - 1);
  const int r = std::clamp(static_cast<int>(std::floor((y + 1.0) * 0.5 * n)), 0, n - 1);
  return mask(r, c) ? values(r, c) : 1.0;
}

std::vector<double> ConductivityField::distinct_values(double tol) const {
  std::vector<double> v;
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (mask(r, c)) v.push_back(values(r, c));
    }
  }
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  }
  return out;
}

ConductivityField homogeneous_field(int n) {
  ConductivityField f{RealGrid(n, n), disk_mask(n), 0.0};
  f.values = f.mask.cast<double>().matrix();
  return f;
}

double cutoff_fn(double t, double w, double lambda, double r_minus, double r_plus) {
  if (!(r_minus > 0.0 && r_minus < r_plus && r_plus <= 1.0)) {
    throw std::invalid_argument("cutoff_fn: need 0 < r_minus < r_plus <= 1");
  }
  if (t <= r_minus) return 1.0;
  if (t > r_plus) return 0.0;
  if (t == r_plus) return w;
  const double arg = (1.0 / (t - r_minus) + 1.0 / (t - r_plus)) / lambda;
  return 0.5 * (1.0 + w) + 0.5 * (1.0 - w) * std::tanh(arg);
}

namespace {

void require_square(const RealGrid& u) {
  if (u.rows() != u.cols() || u.rows() == 0) throw std::invalid_argument("level field must be square and nonempty");
}

}  // namespace

ConductivityField shape_from_field(const RealGrid& level_field, double radius, double inclusion_value) {
  require_square(level_field);
  const int n = static_cast<int>(level_field.rows());
  ConductivityField f{RealGrid::Zero(n, n), disk_mask(n), radius};
  const RealGrid rad = cell_radius(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (!f.mask(r, c)) continue;
      f.values(r, c) = (rad(r, c) < radius && level_field(r, c) >= 0.0) ? inclusion_value : 1.0;
    }
  }
  return f;
}

ConductivityField sample_shape(std::uint64_t seed, int n) {
  const GrfSpec spec{kShapeTau, kShapeAlpha, n, n};
  return shape_from_field(sample_grf(spec, derive_seed(seed, {kGrfStream, 0})));
}

ThreePhaseParams draw_three_phase_params(std::uint64_t seed) {
  Rng rng(derive_seed(seed, {kParamStream}));
  ThreePhaseParams p{};
  p.tau = rng.uniform(12.0, 18.0);
  p.alpha = rng.uniform(4.0, 5.0);
  p.radius = rng.uniform(0.65, 0.9);
  p.c1 = rng.uniform(2.0, 10.0);
  p.c2 = rng.uniform(0.1, 0.5);
  return p;
}

ConductivityField three_phase_from_fields(const RealGrid& u1, const RealGrid& u2, const ThreePhaseParams& p) {
  require_square(u1);
  if (u2.rows() != u1.rows() || u2.cols() != u1.cols()) throw std::invalid_argument("level fields differ in shape");
  const int n = static_cast<int>(u1.rows());
  ConductivityField f{RealGrid::Zero(n, n), disk_mask(n), p.radius};
  const RealGrid rad = cell_radius(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (!f.mask(r, c)) continue;
      double v = 1.0;
      if (rad(r, c) < p.radius && u1(r, c) >= 0.0) v = u2(r, c) >= 0.0 ? p.c1 : p.c2;
      f.values(r, c) = v;
    }
  }
  return f;
}

ConductivityField sample_three_phase(std::uint64_t seed, int n) {
  const ThreePhaseParams p = draw_three_phase_params(seed);
  const GrfSpec spec{p.tau, p.alpha, n, n};
  const RealGrid u1 = sample_grf(spec, derive_seed(seed, {kGrfStream, 0}));
  const RealGrid u2 = sample_grf(spec, derive_seed(seed, {kGrfStream, 1}));
  return three_phase_from_fields(u1, u2, p);
}

LognormalParams draw_lognormal_params(std::uint64_t seed) {
  Rng rng(derive_seed(seed, {kParamStream}));
  LognormalParams p{};
  p.tau = rng.uniform(7.0, 9.0);
  p.alpha = rng.uniform(3.0, 4.0);
  p.r_minus = rng.uniform(0.50, 0.55);
  p.r_plus = rng.uniform(0.85, 0.95);
  p.lambda = rng.uniform(7.5, 8.5);
  return p;
}

ConductivityField lognormal_from_field(const RealGrid& u, const LognormalParams& p) {
  require_square(u);
  const int n = static_cast<int>(u.rows());
  ConductivityField f{RealGrid::Zero(n, n), disk_mask(n), p.r_plus};
  const RealGrid rad = cell_radius(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (!f.mask(r, c)) continue;
      const double t = rad(r, c);
      const double v = t < p.r_plus ? std::exp(u(r, c)) : 1.0;
      if (t >= p.r_minus && t < p.r_plus) {
        f.values(r, c) = v * cutoff_fn(t, 1.0 / v, p.lambda, p.r_minus, p.r_plus);
      } else {
        f.values(r, c) = v;
      }
    }
  }
  return f;
}

ConductivityField sample_lognormal(std::uint64_t seed, int n) {
  const LognormalParams p = draw_lognormal_params(seed);
  const GrfSpec spec{p.tau, p.alpha, n, n};
  return lognormal_from_field(sample_grf(spec, derive_seed(seed, {kGrfStream, 0})), p);
}

bool Ellipse::contains(double x, double y) const {
  const double th = rotation_deg * kPi / 180.0;
  const double dx = x - cx;
  const double dy = y - cy;
  // Rotate the point into the ellipse frame.
  const double u = std::cos(th) * dx + std::sin(th) * dy;
  const double v = -std::sin(th) * dx + std::cos(th) * dy;
  return (u * u) / (semi_x * semi_x) + (v * v) / (semi_y * semi_y) < 1.0;
}

PhantomSpec default_phantom_spec(PhantomKind kind) {
  const bool realistic = kind == PhantomKind::Realistic;
  const double heart = realistic ? 6.3 : kShapeContrast;
  const double lung = realistic ? 0.4 : kShapeContrast;
  PhantomSpec spec;
  spec.ellipses = {
      {0.1, 0.35, 0.18, 0.25, 0.0, heart},
      {0.35, -0.05, 0.22, 0.42, -25.0, lung},
      {-0.35, -0.05, 0.22, 0.42, 25.0, lung},
  };
  return spec;
}

ConductivityField phantom(const PhantomSpec& spec, int n) {
  ConductivityField f{RealGrid::Zero(n, n), disk_mask(n), spec.support_radius};
  const auto x = cell_centers(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (!f.mask(r, c)) continue;
      double v = spec.background;
      for (const auto& e : spec.ellipses) {
        if (e.contains(x[c], x[r])) {
          v = e.value;
          break;
        }
      }
      f.values(r, c) = v;
    }
  }
  return f;
}

ConductivityField phantom(PhantomKind kind, int n) { return phantom(default_phantom_spec(kind), n); }

}  // namespace eit
