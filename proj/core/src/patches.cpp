#include "eitlab/patches.hpp"

#include <cmath>
#include <stdexcept>

namespace eit {
namespace {

double keys_weight(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

double wrap_angle(double d) {
  d = std::fmod(d + kPi, kTwoPi);
  if (d <= 0.0) d += kTwoPi;
  return d - kPi;
}

}  // namespace

double Chart::offset(double theta) const { return wrap_angle(theta - center); }

bool Chart::contains(double theta) const { return std::abs(offset(theta)) < half_width; }

double Chart::to_local(double theta) const {
  return lo + (hi - lo) * (offset(theta) + half_width) / (2.0 * half_width);
}

double Chart::to_angle(double x) const {
  return center + (x - lo) / (hi - lo) * (2.0 * half_width) - half_width;
}

Atlas::Atlas(std::vector<Chart> charts, double bump_half_width)
    : charts_(std::move(charts)), bump_half_width_(bump_half_width) {
  if (charts_.size() < 2) throw std::invalid_argument("Atlas: need at least two charts");
  for (const auto& c : charts_) {
    if (!(bump_half_width_ < c.half_width)) {
      throw std::invalid_argument("Atlas: bump support must lie strictly inside each arc");
    }
    if (!(c.half_width < kPi)) throw std::invalid_argument("Atlas: an arc must not cover the whole circle");
  }
  // Every angle must see at least one positive bump.
  constexpr int probes = 4096;
  for (int i = 0; i < probes; ++i) {
    const double th = kTwoPi * i / probes;
    double s = 0.0;
    for (int j = 0; j < size(); ++j) s += raw_bump(j, th);
    if (!(s > 0.0)) throw std::invalid_argument("Atlas: bump supports do not cover the circle");
  }
}

double Atlas::raw_bump(int j, double theta) const {
  const double s = charts_[j].offset(theta) / bump_half_width_;
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

double Atlas::partition(int j, double theta) const {
  double total = 0.0;
  for (int i = 0; i < size(); ++i) total += raw_bump(i, theta);
  return raw_bump(j, theta) / total;
}

Atlas build_atlas(int chart_count, double overlap) {
  if (chart_count < 2) throw std::invalid_argument("build_atlas: chart count must be >= 2");
  if (!(overlap > 0.0)) throw std::invalid_argument("build_atlas: overlap must be positive (arcs must cover)");
  const double base = kPi / chart_count;
  std::vector<Chart> charts;
  for (int j = 0; j < chart_count; ++j) {
    Chart c;
    c.center = kTwoPi * j / chart_count;
    c.half_width = base + overlap;
    charts.push_back(c);
  }
  return Atlas(std::move(charts), base + 0.5 * overlap);
}

double PatchStack::norm() const {
  double s = 0.0;
  for (const auto& c : components) s += c.squaredNorm();
  return std::sqrt(s / (double(resolution) * resolution));
}

double interpolate_periodic(const RealGrid& grid, double theta, double theta_prime) {
  const int n = static_cast<int>(grid.rows());
  const int m = static_cast<int>(grid.cols());
  const double pa = theta / kTwoPi * n;
  const double pb = theta_prime / kTwoPi * m;
  const double fa = std::floor(pa);
  const double fb = std::floor(pb);
  double wa[4], wb[4];
  for (int o = 0; o < 4; ++o) {
    wa[o] = keys_weight(pa - fa - (o - 1));
    wb[o] = keys_weight(pb - fb - (o - 1));
  }
  const int ia = static_cast<int>(fa), ib = static_cast<int>(fb);
  double s = 0.0;
  for (int oa = 0; oa < 4; ++oa) {
    const int r = (((ia + oa - 1) % n) + n) % n;
    double row = 0.0;
    for (int ob = 0; ob < 4; ++ob) {
      const int c = (((ib + ob - 1) % m) + m) % m;
      row += wb[ob] * grid(r, c);
    }
    s += wa[oa] * row;
  }
  return s;
}

double interpolate_local(const RealGrid& grid, double x, double y) {
  const int n = static_cast<int>(grid.rows());
  // cell centers at (p + 1/2)/n
  const double px = x * n - 0.5;
  const double py = y * n - 0.5;
  const double fx = std::floor(px);
  const double fy = std::floor(py);
  const int ix = static_cast<int>(fx), iy = static_cast<int>(fy);
  double s = 0.0;
  for (int ox = 0; ox < 4; ++ox) {
    const int r = ix + ox - 1;
    if (r < 0 || r >= n) continue;
    const double wx = keys_weight(px - fx - (ox - 1));
    double row = 0.0;
    for (int oy = 0; oy < 4; ++oy) {
      const int c = iy + oy - 1;
      if (c < 0 || c >= n) continue;
      row += keys_weight(py - fy - (oy - 1)) * grid(r, c);
    }
    s += wx * row;
  }
  return s;
}

PatchStack global_to_local(const KernelGrid& h, const Atlas& atlas, int resolution) {
  const int res = resolution > 0 ? resolution : h.size();
  const int nc = atlas.size();
  PatchStack stack{nc, res, std::vector<RealGrid>(static_cast<std::size_t>(nc) * nc, RealGrid::Zero(res, res))};
  for (int j = 0; j < nc; ++j) {
    const Chart& cj = atlas.charts()[j];
    for (int k = 0; k < nc; ++k) {
      const Chart& ck = atlas.charts()[k];
      RealGrid& out = stack.at(j, k);
      for (int p = 0; p < res; ++p) {
        const double x = (p + 0.5) / res;
        if (!(x > cj.lo && x < cj.hi)) continue;
        const double th = cj.to_angle(x);
        for (int q = 0; q < res; ++q) {
          const double y = (q + 0.5) / res;
          if (!(y > ck.lo && y < ck.hi)) continue;
          out(p, q) = interpolate_periodic(h.values, th, ck.to_angle(y));
        }
      }
    }
  }
  return stack;
}

KernelGrid local_to_global(const PatchStack& stack, const Atlas& atlas, int grid_size) {
  if (stack.chart_count != atlas.size()) throw std::invalid_argument("local_to_global: atlas/stack mismatch");
  const int n = grid_size > 0 ? grid_size : stack.resolution;
  const int nc = atlas.size();
  KernelGrid out{RealGrid::Zero(n, n)};
  // psi(j, a) and local coordinate per chart and grid angle
  Eigen::MatrixXd psi(nc, n), local(nc, n);
  for (int j = 0; j < nc; ++j) {
    for (int a = 0; a < n; ++a) {
      const double th = kTwoPi * a / n;
      psi(j, a) = atlas.partition(j, th);
      local(j, a) = atlas.charts()[j].to_local(th);
    }
  }
  for (int j = 0; j < nc; ++j) {
    for (int k = 0; k < nc; ++k) {
      const RealGrid& f = stack.at(j, k);
      for (int a = 0; a < n; ++a) {
        if (psi(j, a) == 0.0) continue;
        for (int b = 0; b < n; ++b) {
          if (psi(k, b) == 0.0) continue;
          out.values(a, b) += psi(j, a) * psi(k, b) * interpolate_local(f, local(j, a), local(k, b));
        }
      }
    }
  }
  return out;
}

}  // namespace eit
