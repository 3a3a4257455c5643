#include "eitlab/fno_model.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "eitlab/conductivity.hpp"
#include "eitlab/rng.hpp"

namespace eit {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMat>;
using ConstRowMap = Eigen::Map<const RowMat>;

std::string layer_name(int l, const char* what) { return "layer" + std::to_string(l) + "_" + what; }

}  // namespace

int FnoConfig::padding(int n) const { return static_cast<int>(std::ceil(n * padding_fraction - 1e-12)); }

void FnoConfig::validate(int n) const {
  if (layers < 1) throw std::invalid_argument("FnoConfig: layers must be >= 1");
  if (modes < 1 || width < 1 || mlp_width < 1) throw std::invalid_argument("FnoConfig: widths/modes must be >= 1");
  if (!(padding_fraction >= 0.0)) throw std::invalid_argument("FnoConfig: padding fraction must be >= 0");
  if (n > 0 && 2 * modes > n) {
    throw std::invalid_argument("FnoConfig: grid " + std::to_string(n) + " too small for " +
                                std::to_string(modes) + " modes");
  }
}

std::size_t ParamTensor::size() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

ParamLayout::ParamLayout(const FnoConfig& c) {
  auto add = [&](std::string name, std::vector<std::size_t> shape) {
    ParamTensor t{std::move(name), total_, std::move(shape)};
    total_ += t.size();
    tensors_.push_back(std::move(t));
  };
  const std::size_t w = c.width, m2 = std::size_t(c.modes) * c.modes;
  add("lift_w", {w, std::size_t(c.input_channels())});
  add("lift_b", {w});
  for (int l = 0; l < c.layers; ++l) {
    add(layer_name(l, "spec_re"), {m2, w, w});
    add(layer_name(l, "spec_im"), {m2, w, w});
    add(layer_name(l, "w"), {w, w});
    add(layer_name(l, "b"), {w});
  }
  add("proj1_w", {std::size_t(c.mlp_width), w});
  add("proj1_b", {std::size_t(c.mlp_width)});
  add("proj2_w", {1, std::size_t(c.mlp_width)});
  add("proj2_b", {1});
}

const ParamTensor& ParamLayout::tensor(const std::string& name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return t;
  }
  throw std::out_of_range("unknown parameter tensor: " + name);
}

std::size_t parameter_count(const FnoConfig& config) { return ParamLayout(config).total(); }

FnoParams::FnoParams(const FnoConfig& cfg) : config(cfg), values(parameter_count(cfg), 0.0) { cfg.validate(); }

std::span<double> FnoParams::tensor(const std::string& name) {
  const auto t = layout().tensor(name);
  return std::span<double>(values).subspan(t.offset, t.size());
}

std::span<const double> FnoParams::tensor(const std::string& name) const {
  const auto t = layout().tensor(name);
  return std::span<const double>(values).subspan(t.offset, t.size());
}

FnoParams init_params(const FnoConfig& config, std::uint64_t seed) {
  FnoParams p(config);
  Rng rng(derive_seed(seed, {0x1417}));
  auto fill = [&](const std::string& name, double lo, double hi) {
    for (double& v : p.tensor(name)) v = rng.uniform(lo, hi);
  };
  auto fan_in = [&](const std::string& name, int fan) {
    const double b = 1.0 / std::sqrt(static_cast<double>(fan));
    fill(name, -b, b);
  };
  fan_in("lift_w", config.input_channels());
  fan_in("lift_b", config.input_channels());
  const double spec_scale = 1.0 / (double(config.width) * config.width);
  for (int l = 0; l < config.layers; ++l) {
    fill(layer_name(l, "spec_re"), 0.0, spec_scale);
    fill(layer_name(l, "spec_im"), 0.0, spec_scale);
    fan_in(layer_name(l, "w"), config.width);
    fan_in(layer_name(l, "b"), config.width);
  }
  fan_in("proj1_w", config.width);
  fan_in("proj1_b", config.width);
  fan_in("proj2_w", config.mlp_width);
  fan_in("proj2_b", config.mlp_width);
  return p;
}

SpectralBasis::SpectralBasis(int p, int modes) : padded(p), m1(modes), m2(modes) {
  if (2 * modes > p) throw std::invalid_argument("spectral basis: grid smaller than mode cutoff");
  for (int k = -(modes - 1) / 2; k <= modes / 2; ++k) row_modes.push_back(k);
  row_cos.resize(m1, p);
  row_sin.resize(m1, p);
  for (int i = 0; i < m1; ++i) {
    for (int a = 0; a < p; ++a) {
      const double ph = kTwoPi * row_modes[i] * a / p;
      row_cos(i, a) = std::cos(ph);
      row_sin(i, a) = std::sin(ph);
    }
  }
  col_cos.resize(p, m2);
  col_sin.resize(p, m2);
  col_weight.resize(m2);
  for (int k = 0; k < m2; ++k) {
    col_weight[k] = k == 0 ? 1.0 : 2.0;
    for (int b = 0; b < p; ++b) {
      const double ph = kTwoPi * k * b / p;
      col_cos(b, k) = std::cos(ph);
      col_sin(b, k) = std::sin(ph);
    }
  }
}

namespace {

// Forward transform of a C x P^2 field onto the retained modes: (re, im), each C x (m1*m2).
void transform_modes(const SpectralBasis& B, const RealGrid& h, RealGrid& xr, RealGrid& xi) {
  const int P = B.padded, C = static_cast<int>(h.rows());
  ConstRowMap hm(h.data(), Eigen::Index(C) * P, P);
  // along columns: x2 = h e^{-i k2 b}
  const RowMat x2r = hm * B.col_cos;
  const RowMat x2i = -(hm * B.col_sin);
  xr.resize(C, B.m1 * B.m2);
  xi.resize(C, B.m1 * B.m2);
  for (int c = 0; c < C; ++c) {
    auto br = x2r.middleRows(Eigen::Index(c) * P, P);
    auto bi = x2i.middleRows(Eigen::Index(c) * P, P);
    RowMap outr(xr.row(c).data(), B.m1, B.m2);
    RowMap outi(xi.row(c).data(), B.m1, B.m2);
    // e^{-i k1 a} (br + i bi)
    outr.noalias() = B.row_cos * br + B.row_sin * bi;
    outi.noalias() = B.row_cos * bi - B.row_sin * br;
  }
}

// Adjoint-free inverse: real field C x P^2 from retained mode values.
RealGrid inverse_modes(const SpectralBasis& B, const RealGrid& yr, const RealGrid& yi) {
  const int P = B.padded, C = static_cast<int>(yr.rows());
  RowMat z2r(Eigen::Index(C) * P, B.m2), z2i(Eigen::Index(C) * P, B.m2);
  for (int c = 0; c < C; ++c) {
    ConstRowMap ycr(yr.row(c).data(), B.m1, B.m2);
    ConstRowMap yci(yi.row(c).data(), B.m1, B.m2);
    z2r.middleRows(Eigen::Index(c) * P, P).noalias() = B.row_cos.transpose() * ycr - B.row_sin.transpose() * yci;
    z2i.middleRows(Eigen::Index(c) * P, P).noalias() = B.row_cos.transpose() * yci + B.row_sin.transpose() * ycr;
  }
  const double s = 1.0 / (double(P) * P);
  const Eigen::VectorXd w = B.col_weight * s;
  RealGrid out(C, Eigen::Index(P) * P);
  RowMap om(out.data(), Eigen::Index(C) * P, P);
  om.noalias() = (z2r * w.asDiagonal()) * B.col_cos.transpose();
  om.noalias() -= (z2i * w.asDiagonal()) * B.col_sin.transpose();
  return out;
}

// Gradients of inverse_modes: given dL/d(out) return dL/d(yr), dL/d(yi).
void inverse_modes_adjoint(const SpectralBasis& B, const RealGrid& g, RealGrid& gyr, RealGrid& gyi) {
  const int P = B.padded, C = static_cast<int>(g.rows());
  ConstRowMap gm(g.data(), Eigen::Index(C) * P, P);
  const double s = 1.0 / (double(P) * P);
  const Eigen::VectorXd w = B.col_weight * s;
  const RowMat gz2r = (gm * B.col_cos) * w.asDiagonal();
  const RowMat gz2i = -((gm * B.col_sin) * w.asDiagonal());
  gyr.resize(C, B.m1 * B.m2);
  gyi.resize(C, B.m1 * B.m2);
  for (int c = 0; c < C; ++c) {
    auto ar = gz2r.middleRows(Eigen::Index(c) * P, P);
    auto ai = gz2i.middleRows(Eigen::Index(c) * P, P);
    RowMap outr(gyr.row(c).data(), B.m1, B.m2);
    RowMap outi(gyi.row(c).data(), B.m1, B.m2);
    outr.noalias() = B.row_cos * ar + B.row_sin * ai;
    outi.noalias() = B.row_cos * ai - B.row_sin * ar;
  }
}

// Gradient of transform_modes: dL/dh (C x P^2) from dL/d(xr), dL/d(xi).
RealGrid transform_modes_adjoint(const SpectralBasis& B, const RealGrid& gxr, const RealGrid& gxi) {
  const int P = B.padded, C = static_cast<int>(gxr.rows());
  RowMat g2r(Eigen::Index(C) * P, B.m2), g2i(Eigen::Index(C) * P, B.m2);
  for (int c = 0; c < C; ++c) {
    ConstRowMap ar(gxr.row(c).data(), B.m1, B.m2);
    ConstRowMap ai(gxi.row(c).data(), B.m1, B.m2);
    g2r.middleRows(Eigen::Index(c) * P, P).noalias() = B.row_cos.transpose() * ar - B.row_sin.transpose() * ai;
    g2i.middleRows(Eigen::Index(c) * P, P).noalias() = B.row_sin.transpose() * ar + B.row_cos.transpose() * ai;
  }
  RealGrid out(C, Eigen::Index(P) * P);
  RowMap om(out.data(), Eigen::Index(C) * P, P);
  om.noalias() = g2r * B.col_cos.transpose();
  om.noalias() -= g2i * B.col_sin.transpose();
  return out;
}

void mix_modes(const RealGrid& xr, const RealGrid& xi, std::span<const double> pr, std::span<const double> pi,
               int out_ch, RealGrid& yr, RealGrid& yi) {
  const int in_ch = static_cast<int>(xr.rows());
  const int modes = static_cast<int>(xr.cols());
  yr.resize(out_ch, modes);
  yi.resize(out_ch, modes);
  const std::size_t block = std::size_t(out_ch) * in_ch;
  for (int mu = 0; mu < modes; ++mu) {
    ConstRowMap wr(pr.data() + mu * block, out_ch, in_ch);
    ConstRowMap wi(pi.data() + mu * block, out_ch, in_ch);
    yr.col(mu).noalias() = wr * xr.col(mu) - wi * xi.col(mu);
    yi.col(mu).noalias() = wr * xi.col(mu) + wi * xr.col(mu);
  }
}

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

RealGrid spectral_conv(const SpectralBasis& basis, const RealGrid& h, std::span<const double> weights_re,
                       std::span<const double> weights_im, int out_channels, RealGrid* spec_re, RealGrid* spec_im) {
  const std::size_t need = std::size_t(basis.m1) * basis.m2 * out_channels * h.rows();
  if (weights_re.size() != need || weights_im.size() != need) {
    throw std::invalid_argument("spectral_conv: weight size mismatch");
  }
  if (h.cols() != Eigen::Index(basis.padded) * basis.padded) {
    throw std::invalid_argument("spectral_conv: field does not match basis grid");
  }
  RealGrid xr, xi, yr, yi;
  transform_modes(basis, h, xr, xi);
  mix_modes(xr, xi, weights_re, weights_im, out_channels, yr, yi);
  if (spec_re) *spec_re = xr;
  if (spec_im) *spec_im = xi;
  return inverse_modes(basis, yr, yi);
}

RealGrid fno_forward(const FnoParams& params, const RealGrid& kernel_std, ForwardCache* cache) {
  const FnoConfig& cfg = params.config;
  const int n = static_cast<int>(kernel_std.rows());
  if (kernel_std.cols() != n || n == 0) throw std::invalid_argument("fno_forward: input must be a square grid");
  cfg.validate(n);
  const int pad = cfg.padding(n);
  const int P = n + pad;
  const Eigen::Index PP = Eigen::Index(P) * P;
  const int in_ch = cfg.input_channels();
  const int W = cfg.width;

  // Input channels on the padded grid (zeros in the padding).
  RealGrid x0 = RealGrid::Zero(in_ch, PP);
  for (int a = 0; a < n; ++a) {
    const double th = kTwoPi * a / n;
    for (int b = 0; b < n; ++b) {
      const Eigen::Index idx = Eigen::Index(a) * P + b;
      x0(0, idx) = kernel_std(a, b);
      if (cfg.grid_concat) {
        const double thp = kTwoPi * b / n;
        x0(1, idx) = std::cos(th);
        x0(2, idx) = std::sin(th);
        x0(3, idx) = std::cos(thp);
        x0(4, idx) = std::sin(thp);
      }
    }
  }

  ConstRowMap lift_w(params.tensor("lift_w").data(), W, in_ch);
  const Eigen::Map<const Eigen::VectorXd> lift_b(params.tensor("lift_b").data(), W);
  RealGrid h = lift_w * x0;
  h.colwise() += lift_b;

  const SpectralBasis basis(P, cfg.modes);
  if (cache) {
    cache->n = n;
    cache->padded = P;
    cache->input = x0;
    cache->hidden.assign(1, h);
    cache->pre_act.clear();
    cache->spec_re.clear();
    cache->spec_im.clear();
  }
  for (int l = 0; l < cfg.layers; ++l) {
    RealGrid sr, si;
    RealGrid z = spectral_conv(basis, h, params.tensor(layer_name(l, "spec_re")),
                               params.tensor(layer_name(l, "spec_im")), W, &sr, &si);
    ConstRowMap lw(params.tensor(layer_name(l, "w")).data(), W, W);
    const Eigen::Map<const Eigen::VectorXd> lb(params.tensor(layer_name(l, "b")).data(), W);
    z.noalias() += lw * h;
    z.colwise() += lb;
    const bool last = l + 1 == cfg.layers;
    if (cache) {
      cache->pre_act.push_back(z);
      cache->spec_re.push_back(std::move(sr));
      cache->spec_im.push_back(std::move(si));
    }
    h = last ? z : RealGrid(z.unaryExpr(&relu));
    if (cache) cache->hidden.push_back(h);
  }

  // Crop back to the n x n grid.
  RealGrid hc(W, Eigen::Index(n) * n);
  for (int c = 0; c < W; ++c) {
    for (int a = 0; a < n; ++a) {
      hc.row(c).segment(Eigen::Index(a) * n, n) = h.row(c).segment(Eigen::Index(a) * P, n);
    }
  }

  ConstRowMap q1(params.tensor("proj1_w").data(), cfg.mlp_width, W);
  const Eigen::Map<const Eigen::VectorXd> q1b(params.tensor("proj1_b").data(), cfg.mlp_width);
  RealGrid a1 = q1 * hc;
  a1.colwise() += q1b;
  const Eigen::Map<const Eigen::RowVectorXd> q2(params.tensor("proj2_w").data(), cfg.mlp_width);
  const double q2b = params.tensor("proj2_b")[0];
  const Eigen::RowVectorXd out_flat = (q2 * a1.unaryExpr(&relu)).array() + q2b;

  const MaskGrid mask = disk_mask(n);
  RealGrid out(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) out(a, b) = mask(a, b) ? out_flat[Eigen::Index(a) * n + b] : 0.0;
  }
  if (cache) {
    cache->cropped = std::move(hc);
    cache->mlp_pre = std::move(a1);
    cache->mask = mask;
  }
  return out;
}

void fno_backward(const FnoParams& params, const ForwardCache& cache, const RealGrid& grad_output,
                  std::span<double> grad) {
  const FnoConfig& cfg = params.config;
  const ParamLayout layout(cfg);
  if (grad.size() != layout.total()) throw std::invalid_argument("fno_backward: gradient size mismatch");
  const int n = cache.n, P = cache.padded, W = cfg.width, M = cfg.mlp_width;
  const Eigen::Index nn = Eigen::Index(n) * n;
  auto gview = [&](const std::string& name) {
    const auto& t = layout.tensor(name);
    return grad.subspan(t.offset, t.size());
  };

  // Output mask and projection MLP.
  Eigen::RowVectorXd g_out(nn);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) g_out[Eigen::Index(a) * n + b] = cache.mask(a, b) ? grad_output(a, b) : 0.0;
  }
  const RealGrid r1 = cache.mlp_pre.unaryExpr(&relu);
  {
    Eigen::Map<Eigen::RowVectorXd> gq2(gview("proj2_w").data(), M);
    gq2.noalias() += g_out * r1.transpose();
    gview("proj2_b")[0] += g_out.sum();
  }
  const Eigen::Map<const Eigen::VectorXd> q2(params.tensor("proj2_w").data(), M);
  RealGrid ga1 = q2 * g_out;
  ga1.array() *= (cache.mlp_pre.array() > 0.0).cast<double>();
  {
    RowMap gq1(gview("proj1_w").data(), M, W);
    gq1.noalias() += ga1 * cache.cropped.transpose();
    Eigen::Map<Eigen::VectorXd> gq1b(gview("proj1_b").data(), M);
    gq1b += ga1.rowwise().sum();
  }
  ConstRowMap q1(params.tensor("proj1_w").data(), M, W);
  const RealGrid ghc = q1.transpose() * ga1;

  // Un-crop.
  RealGrid gh = RealGrid::Zero(W, Eigen::Index(P) * P);
  for (int c = 0; c < W; ++c) {
    for (int a = 0; a < n; ++a) {
      gh.row(c).segment(Eigen::Index(a) * P, n) = ghc.row(c).segment(Eigen::Index(a) * n, n);
    }
  }

  const SpectralBasis basis(P, cfg.modes);
  const int modes = basis.m1 * basis.m2;
  for (int l = cfg.layers - 1; l >= 0; --l) {
    const bool last = l + 1 == cfg.layers;
    RealGrid gz = gh;
    if (!last) gz.array() *= (cache.pre_act[l].array() > 0.0).cast<double>();
    const RealGrid& h_in = cache.hidden[l];

    {
      RowMap gw(gview(layer_name(l, "w")).data(), W, W);
      gw.noalias() += gz * h_in.transpose();
      Eigen::Map<Eigen::VectorXd> gb(gview(layer_name(l, "b")).data(), W);
      gb += gz.rowwise().sum();
    }
    ConstRowMap lw(params.tensor(layer_name(l, "w")).data(), W, W);
    gh.noalias() = lw.transpose() * gz;

    // Spectral branch.
    RealGrid gyr, gyi;
    inverse_modes_adjoint(basis, gz, gyr, gyi);
    const RealGrid& xr = cache.spec_re[l];
    const RealGrid& xi = cache.spec_im[l];
    auto pr = params.tensor(layer_name(l, "spec_re"));
    auto pi = params.tensor(layer_name(l, "spec_im"));
    auto gpr = gview(layer_name(l, "spec_re"));
    auto gpi = gview(layer_name(l, "spec_im"));
    RealGrid gxr(W, modes), gxi(W, modes);
    const std::size_t block = std::size_t(W) * W;
    for (int mu = 0; mu < modes; ++mu) {
      ConstRowMap wr(pr.data() + mu * block, W, W);
      ConstRowMap wi(pi.data() + mu * block, W, W);
      RowMap gwr(gpr.data() + mu * block, W, W);
      RowMap gwi(gpi.data() + mu * block, W, W);
      gwr.noalias() += gyr.col(mu) * xr.col(mu).transpose() + gyi.col(mu) * xi.col(mu).transpose();
      gwi.noalias() += gyi.col(mu) * xr.col(mu).transpose() - gyr.col(mu) * xi.col(mu).transpose();
      gxr.col(mu).noalias() = wr.transpose() * gyr.col(mu) + wi.transpose() * gyi.col(mu);
      gxi.col(mu).noalias() = wr.transpose() * gyi.col(mu) - wi.transpose() * gyr.col(mu);
    }
    gh += transform_modes_adjoint(basis, gxr, gxi);
  }

  // Lifting.
  RowMap glw(gview("lift_w").data(), W, cfg.input_channels());
  glw.noalias() += gh * cache.input.transpose();
  Eigen::Map<Eigen::VectorXd> glb(gview("lift_b").data(), W);
  glb += gh.rowwise().sum();
}

}  // namespace eit
