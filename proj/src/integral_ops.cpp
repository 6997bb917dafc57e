#include "coagself/integral_ops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "coagself/fixedpoint.hpp"
#include "coagself/parallel.hpp"
#include "coagself/quad.hpp"

namespace coagself {

namespace {

void require_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("rho must lie in (0,1)");
}

void require_tails(const Field& f, const char* who) {
  if (!f.left_tail || !f.right_tail)
    throw std::runtime_error(std::string(who) + ": field needs tail descriptors");
}

// e-folds of [K(s,1)-1] decay kept in the quadratures
double kernel_cut(const KernelSpec& spec) {
  return 60.0 / std::clamp(spec.alpha, 0.05, 1.0);
}

// V(u) = -ln(1 - e^{-u}), the inner height of the corner domain.
// Both branches below are cancellation-free; forming 1 - e^{-u} directly
// would quantize at ulp(1) and the error is amplified by e^{u} downstream.
double corner_height(double u) {
  if (u < 1.0) return -std::log(-std::expm1(-u));
  return -std::log1p(-std::exp(-u));
}

// --- two-sided term, banded cell-pair scheme ------------------------------
//
// R2(x_i) = int_{y<x_i} int_{z>x_i} [K(e^{(y-z)/rho},1)-1] F(y) F(z).
// The kernel factor depends on z-y only, so on the uniform grid the
// cell-pair Gauss blocks reduce to per-offset 6x6 tables and the sum over
// pairs straddling x_i becomes a sliding window, O(n * band).

constexpr int kFine = 6;

struct FineNodes {
  Eigen::ArrayXd off;   // node offsets within a cell, in (0,1)
  Eigen::MatrixXd A;    // (cells x m): quadrature weight * F at node
  Eigen::MatrixXd pos;  // node positions
};

FineNodes fine_nodes(const Field& f) {
  const LogGrid& g = f.grid;
  FineNodes fn;
  const GaussRule& gl = gauss_legendre(kFine);
  fn.off = (gl.nodes + 1.0) * 0.5;
  Eigen::ArrayXd wgt = gl.weights * 0.5 * g.h;
  fn.A.resize(g.cells(), kFine);
  fn.pos.resize(g.cells(), kFine);
  for (int c = 0; c < g.cells(); ++c)
    for (int a = 0; a < kFine; ++a) {
      const double x = g.point(c) + g.h * fn.off[a];
      fn.pos(c, a) = x;
      fn.A(c, a) = wgt[a] * interpolate(f, x);
    }
  return fn;
}

// int_0^inf [K(e^{-(d0+s)/rho},1)-1] e^{-r s} ds
double tail_conv(const KernelSpec& spec, double rho, double d0, double r, double t_cut) {
  if (d0 / rho >= t_cut) return 0.0;
  const double s_max = rho * t_cut - d0;
  const double rate = std::clamp(spec.alpha, 0.05, 1.0) / rho + r;
  const double panel = std::min(s_max, 3.0 / rate);
  const GaussRule& gl = gauss_legendre(12);
  double acc = 0.0;
  double s0 = 0.0;
  Eigen::ArrayXd xs, ws;
  while (s0 < s_max) {
    const double s1 = std::min(s_max, s0 + panel);
    gauss_on(gl, s0, s1, xs, ws);
    for (int q = 0; q < xs.size(); ++q)
      acc += ws[q] * reduced_minus_one(spec, std::exp(-(d0 + xs[q]) / rho)) *
             std::exp(-r * xs[q]);
    s0 = s1;
  }
  return acc;
}

// --- corner rule -----------------------------------------------------------
//
// R3(x) = rho^2 int_0^inf dv F(x-rho v) int_0^{V(v)} du K(e^{v-u},1) F(x-rho u),
// iterated with the short direction inside: with v outside, both ends are
// regular. As v -> 0 the outer integrand tends to a constant (the inner
// converges, F decays like e^{-rho aL u}); for v beyond the kernel range
// the domain identity 1 - e^{-V(v)} = e^{-v} collapses the inner to
// F(x)(1 + O(e^{-alpha v})), so the remaining outer tail is the exact
// left cumulative F(x) * int_{-inf}^{x - rho T} F / rho. Node spacing
// stays below half a grid cell in the field argument.

struct CornerRule {
  struct Outer {
    double v, wv;
    int i0, i1;  // inner span
  };
  std::vector<Outer> outer;
  std::vector<double> iu;   // inner node u
  std::vector<double> iwk;  // inner weight * kernel factor
  double t_out = 0.0;       // closure threshold
};

CornerRule build_corner_rule(const KernelSpec& spec, double rho, double h) {
  CornerRule R;
  const double c0 = std::log(2.0);
  const double step = std::min(1.5, 4.0 * h / rho);
  R.t_out = std::min(60.0 / std::clamp(spec.alpha, 0.05, 1.0), 600.0);
  const GaussRule& gl_in = gauss_legendre(8);

  Eigen::ArrayXd xs, ws;
  auto add_outer = [&](double v, double wv) {
    CornerRule::Outer o;
    o.v = v;
    o.wv = wv;
    o.i0 = static_cast<int>(R.iu.size());
    const double V = corner_height(v);
    std::vector<double> brk{0.0};
    if (v < V) brk.push_back(v);  // kernel feature/kink along u = v
    while (V - brk.back() > step) brk.push_back(brk.back() + step);
    if (V > brk.back()) brk.push_back(V);
    for (size_t s = 0; s + 1 < brk.size(); ++s) {
      gauss_on(gl_in, brk[s], brk[s + 1], xs, ws);
      for (int q = 0; q < xs.size(); ++q) {
        R.iu.push_back(xs[q]);
        R.iwk.push_back(ws[q] * reduced(spec, std::exp(o.v - xs[q])));
      }
    }
    o.i1 = static_cast<int>(R.iu.size());
    R.outer.push_back(o);
  };

  // dyadic shells resolve the v^{rho aL} derivative structure at v -> 0
  Eigen::ArrayXd xo, wo;
  const GaussRule& gl_sh = gauss_legendre(6);
  double hi = c0;
  for (int k = 0; k < 45; ++k) {
    const double lo = 0.5 * hi;
    gauss_on(gl_sh, lo, hi, xo, wo);
    for (int q = 0; q < xo.size(); ++q) add_outer(xo[q], wo[q]);
    hi = lo;
  }
  // mass below the last shell: the outer integrand is constant there to
  // O(v); one node carries the remaining width
  add_outer(0.5 * hi, hi);

  // regular part [ln2, t_out]
  double b0 = c0;
  while (b0 < R.t_out) {
    const double b1 = std::min(R.t_out, b0 + step);
    gauss_on(gauss_legendre(8), b0, b1, xo, wo);
    for (int q = 0; q < xo.size(); ++q) add_outer(xo[q], wo[q]);
    b0 = b1;
  }
  return R;
}

double corner_at(const Field& f, const CumulativePair& cp, const CornerRule& rule,
                 double rho, double x) {
  double acc = 0.0;
  for (const auto& o : rule.outer) {
    const double fv = interpolate(f, x - rho * o.v);
    if (fv == 0.0) continue;
    double inner = 0.0;
    for (int q = o.i0; q < o.i1; ++q)
      inner += rule.iwk[q] * interpolate(f, x - rho * rule.iu[q]);
    acc += o.wv * fv * inner;
  }
  const double closure =
      interpolate(f, x) * left_integral_to(f, cp, x - rho * rule.t_out) / rho;
  return rho * rho * (acc + closure);
}

// Rule arguments are rigid shifts of the output node, so their position
// within a cell is shared by every node: the cubic weights can be
// precomputed once per rule node.
struct FastStencil {
  int off = 0;        // arg = node i - off cells, minus frac
  double w[4] = {0, 0, 0, 0};
  bool on_node = false;
};

std::vector<FastStencil> build_stencils(const std::vector<double>& shifts, double rho,
                                        double h) {
  std::vector<FastStencil> out(shifts.size());
  for (size_t q = 0; q < shifts.size(); ++q) {
    const double s = rho * shifts[q] / h;  // shift in grid units
    const double D = std::floor(s);
    const double frac = s - D;
    FastStencil& st = out[q];
    if (frac == 0.0) {
      st.on_node = true;
      st.off = static_cast<int>(D);
      continue;
    }
    // cell = i - D - 1, stencil base = cell - 1; local coordinate of the
    // argument relative to the base node, in cell units
    st.off = static_cast<int>(D) + 2;
    const double t = 2.0 - frac;
    static constexpr double nodes[4] = {0.0, 1.0, 2.0, 3.0};
    for (int j = 0; j < 4; ++j) {
      double lj = 1.0;
      for (int k = 0; k < 4; ++k)
        if (k != j) lj *= (t - nodes[k]) / (nodes[j] - nodes[k]);
      st.w[j] = lj;
    }
  }
  return out;
}

// interpolate f at node i shifted left by the stencil, falling back to the
// generic path near the edges
inline double fast_at(const Field& f, int i, const FastStencil& st, double x_arg) {
  if (st.on_node) {
    const int j = i - st.off;
    if (j >= 0 && j < f.grid.n) return f.values[j];
    return interpolate(f, x_arg);
  }
  const int base = i - st.off;
  if (base < 0 || base + 3 >= f.grid.n) return interpolate(f, x_arg);
  const double* v = f.values.data() + base;
  return st.w[0] * v[0] + st.w[1] * v[1] + st.w[2] * v[2] + st.w[3] * v[3];
}

struct FastCorner {
  std::vector<FastStencil> outer_st;
  std::vector<FastStencil> inner_st;
};

FastCorner build_fast_corner(const CornerRule& rule, double rho, double h) {
  FastCorner fc;
  std::vector<double> vo(rule.outer.size());
  for (size_t q = 0; q < rule.outer.size(); ++q) vo[q] = rule.outer[q].v;
  fc.outer_st = build_stencils(vo, rho, h);
  fc.inner_st = build_stencils(rule.iu, rho, h);
  return fc;
}

double corner_at_node(const Field& f, const CumulativePair& cp, const CornerRule& rule,
                      const FastCorner& fc, double rho, int i) {
  const double x = f.grid.point(i);
  double acc = 0.0;
  for (size_t oq = 0; oq < rule.outer.size(); ++oq) {
    const auto& o = rule.outer[oq];
    const double fv = fast_at(f, i, fc.outer_st[oq], x - rho * o.v);
    if (fv == 0.0) continue;
    double inner = 0.0;
    for (int q = o.i0; q < o.i1; ++q)
      inner += rule.iwk[q] * fast_at(f, i, fc.inner_st[q], x - rho * rule.iu[q]);
    acc += o.wv * fv * inner;
  }
  const double closure = f.values[i] * left_integral_to(f, cp, x - rho * rule.t_out) / rho;
  return rho * rho * (acc + closure);
}

}  // namespace

Field product_of_halves(const Field& f) {
  CumulativePair cp = cumulants(f);
  Field out = make_field(f.grid);
  out.values = cp.left * cp.right;
  refit_tails(out);
  return out;
}

Field r2_term(const Field& f, const KernelSpec& spec, double rho) {
  require_rho(rho);
  require_tails(f, "r2_term");
  const LogGrid& g = f.grid;
  Field out = make_field(g);
  if (spec.forced_unit) {  // K(s,1) forced to 1: the [K-1] factor vanishes
    refit_tails(out);
    return out;
  }

  const double t_cut = kernel_cut(spec);
  const int nc = g.cells();
  const FineNodes fn = fine_nodes(f);
  const int band = std::min(nc - 1, static_cast<int>(std::ceil(rho * t_cut / g.h)));

  Eigen::ArrayXd r2g = Eigen::ArrayXd::Zero(g.n);

  // grid x grid band
  Eigen::Matrix<double, kFine, kFine> kap;
  Eigen::ArrayXd prefix(nc + 1);
  for (int d = 1; d <= band; ++d) {
    for (int a = 0; a < kFine; ++a)
      for (int b = 0; b < kFine; ++b) {
        const double t = g.h * (d + fn.off[b] - fn.off[a]) / rho;
        kap(a, b) = reduced_minus_one(spec, std::exp(-t));
      }
    const int cmax = nc - 1 - d;
    Eigen::MatrixXd M = fn.A.topRows(cmax + 1) * kap;
    Eigen::ArrayXd Q =
        (M.array() * fn.A.middleRows(d, cmax + 1).array()).rowwise().sum();
    prefix[0] = 0.0;
    for (int c = 0; c <= cmax; ++c) prefix[c + 1] = prefix[c] + Q[c];
    for (int i = 1; i < g.n; ++i) {
      const int lo = std::max(0, i - d), hi = std::min(i - 1, cmax);
      if (lo <= hi) r2g[i] += prefix[hi + 1] - prefix[lo];
    }
  }

  // strips against the tails
  const TailDecay lt = *f.left_tail, rt = *f.right_tail;
  if (lt.coef != 0.0) {
    Eigen::ArrayXd cell_dot = Eigen::ArrayXd::Zero(nc);
    for (int c = 0; c < nc; ++c) {
      double s = 0.0;
      for (int a = 0; a < kFine; ++a) {
        const double d0 = fn.pos(c, a) - g.x_min;
        if (d0 / rho >= t_cut) break;
        s += fn.A(c, a) * lt.coef * std::exp(lt.rate * g.x_min) *
             tail_conv(spec, rho, d0, lt.rate, t_cut);
      }
      cell_dot[c] = s;
      if (cell_dot[c] == 0.0 && c > 0 && cell_dot[c - 1] == 0.0) break;
    }
    double suffix = 0.0;
    Eigen::ArrayXd SL(g.n);
    SL[g.n - 1] = 0.0;
    for (int i = g.n - 2; i >= 0; --i) {
      suffix += cell_dot[i];
      SL[i] = suffix;
    }
    SL[g.n - 1] = 0.0;
    r2g += SL;
  }
  if (rt.coef != 0.0) {
    Eigen::ArrayXd cell_dot = Eigen::ArrayXd::Zero(nc);
    for (int c = nc - 1; c >= 0; --c) {
      double s = 0.0;
      for (int a = 0; a < kFine; ++a) {
        const double d0 = g.x_max - fn.pos(c, a);
        if (d0 / rho >= t_cut) continue;
        s += fn.A(c, a) * rt.coef * std::exp(-rt.rate * g.x_max) *
             tail_conv(spec, rho, d0, rt.rate, t_cut);
      }
      cell_dot[c] = s;
      if (cell_dot[c] == 0.0 && c < nc - 1 && cell_dot[c + 1] == 0.0) break;
    }
    double pre = 0.0;
    for (int i = 1; i < g.n; ++i) {
      pre += cell_dot[i - 1];
      r2g[i] += pre;
    }
  }
  // both-tail block is nonzero only when the kernel band spans the grid
  if (lt.coef != 0.0 && rt.coef != 0.0 && (g.x_max - g.x_min) / rho < t_cut) {
    const double span = rho * t_cut - (g.x_max - g.x_min);
    const GaussRule& gl = gauss_legendre(24);
    Eigen::ArrayXd xs, ws, yt, wt;
    gauss_on(gl, 0.0, span, xs, ws);
    gauss_on(gl, 0.0, span, yt, wt);
    double c2 = 0.0;
    for (int i = 0; i < xs.size(); ++i)
      for (int j = 0; j < yt.size(); ++j) {
        const double t = (g.x_max - g.x_min + xs[i] + yt[j]) / rho;
        c2 += ws[i] * wt[j] * reduced_minus_one(spec, std::exp(-t)) *
              std::exp(-lt.rate * xs[i] - rt.rate * yt[j]);
      }
    r2g += c2 * lt.coef * rt.coef * std::exp(lt.rate * g.x_min - rt.rate * g.x_max);
  }

  out.values = r2g;
  refit_tails(out);
  return out;
}

Field r3_term(const Field& f, const KernelSpec& spec, double rho) {
  require_rho(rho);
  require_tails(f, "r3_term");
  const LogGrid& g = f.grid;
  const CornerRule rule = build_corner_rule(spec, rho, g.h);
  const FastCorner fc = build_fast_corner(rule, rho, g.h);
  const CumulativePair cp = cumulants(f);
  Field out = make_field(g);
  parallel_for(g.n, [&](std::ptrdiff_t i) {
    out.values[i] = corner_at_node(f, cp, rule, fc, rho, static_cast<int>(i));
  });
  refit_tails(out);
  return out;
}

double corner_point(const Field& f, const KernelSpec& spec, double rho, double x) {
  require_rho(rho);
  require_tails(f, "corner_point");
  const CornerRule rule = build_corner_rule(spec, rho, f.grid.h);
  const CumulativePair cp = cumulants(f);
  return corner_at(f, cp, rule, rho, x);
}

double kernel_tail_conv(const KernelSpec& spec, double rho, double d0, double r) {
  return tail_conv(spec, rho, d0, r, kernel_cut(spec));
}

double r3_log_truncated(const Field& f, const KernelSpec& spec, double rho, double x,
                        double depth) {
  require_rho(rho);
  require_tails(f, "r3_log_truncated");
  if (depth / rho > 600.0)
    throw std::domain_error("r3_log_truncated: depth/rho too large for the direct form");
  const GaussRule& gl_out = gauss_legendre(10);
  const GaussRule& gl_in = gauss_legendre(8);
  Eigen::ArrayXd xs, ws, zs, wz;

  // inner integral over z in (max(x - rho V(u), x - depth), x), directly
  // in the log-mass coordinate; panels grow geometrically away from the
  // exponential peak at the lower limit
  auto inner_at = [&](double u) {
    const double y = x - rho * u;
    const double span = std::min(rho * corner_height(u), depth);
    if (span <= 0.0) return 0.0;
    double acc = 0.0;
    double zlo = x - span;
    double len = std::min({span, rho * (1.0 + rho), 4.0 * f.grid.h});
    while (zlo < x) {
      const double zhi = std::min(x, zlo + len);
      gauss_on(gl_in, zlo, zhi, zs, wz);
      for (int q = 0; q < zs.size(); ++q)
        acc += wz[q] * reduced(spec, std::exp((y - zs[q]) / rho)) * interpolate(f, zs[q]);
      zlo = zhi;
      len = std::min(2.0 * len, 4.0 * f.grid.h);
    }
    return acc;
  };
  auto outer_chunk = [&](double a, double b) {
    gauss_on(gl_out, a, b, xs, ws);
    double acc = 0.0;
    for (int q = 0; q < xs.size(); ++q)
      acc += ws[q] * interpolate(f, x - rho * xs[q]) * inner_at(xs[q]);
    return acc;
  };

  double total = 0.0;
  // regular part
  double b0 = std::log(2.0);
  const double u_max = 50.0;
  const double step = std::min(3.0, 4.0 * f.grid.h / rho);
  while (b0 < u_max) {
    const double b1 = std::min(u_max, b0 + step);
    total += outer_chunk(b0, b1);
    b0 = b1;
  }
  // dyadic shells toward u = 0, down to where the truncated inner window
  // freezes at (x - depth, x); below that the outer integrand is constant
  // to O(u)
  const double u_frz =
      std::min(corner_height(depth / rho), 0.5 * std::log(2.0));  // V(u_frz) = depth/rho
  double hi = std::log(2.0);
  while (hi > u_frz) {
    const double lo = std::max(u_frz, 0.5 * hi);
    total += outer_chunk(lo, hi);
    hi = lo;
  }
  total += u_frz * interpolate(f, x) * inner_at(0.5 * u_frz);
  return rho * total;
}

Field rhs_full(const Field& lam, const KernelSpec& spec, double rho, bool include_corner) {
  require_rho(rho);
  require_tails(lam, "rhs_full");
  Field out = product_of_halves(lam);
  out.values += r2_term(lam, spec, rho).values;
  if (include_corner) out.values += r3_term(lam, spec, rho).values;
  refit_tails(out);
  return out;
}

RemainderTerms remainder_terms(const Perturbation& psi, const KernelSpec& spec, double rho,
                               bool include_corner) {
  require_rho(rho);
  if (psi.rho != rho)
    throw std::invalid_argument("remainder_terms: psi was built for a different rho");
  const LogGrid& g = psi.field.grid;

  Field psi_f = psi.field;
  if (!psi_f.left_tail || !psi_f.right_tail) refit_tails(psi_f);

  Field full = make_field(g);
  for (int i = 0; i < g.n; ++i)
    full.values[i] = lambda_bar(rho, g.point(i)) + psi_f.values[i];
  refit_tails(full);

  RemainderTerms out;
  out.r1 = product_of_halves(psi_f);
  out.r2 = r2_term(full, spec, rho);
  if (include_corner) {
    out.r3 = r3_term(full, spec, rho);
  } else {
    out.r3 = make_field(g);
    refit_tails(out.r3);
  }
  return out;
}

Eigen::ArrayXd anchored_cumulative(const Field& f) {
  const LogGrid& g = f.grid;
  if (!(g.x_min <= 0.0 && 0.0 <= g.x_max))
    throw std::invalid_argument("anchored_cumulative: grid must straddle 0");
  Field tmp = f;
  tmp.left_tail.reset();
  tmp.right_tail.reset();
  const CumulativePair cp = cumulants(tmp);
  const double at0 = integrate_field(tmp, g.x_min, 0.0);
  return cp.left - at0;
}

Field big_psi(const Field& r, double rho) {
  require_rho(rho);
  const LogGrid& g = r.grid;
  Field ratio = make_field(g);
  for (int i = 0; i < g.n; ++i) ratio.values[i] = r.values[i] / lambda_bar(rho, g.point(i));
  const Eigen::ArrayXd I = anchored_cumulative(ratio);
  Field out = make_field(g);
  for (int i = 0; i < g.n; ++i) out.values[i] = lambda_bar(rho, g.point(i)) * I[i] / (1.0 + rho);
  refit_tails(out);
  return out;
}

}  // namespace coagself
