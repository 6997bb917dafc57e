#include "coagself/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "coagself/quad.hpp"

namespace coagself {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sample window of the local interpolating polynomial around cell c.
// degree+1 consecutive nodes, clamped at the grid edges.
int stencil_base(const LogGrid& g, int cell, int npts, int halo) {
  int base = cell - halo;
  return std::clamp(base, 0, g.n - npts);
}

double local_poly(const Field& f, int cell, int npts, int halo, double x) {
  const LogGrid& g = f.grid;
  const int base = stencil_base(g, cell, npts, halo);
  double nodes[8], vals[8];
  for (int j = 0; j < npts; ++j) {
    nodes[j] = g.point(base + j);
    vals[j] = f.values[base + j];
  }
  return lagrange_value(nodes, vals, npts, x);
}

// Integral over [xa,xb] (inside cell `cell`) of the local quintic.
// GL-3 is exact for degree five.
double cell_piece(const Field& f, int cell, double xa, double xb, int npts, int halo) {
  if (xa == xb) return 0.0;
  const GaussRule& gl = gauss_legendre(3);
  const double c = 0.5 * (xa + xb), s = 0.5 * (xb - xa);
  double acc = 0.0;
  for (int q = 0; q < 3; ++q)
    acc += gl.weights[q] * local_poly(f, cell, npts, halo, c + s * gl.nodes[q]);
  return acc * s;
}

int quintic_pts(const LogGrid& g) { return std::min(6, g.n); }

double left_tail_piece(const Field& f, double a, double b) {
  // integral of coef*e^{rate*x} over (a,b], b <= x_min
  if (!f.left_tail) throw std::runtime_error("integrate_field: left tail descriptor unset");
  const TailDecay& t = *f.left_tail;
  if (t.coef == 0.0) return 0.0;
  if (t.rate <= 0.0) throw std::runtime_error("integrate_field: nonpositive left tail rate");
  const double hi = t.coef * std::exp(t.rate * b) / t.rate;
  const double lo = (a == -kInf) ? 0.0 : t.coef * std::exp(t.rate * a) / t.rate;
  return hi - lo;
}

double right_tail_piece(const Field& f, double a, double b) {
  // integral of coef*e^{-rate*x} over [a,b), a >= x_max
  if (!f.right_tail) throw std::runtime_error("integrate_field: right tail descriptor unset");
  const TailDecay& t = *f.right_tail;
  if (t.coef == 0.0) return 0.0;
  if (t.rate <= 0.0) throw std::runtime_error("integrate_field: nonpositive right tail rate");
  const double lo = t.coef * std::exp(-t.rate * a) / t.rate;
  const double hi = (b == kInf) ? 0.0 : t.coef * std::exp(-t.rate * b) / t.rate;
  return lo - hi;
}

struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double v) {
    double y = v - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

}  // namespace

LogGrid build_grid(double x_min, double x_max, int n) {
  if (n < 2) throw std::invalid_argument("build_grid: need n >= 2");
  if (!(x_min < x_max)) throw std::invalid_argument("build_grid: need x_min < x_max");
  LogGrid g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n = n;
  g.h = (x_max - x_min) / (n - 1);
  return g;
}

Field make_field(const LogGrid& grid) {
  Field f;
  f.grid = grid;
  f.values = Eigen::ArrayXd::Zero(grid.n);
  return f;
}

double interpolate(const Field& f, double x) {
  const LogGrid& g = f.grid;
  if (x < g.x_min) {
    if (!f.left_tail) throw std::runtime_error("interpolate: left tail descriptor unset");
    return f.left_tail->coef * std::exp(f.left_tail->rate * x);
  }
  if (x > g.x_max) {
    if (!f.right_tail) throw std::runtime_error("interpolate: right tail descriptor unset");
    return f.right_tail->coef * std::exp(-f.right_tail->rate * x);
  }
  int cell = std::min(static_cast<int>((x - g.x_min) / g.h), g.n - 2);
  // exact node hits return the sample
  const double ti = (x - g.x_min) / g.h;
  const int near = static_cast<int>(std::lround(ti));
  if (near >= 0 && near < g.n && g.point(near) == x) return f.values[near];
  const int npts = std::min(4, g.n);
  return local_poly(f, cell, npts, 1, x);
}

double integrate_field(const Field& f, double a, double b) {
  if (a >= b) {
    if (a == b) return 0.0;
    throw std::invalid_argument("integrate_field: need a < b");
  }
  const LogGrid& g = f.grid;
  const int npts = quintic_pts(g);
  const int halo = 2;
  KahanSum acc;

  if (a < g.x_min) acc.add(left_tail_piece(f, a, std::min(b, g.x_min)));
  if (b > g.x_max) acc.add(right_tail_piece(f, std::max(a, g.x_max), b));

  const double lo = std::max(a, g.x_min), hi = std::min(b, g.x_max);
  if (lo < hi) {
    int c0 = std::min(static_cast<int>((lo - g.x_min) / g.h), g.n - 2);
    int c1 = std::min(static_cast<int>((hi - g.x_min) / g.h), g.n - 2);
    if (c0 == c1) {
      acc.add(cell_piece(f, c0, lo, hi, npts, halo));
    } else {
      acc.add(cell_piece(f, c0, lo, g.point(c0 + 1), npts, halo));
      for (int c = c0 + 1; c < c1; ++c)
        acc.add(cell_piece(f, c, g.point(c), g.point(c + 1), npts, halo));
      acc.add(cell_piece(f, c1, g.point(c1), hi, npts, halo));
    }
  }
  return acc.s;
}

CumulativePair cumulants(const Field& f) {
  const LogGrid& g = f.grid;
  const int npts = quintic_pts(g);
  CumulativePair cp;
  cp.left.resize(g.n);
  cp.right.resize(g.n);

  Eigen::ArrayXd cell(g.cells());
  for (int c = 0; c < g.cells(); ++c)
    cell[c] = cell_piece(f, c, g.point(c), g.point(c + 1), npts, 2);

  double lmass = 0.0;
  if (f.left_tail && f.left_tail->coef != 0.0) lmass = left_tail_piece(f, -kInf, g.x_min);
  double rmass = 0.0;
  if (f.right_tail && f.right_tail->coef != 0.0) rmass = right_tail_piece(f, g.x_max, kInf);

  KahanSum ls;
  ls.add(lmass);
  cp.left[0] = ls.s;
  for (int c = 0; c < g.cells(); ++c) {
    ls.add(cell[c]);
    cp.left[c + 1] = ls.s;
  }
  KahanSum rs;
  rs.add(rmass);
  cp.right[g.n - 1] = rs.s;
  for (int c = g.cells() - 1; c >= 0; --c) {
    rs.add(cell[c]);
    cp.right[c] = rs.s;
  }
  cp.total = cp.left[g.n - 1] + rmass;
  return cp;
}

double left_integral_to(const Field& f, const CumulativePair& cp, double t) {
  const LogGrid& g = f.grid;
  if (t <= g.x_min) {
    if (!f.left_tail || f.left_tail->coef == 0.0) return 0.0;
    return left_tail_piece(f, -kInf, t);
  }
  if (t >= g.x_max) {
    double v = cp.left[g.n - 1];
    if (t > g.x_max && f.right_tail && f.right_tail->coef != 0.0)
      v += right_tail_piece(f, g.x_max, t);
    return v;
  }
  const int cell = std::min(static_cast<int>((t - g.x_min) / g.h), g.n - 2);
  return cp.left[cell] + cell_piece(f, cell, g.point(cell), t, quintic_pts(g), 2);
}

double gamma_weight(double x, double rho, double beta) {
  return x < 0.0 ? x / (1.0 + rho) : -beta * x;
}

double weighted_norm(const Perturbation& p) {
  if (p.eps <= 0.0) throw std::invalid_argument("weighted_norm: eps must be positive");
  const LogGrid& g = p.field.grid;
  double worst = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double w = p.eps * std::exp(gamma_weight(g.point(i), p.rho, p.beta));
    worst = std::max(worst, std::abs(p.field.values[i]) / w);
  }
  return worst;
}

std::optional<TailDecay> fit_tail(const Field& f, Side side, double window) {
  const LogGrid& g = f.grid;
  int m = std::max(2, static_cast<int>(std::lround(window * g.n)));
  m = std::min(m, g.n);
  const int start = (side == Side::left) ? 0 : g.n - m;

  double sgn = 0.0;
  for (int i = start; i < start + m; ++i) {
    const double v = f.values[i];
    if (v == 0.0 || std::abs(v) < 1e-280) return std::nullopt;
    const double s = v > 0 ? 1.0 : -1.0;
    if (sgn == 0.0) sgn = s;
    if (s != sgn) return std::nullopt;
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = start; i < start + m; ++i) {
    const double x = g.point(i), y = std::log(std::abs(f.values[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  const double slope = (m * sxy - sx * sy) / denom;
  const double icept = (sy - slope * sx) / m;

  TailDecay t;
  if (side == Side::left) {
    t.rate = slope;  // value ~ coef * e^{rate x}
    t.coef = sgn * std::exp(icept);
  } else {
    t.rate = -slope;  // value ~ coef * e^{-rate x}
    t.coef = sgn * std::exp(icept);
  }
  return t;
}

void refit_tails(Field& f, double window) {
  auto lt = fit_tail(f, Side::left, window);
  auto rt = fit_tail(f, Side::right, window);
  f.left_tail = lt ? *lt : TailDecay{1.0, 0.0};
  f.right_tail = rt ? *rt : TailDecay{1.0, 0.0};
}

}  // namespace coagself
