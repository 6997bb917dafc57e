#include "coagself/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "coagself/integral_ops.hpp"
#include "coagself/quad.hpp"

namespace coagself {

namespace {

constexpr double kMaxExp = 690.0;  // |ln xi| kept representable

// uniform grid in l = ln xi underlying a mass profile
struct LogXi {
  double l0, l1, d;
  int n;
};

LogXi logxi_of(const MassProfile& gp) {
  if (gp.n() < 2) throw std::invalid_argument("mass profile needs >= 2 points");
  LogXi lx;
  lx.n = gp.n();
  lx.l0 = std::log(gp.xi_values[0]);
  lx.l1 = std::log(gp.xi_values[lx.n - 1]);
  lx.d = (lx.l1 - lx.l0) / (lx.n - 1);
  return lx;
}

// field in l = ln xi whose integral is int g dxi (values g * xi)
Field log_density(const MassProfile& gp) {
  const LogXi lx = logxi_of(gp);
  Field f = make_field(build_grid(lx.l0, lx.l1, lx.n));
  f.values = gp.g_values * gp.xi_values;
  return f;
}

double fit_window_slope(const Eigen::ArrayXd& xs, const Eigen::ArrayXd& ys) {
  const int m = static_cast<int>(xs.size());
  const double sx = xs.sum(), sy = ys.sum();
  const double sxx = (xs * xs).sum(), sxy = (xs * ys).sum();
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw std::domain_error("tail_exponent: degenerate window");
  return (m * sxy - sx * sy) / denom;
}

}  // namespace

MassProfile lambda_to_g(const Field& lam, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::domain_error("lambda_to_g: rho must lie in (0,1]");
  const LogGrid& g = lam.grid;
  const double l0 = std::max(g.x_min / rho, -kMaxExp);
  const double l1 = std::min(g.x_max / rho, kMaxExp);
  const int per_decade = 16;
  const int n = std::max(2, static_cast<int>(std::ceil((l1 - l0) / std::log(10.0) * per_decade)) + 1);
  const double d = (l1 - l0) / (n - 1);

  MassProfile out;
  out.rho = rho;
  out.xi_values.resize(n);
  out.g_values.resize(n);
  for (int j = 0; j < n; ++j) {
    const double l = l0 + j * d;
    const double xi = std::exp(l);
    out.xi_values[j] = xi;
    out.g_values[j] = rho * interpolate(lam, rho * l) / xi;
  }
  out.mass = profile_mass(out);
  return out;
}

Field g_to_lambda(const MassProfile& gp, const LogGrid& grid) {
  if (!(gp.rho > 0.0 && gp.rho <= 1.0)) throw std::domain_error("g_to_lambda: bad rho");
  Field f = make_field(grid);
  for (int i = 0; i < grid.n; ++i) {
    const double xi = std::exp(grid.point(i) / gp.rho);
    f.values[i] = xi * eval_g(gp, xi) / gp.rho;
  }
  refit_tails(f);
  return f;
}

double eval_g(const MassProfile& gp, double xi) {
  if (!(xi > 0.0)) throw std::domain_error("eval_g: xi must be positive");
  const LogXi lx = logxi_of(gp);
  const double l = std::log(xi);

  auto log_at = [&](int i) {
    const double v = gp.g_values[i];
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
  };
  if (l < lx.l0 || l > lx.l1) {
    // power-law extension from the outermost pair
    const int i0 = (l < lx.l0) ? 0 : lx.n - 2;
    const double y0 = log_at(i0), y1 = log_at(i0 + 1);
    if (!std::isfinite(y0) || !std::isfinite(y1)) return 0.0;
    const double slope = (y1 - y0) / lx.d;
    const double base = (l < lx.l0) ? lx.l0 : lx.l1;
    const double yb = (l < lx.l0) ? y0 : y1;
    return std::exp(yb + slope * (l - base));
  }
  int cell = std::min(static_cast<int>((l - lx.l0) / lx.d), lx.n - 2);
  int base = std::clamp(cell - 1, 0, lx.n - 4);
  double nodes[4], vals[4];
  bool positive = true;
  for (int j = 0; j < 4; ++j) {
    nodes[j] = lx.l0 + (base + j) * lx.d;
    const double v = gp.g_values[base + j];
    if (v <= 0.0) positive = false;
    vals[j] = v;
  }
  if (!positive) return std::max(0.0, lagrange_value(nodes, vals, 4, l));
  double logs[4];
  for (int j = 0; j < 4; ++j) logs[j] = std::log(vals[j]);
  return std::exp(lagrange_value(nodes, logs, 4, l));
}

double profile_mass(const MassProfile& gp) {
  Field f = log_density(gp);
  return integrate_field(f, f.grid.x_min, f.grid.x_max);
}

double mass_above(const MassProfile& gp, double R) {
  if (!(R > 0.0)) throw std::domain_error("mass_above: R must be positive");
  Field f = log_density(gp);
  const double l = std::log(R);
  if (l >= f.grid.x_max) return 0.0;
  return integrate_field(f, std::max(l, f.grid.x_min), f.grid.x_max);
}

double mass_below(const MassProfile& gp, double x) {
  if (!(x > 0.0)) throw std::domain_error("mass_below: x must be positive");
  Field f = log_density(gp);
  const double l = std::log(x);
  if (l <= f.grid.x_min) return 0.0;
  return integrate_field(f, f.grid.x_min, std::min(l, f.grid.x_max));
}

double alpha_moment(const MassProfile& gp, double alpha) {
  Field f = log_density(gp);
  for (int i = 0; i < f.grid.n; ++i)
    f.values[i] *= std::exp(alpha * f.grid.point(i));
  return integrate_field(f, f.grid.x_min, f.grid.x_max);
}

std::pair<double, double> heuristic_b(double rho, double M) {
  if (!(rho > 0.0)) throw std::domain_error("heuristic_b: rho must be positive");
  if (!(M > 0.0)) throw std::domain_error("heuristic_b: M must be positive");
  return {M * (1.0 + rho) / rho, rho / (1.0 + rho)};
}

double tail_exponent(const Field& f, Side side, double window, double exclude) {
  const LogGrid& g = f.grid;
  int m = std::max(4, static_cast<int>(std::lround(window * g.n)));
  int e = std::max(0, static_cast<int>(std::lround(exclude * g.n)));
  if (m - e < 4) throw std::invalid_argument("tail_exponent: window too small");
  const int lo = (side == Side::left) ? e : g.n - m;
  const int hi = (side == Side::left) ? m : g.n - e;  // [lo, hi)
  Eigen::ArrayXd xs(hi - lo), ys(hi - lo);
  for (int i = lo; i < hi; ++i) {
    const double v = f.values[i];
    if (!(v > 0.0) && !(v < 0.0))
      throw std::domain_error("tail_exponent: zero value in fit window");
    if (v < 0.0) throw std::domain_error("tail_exponent: nonpositive value in fit window");
    xs[i - lo] = g.point(i);
    ys[i - lo] = std::log(v);
  }
  const double slope = fit_window_slope(xs, ys);
  return (side == Side::left) ? slope : -slope;
}

double tail_exponent(const MassProfile& gp, Side side, double window, double exclude) {
  const LogXi lx = logxi_of(gp);
  int m = std::max(4, static_cast<int>(std::lround(window * lx.n)));
  int e = std::max(0, static_cast<int>(std::lround(exclude * lx.n)));
  if (m - e < 4) throw std::invalid_argument("tail_exponent: window too small");
  const int lo = (side == Side::left) ? e : lx.n - m;
  const int hi = (side == Side::left) ? m : lx.n - e;
  Eigen::ArrayXd xs(hi - lo), ys(hi - lo);
  for (int i = lo; i < hi; ++i) {
    const double v = gp.g_values[i];
    if (!(v > 0.0)) throw std::domain_error("tail_exponent: nonpositive value in fit window");
    xs[i - lo] = lx.l0 + i * lx.d;
    ys[i - lo] = std::log(v);
  }
  return -fit_window_slope(xs, ys);
}

double selfsim_density(const MassProfile& gp, double b, double xi, double t) {
  if (!(xi > 0.0)) throw std::domain_error("selfsim_density: xi must be positive");
  const double s = std::exp(-b * t);
  return s * eval_g(gp, xi * s) / xi;
}

double tail_amplitude(double rho, double M, double t) {
  return std::exp(M * (1.0 + rho) * t);
}

double beta0_tail_prediction(double alpha, double beta0, double M_alpha, double x) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("beta0_tail_prediction: alpha must lie in (0,1]");
  if (!(beta0 > 0.0)) throw std::domain_error("beta0_tail_prediction: beta0 must be positive");
  if (!(M_alpha > 0.0)) throw std::domain_error("beta0_tail_prediction: M_alpha must be positive");
  if (!(x > 0.0)) throw std::domain_error("beta0_tail_prediction: x must be positive");
  return std::pow(x, alpha - 1.0) * std::exp(-std::pow(x, alpha) / (beta0 * alpha * M_alpha));
}

double calibrate_tail(Field& lam, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("calibrate_tail: rho must lie in (0,1)");
  const LogGrid& g = lam.grid;
  const Field t0 = product_of_halves(lam);

  // quiet window: x past the knee, omega negligible against lambda,
  // values above the cancellation floor
  Eigen::ArrayXd xs(g.n), ys(g.n);
  int m = 0;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.point(i);
    if (x < 2.0) continue;
    const double l = lam.values[i];
    if (!(l > 1e-250)) continue;
    const double om = l - t0.values[i];
    if (std::abs(om) > 1e-3 * l) continue;
    xs[m] = x;
    ys[m] = std::log(l);
    ++m;
  }
  if (m < 8) throw std::runtime_error("calibrate_tail: no quiet tail window found");
  double sum = 0.0;
  for (int i = 0; i < m; ++i) sum += ys[i] + xs[i];
  const double c_lambda = std::exp(sum / m);  // lambda ~ c e^{-x} on the window

  const double shift = std::log(rho * c_lambda);
  Field shifted = make_field(g);
  for (int i = 0; i < g.n; ++i) shifted.values[i] = interpolate(lam, g.point(i) + shift);
  if (lam.left_tail)
    shifted.left_tail = TailDecay{lam.left_tail->rate,
                                  lam.left_tail->coef * std::exp(lam.left_tail->rate * shift)};
  if (lam.right_tail)
    shifted.right_tail = TailDecay{lam.right_tail->rate,
                                   lam.right_tail->coef * std::exp(-lam.right_tail->rate * shift)};
  lam = shifted;
  return shift;
}

}  // namespace coagself
