#include "coagself/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "coagself/integral_ops.hpp"
#include "coagself/quad.hpp"

namespace coagself {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_rho01(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::domain_error("rho must lie in [0,1)");
}

// Equation-consistent right tail coefficient: choose c_R so that the
// discrete equation balances exactly at the last node,
// (1+rho) l_n = Lambda_n * c_R e^{-aR x_n}/aR + c_R * J + r3_n,
// where J collects the two-sided strip against the tail. This keeps the
// weighted residual flat out to the grid edge, where the fitted tail
// alone is the limiting error.
void close_right_tail(Field& lam, const KernelSpec& spec, double rho, bool include_corner) {
  if (!lam.right_tail || lam.right_tail->rate <= 0.0 || lam.right_tail->coef <= 0.0) return;
  const LogGrid& g = lam.grid;
  const double ar = lam.right_tail->rate;
  const double xn = g.x_max;
  const double ln = lam.values[g.n - 1];
  const double lam_n = cumulants(lam).left[g.n - 1];

  // J = e^{-aR xn} * int_{y<xn} F(y) conv(xn - y) dy  (band near xn only)
  double J = 0.0;
  if (!spec.forced_unit) {
    const double reach = rho * 60.0 / std::clamp(spec.alpha, 0.05, 1.0);
    const double lo = std::max(g.x_min, xn - reach);
    const GaussRule& gl = gauss_legendre(12);
    Eigen::ArrayXd xs, ws;
    const double panel = std::clamp(3.0 * rho / std::clamp(spec.alpha, 0.05, 1.0), g.h, 4.0);
    double y0 = lo;
    while (y0 < xn) {
      const double y1 = std::min(xn, y0 + panel);
      gauss_on(gl, y0, y1, xs, ws);
      for (int q = 0; q < xs.size(); ++q)
        J += ws[q] * interpolate(lam, xs[q]) * kernel_tail_conv(spec, rho, xn - xs[q], ar);
      y0 = y1;
    }
    J *= std::exp(-ar * xn);
  }

  const double r3n = include_corner ? corner_point(lam, spec, rho, xn) : 0.0;
  const double denom = lam_n * std::exp(-ar * xn) / ar + J;
  if (denom <= 0.0) return;
  const double cr = ((1.0 + rho) * ln - r3n) / denom;
  if (!(cr > 0.0) || std::abs(cr / lam.right_tail->coef - 1.0) > 0.5) return;
  lam.right_tail->coef = cr;
}

void close_left_tail(Field& lam, const KernelSpec& spec, double rho, bool include_corner) {
  if (!lam.left_tail || lam.left_tail->rate <= 0.0 || lam.left_tail->coef <= 0.0) return;
  const LogGrid& g = lam.grid;
  const double al = lam.left_tail->rate;
  const double x0 = g.x_min;
  const double l0 = lam.values[0];
  const double mr0 = cumulants(lam).right[0];

  double JL = 0.0;
  if (!spec.forced_unit) {
    const double reach = rho * 60.0 / std::clamp(spec.alpha, 0.05, 1.0);
    const double hi = std::min(g.x_max, x0 + reach);
    const GaussRule& gl = gauss_legendre(12);
    Eigen::ArrayXd xs, ws;
    const double panel = std::clamp(3.0 * rho / std::clamp(spec.alpha, 0.05, 1.0), g.h, 4.0);
    double z0 = x0;
    while (z0 < hi) {
      const double z1 = std::min(hi, z0 + panel);
      gauss_on(gl, z0, z1, xs, ws);
      for (int q = 0; q < xs.size(); ++q)
        JL += ws[q] * interpolate(lam, xs[q]) * kernel_tail_conv(spec, rho, xs[q] - x0, al);
      z0 = z1;
    }
    JL *= std::exp(al * x0);
  }

  double cl = lam.left_tail->coef;
  for (int pass = 0; pass < 2; ++pass) {
    lam.left_tail->coef = cl;
    const double r30 = include_corner ? corner_point(lam, spec, rho, x0) : 0.0;
    const double denom = std::exp(al * x0) / al * mr0 + JL;
    if (denom <= 0.0) break;
    const double next = ((1.0 + rho) * l0 - r30) / denom;
    if (!(next > 0.0) || std::abs(next / cl - 1.0) > 0.5) break;
    cl = next;
  }
  lam.left_tail->coef = cl;
}

}  // namespace

double lambda_bar(double rho, double x) {
  require_rho01(rho);
  const double u = 0.5 * x / (1.0 + rho);
  const double c = std::cosh(u);
  return 1.0 / (4.0 * (1.0 + rho) * c * c);
}

double lambda_bar_prime(double rho, double x) {
  require_rho01(rho);
  const double u = 0.5 * x / (1.0 + rho);
  return -lambda_bar(rho, x) * std::tanh(u) / (1.0 + rho);
}

double lambda_bar_cdf(double rho, double x) {
  require_rho01(rho);
  return 1.0 / (1.0 + std::exp(-x / (1.0 + rho)));
}

Field lambda_bar_field(const LogGrid& grid, double rho) {
  require_rho01(rho);
  Field f = make_field(grid);
  for (int i = 0; i < grid.n; ++i) f.values[i] = lambda_bar(rho, grid.point(i));
  const double rate = 1.0 / (1.0 + rho);
  f.left_tail = TailDecay{rate, rate};
  f.right_tail = TailDecay{rate, rate};
  return f;
}

// Lower third of the admissible window (2/3, 1/(1+rho)). The midpoint
// choice puts the weight too close to the 1/(1+rho) wall: the map's
// right-tail gain scales like 1/(1/(1+rho) - beta) and the early iterates
// then grow transiently in the weighted norm for rho ~ 0.2.
double default_beta(double rho) {
  const double lo = 2.0 / 3.0, hi = 1.0 / (1.0 + rho);
  return lo + (hi - lo) / 3.0;
}

void SolveConfig::finalize() {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0,1)");
  if (grid.n == 0) grid = build_grid(-40.0, 40.0, 2048);
  if (beta == 0.0) beta = default_beta(rho);
  if (!(beta > 0.5 && beta < 1.0 / (1.0 + rho)))
    throw std::invalid_argument("beta must lie in (1/2, 1/(1+rho))");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
}

Perturbation apply_H(const Perturbation& psi, const KernelSpec& spec, double rho,
                     bool include_corner) {
  const LogGrid& g = psi.field.grid;
  RemainderTerms R = remainder_terms(psi, spec, rho, include_corner);

  Field total = make_field(g);
  total.values = R.r1.values + R.r2.values + R.r3.values;

  Field ratio = make_field(g);
  for (int i = 0; i < g.n; ++i) ratio.values[i] = total.values[i] / lambda_bar(rho, g.point(i));
  const Eigen::ArrayXd I = anchored_cumulative(ratio);

  Perturbation out;
  out.rho = psi.rho;
  out.eps = psi.eps;
  out.beta = psi.beta;
  out.field = make_field(g);
  const double onep = 1.0 + rho;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.point(i);
    const double pref = -lambda_bar(rho, x) * std::tanh(0.5 * x / onep);
    out.field.values[i] = pref * I[i] / (onep * onep) + total.values[i] / onep;
  }
  refit_tails(out.field);
  return out;
}

SolveResult solve(const KernelSpec& spec, const SolveConfig& cfg_in) {
  SolveConfig cfg = cfg_in;
  cfg.finalize();
  const LogGrid& g = cfg.grid;

  Perturbation psi;
  psi.rho = cfg.rho;
  psi.eps = cfg.eps;
  psi.beta = cfg.beta;
  psi.field = make_field(g);
  refit_tails(psi.field);

  SolveResult res;
  SolveReport& rep = res.report;
  double prev_delta = 0.0;
  int stall = 0;

  for (int it = 1; it <= cfg.max_iter; ++it) {
    Perturbation next = apply_H(psi, spec, cfg.rho, cfg.include_corner);
    Perturbation delta = next;
    delta.field.values = next.field.values - psi.field.values;
    const double dn = weighted_norm(delta);
    rep.iterations = it;
    if (it >= 2 && prev_delta > 0.0) {
      const double ratio = dn / prev_delta;
      rep.contraction_ratios.push_back(ratio);
      stall = (ratio >= 1.0) ? stall + 1 : 0;
    }
    psi = next;
    if (dn < cfg.tol) {
      rep.converged = true;
      break;
    }
    if (stall >= 5) break;  // divergence: report, don't throw
    prev_delta = dn;
  }

  // fixed-point residual in the weighted norm
  {
    Perturbation check = apply_H(psi, spec, cfg.rho, cfg.include_corner);
    check.field.values -= psi.field.values;
    rep.final_weighted_residual = weighted_norm(check);
  }
  if (rep.converged && rep.final_weighted_residual > cfg.tol) rep.converged = false;

  Field lam = make_field(g);
  for (int i = 0; i < g.n; ++i) lam.values[i] = lambda_bar(cfg.rho, g.point(i)) + psi.field.values[i];
  refit_tails(lam);
  close_right_tail(lam, spec, cfg.rho, cfg.include_corner);
  close_left_tail(lam, spec, cfg.rho, cfg.include_corner);

  if (rep.converged) {
    const double mass = integrate_field(lam, -kInf, kInf);
    if (mass > 0.0) {
      lam.values /= mass;
      if (lam.left_tail) lam.left_tail->coef /= mass;
      if (lam.right_tail) lam.right_tail->coef /= mass;
    }
  }
  rep.mass = integrate_field(lam, -kInf, kInf);
  rep.tail_left = lam.left_tail ? lam.left_tail->rate : 0.0;
  rep.tail_right = lam.right_tail ? lam.right_tail->rate : 0.0;
  res.lambda = lam;
  return res;
}

RhoSweepReport estimate_rho_star(const KernelSpec& spec, const std::vector<double>& rho_values,
                                 SolveConfig cfg_template) {
  RhoSweepReport out;
  double prev = 0.0;
  for (double r : rho_values) {
    if (!(r > prev && r < 1.0))
      throw std::invalid_argument("estimate_rho_star: rho values must ascend within (0,1)");
    prev = r;
  }
  for (double r : rho_values) {
    SolveConfig cfg = cfg_template;
    cfg.rho = r;
    cfg.beta = 0.0;  // re-derive the admissible default for this rho
    SolveResult sr = solve(spec, cfg);
    RhoSweepEntry e;
    e.rho = r;
    e.converged = sr.report.converged;
    e.iterations = sr.report.iterations;
    e.final_weighted_residual = sr.report.final_weighted_residual;
    for (double q : sr.report.contraction_ratios)
      e.max_contraction_ratio = std::max(e.max_contraction_ratio, q);
    out.entries.push_back(e);
    if (e.converged) out.largest_converged_rho = r;
  }
  return out;
}

}  // namespace coagself
