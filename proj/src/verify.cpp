#include "coagself/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "coagself/fixedpoint.hpp"
#include "coagself/integral_ops.hpp"
#include "coagself/profile.hpp"

namespace coagself {

namespace {

double weight_floor(double x, double rho, double beta, double eps, double lam) {
  return eps * std::exp(gamma_weight(x, rho, beta)) + std::abs(lam);
}

}  // namespace

double residual(const Field& lam, const KernelSpec& spec, double rho, double eps, double beta,
                bool include_corner) {
  if (beta == 0.0) beta = default_beta(rho);
  const Field rhs = rhs_full(lam, spec, rho, include_corner);
  const LogGrid& g = lam.grid;
  double worst = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double num = std::abs((1.0 + rho) * lam.values[i] - rhs.values[i]);
    worst = std::max(worst, num / weight_floor(g.point(i), rho, beta, eps, lam.values[i]));
  }
  return worst;
}

OmegaReport omega_remainder(const Field& lam, const KernelSpec& spec, double rho,
                            bool include_corner) {
  const LogGrid& g = lam.grid;
  OmegaReport rep;

  const Field t0 = product_of_halves(lam);
  rep.omega = make_field(g);
  rep.omega.values = lam.values - t0.values;

  // three-term form: omega = R2[lam] + R3[lam] - rho*lam
  Eigen::ArrayXd three = r2_term(lam, spec, rho).values - rho * lam.values;
  if (include_corner) three += r3_term(lam, spec, rho).values;
  rep.identity_gap = (rep.omega.values - three).abs().maxCoeff();

  const double res = residual(lam, spec, rho, 0.1, 0.0, include_corner);
  const double scale = std::max(1e-12, 10.0 * res);
  double gap_w = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double w = weight_floor(g.point(i), rho, default_beta(rho), 0.1, lam.values[i]);
    gap_w = std::max(gap_w, std::abs(rep.omega.values[i] - three[i]) / w);
  }
  if (gap_w > scale)
    throw std::runtime_error("omega_remainder: three-term identity mismatch beyond tolerance");

  // decay-rate fit on the quiet part of x>0, above the cancellation floor
  std::vector<double> xs, ys;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.point(i);
    const double w = std::abs(rep.omega.values[i]);
    if (x < 2.0 || w < 1e-14) continue;
    xs.push_back(x);
    ys.push_back(std::log(w));
  }
  if (xs.size() < 8) {
    rep.fit_rate = 0.0;
    return rep;
  }
  const int m = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  rep.fit_rate = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
  return rep;
}

double derivative_ratio(const Field& lam) {
  const LogGrid& g = lam.grid;
  if (g.n < 3) throw std::invalid_argument("derivative_ratio: grid too small");
  for (int i = 0; i < g.n; ++i)
    if (!(lam.values[i] > 0.0))
      throw std::domain_error("derivative_ratio: profile not positive at every node");
  const auto& v = lam.values;
  double worst = 0.0;
  for (int i = 0; i < g.n; ++i) {
    double d;
    if (i == 0)  // second-order one-sided
      d = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * g.h);
    else if (i == g.n - 1)
      d = (3.0 * v[g.n - 1] - 4.0 * v[g.n - 2] + v[g.n - 3]) / (2.0 * g.h);
    else
      d = (v[i + 1] - v[i - 1]) / (2.0 * g.h);
    worst = std::max(worst, std::abs(d) / v[i]);
  }
  return worst;
}

EnvelopeReport envelope_check(const Field& lam, double rho, double beta) {
  if (beta == 0.0) beta = default_beta(rho);
  const LogGrid& g = lam.grid;
  EnvelopeReport rep;
  double lo_l = std::numeric_limits<double>::infinity();
  double up_l = lo_l, up_r = lo_l;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.point(i), v = lam.values[i];
    if (x < 0.0) {
      const double e = std::exp(x / (1.0 + rho));
      lo_l = std::min(lo_l, v / (e / 16.0));
      up_l = std::min(up_l, v > 0.0 ? (2.0 * e) / v : 0.0);
    } else {
      const double cap = 2.0 * std::exp(-beta * x);
      up_r = std::min(up_r, std::abs(v) > 0.0 ? cap / std::abs(v)
                                              : std::numeric_limits<double>::infinity());
    }
  }
  rep.lower_left = lo_l;
  rep.upper_left = up_l;
  rep.upper_right = up_r;
  rep.pass = lo_l >= 1.0 && up_l >= 1.0 && up_r >= 1.0;
  return rep;
}

VerificationReport verify_profile(const Field& lam, const KernelSpec& spec, double rho,
                                  double eps, double beta, bool include_corner) {
  if (beta == 0.0) beta = default_beta(rho);
  VerificationReport rep;
  rep.residual = residual(lam, spec, rho, eps, beta, include_corner);
  rep.omega_fit_rate = omega_remainder(lam, spec, rho, include_corner).fit_rate;
  rep.derivative_ratio = derivative_ratio(lam);
  rep.envelope = envelope_check(lam, rho, beta);
  rep.tail_left = tail_exponent(lam, Side::left);
  rep.tail_right = tail_exponent(lam, Side::right);
  return rep;
}

}  // namespace coagself
