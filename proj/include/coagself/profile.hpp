#pragma once

#include <utility>

#include "coagself/grid.hpp"

namespace coagself {

// Self-similar profile in the mass coordinate, sampled on a geometric
// grid (uniform in ln xi).
struct MassProfile {
  Eigen::ArrayXd xi_values;
  Eigen::ArrayXd g_values;
  double rho = 0.0;
  double mass = 0.0;

  int n() const { return static_cast<int>(xi_values.size()); }
};

// g(xi) = rho * lambda(rho ln xi) / xi. Mass-preserving; the xi span is
// e^{x_min/rho}..e^{x_max/rho}, clamped to the representable exponent
// range.
MassProfile lambda_to_g(const Field& lam, double rho);

// Inverse map, sampling g back onto a log-mass grid.
Field g_to_lambda(const MassProfile& gp, const LogGrid& grid);

// Log-log local cubic interpolation with power-law extension beyond the
// sampled span.
double eval_g(const MassProfile& gp, double xi);

double profile_mass(const MassProfile& gp);
// int over (R, inf) of g.
double mass_above(const MassProfile& gp, double R);
// int over (0, x) of g.
double mass_below(const MassProfile& gp, double x);
// int xi^alpha g dxi.
double alpha_moment(const MassProfile& gp, double alpha);

// b = M (1+rho)/rho and the origin exponent a = rho/(1+rho).
std::pair<double, double> heuristic_b(double rho, double M);

// Least-squares decay rate of log|values| over the outer `window`
// fraction, excluding the outermost `exclude` fraction. Positive for
// decaying tails.
double tail_exponent(const Field& f, Side side, double window = 0.15, double exclude = 0.02);
// Power-law decay exponent of a mass profile (slope of ln g vs ln xi,
// negated).
double tail_exponent(const MassProfile& gp, Side side, double window = 0.15,
                     double exclude = 0.02);

// f(xi,t) = e^{-bt} g(xi e^{-bt}) / xi.
double selfsim_density(const MassProfile& gp, double b, double xi, double t);

// A(t) = e^{M(1+rho)t}.
double tail_amplitude(double rho, double M, double t);

// Stretched-exponential prediction for class-II kernels with beta0 < 0
// convention: x^{alpha-1} e^{-x^alpha/(beta0 alpha M_alpha)}.
double beta0_tail_prediction(double alpha, double beta0, double M_alpha, double x);

// Representative of the scaling family with unit far-tail coefficient in
// the mass coordinate (g ~ xi^{-(1+rho)}): a shift in x, mass invariant.
// The fitted e^{-x} coefficient is taken over the quiet window where the
// remainder omega is negligible. Returns the shift applied.
double calibrate_tail(Field& lam, double rho);

}  // namespace coagself
