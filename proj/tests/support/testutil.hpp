#pragma once

#include <cmath>
#include <random>

#include "coagself/fixedpoint.hpp"
#include "coagself/grid.hpp"

namespace coagself::testutil {

// Smooth mean-zero perturbation inside the weighted envelope: an odd
// sech^2-shaped bump scaled to the requested weighted norm.
inline Perturbation make_psi(const LogGrid& g, double rho, double eps, double beta,
                             double norm_target) {
  Perturbation p;
  p.rho = rho;
  p.eps = eps;
  p.beta = beta;
  p.field = make_field(g);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.point(i);
    const double s = 1.0 / std::cosh(0.5 * x);
    p.field.values[i] = s * s * std::tanh(0.5 * x);  // odd: integral is zero
  }
  refit_tails(p.field);
  const double w = weighted_norm(p);
  p.field.values *= norm_target / w;
  if (p.field.left_tail) p.field.left_tail->coef *= norm_target / w;
  if (p.field.right_tail) p.field.right_tail->coef *= norm_target / w;
  return p;
}

// Seeded random mean-zero perturbation in X_{rho,eps}: a few random
// bumps, de-meaned against a fixed unit-mass bump, then normalized.
inline Perturbation random_psi(const LogGrid& g, double rho, double eps, double beta,
                               double norm_target, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uc(-4.0, 4.0), ua(-1.0, 1.0),
      uw(0.5, 2.0);
  Perturbation p;
  p.rho = rho;
  p.eps = eps;
  p.beta = beta;
  p.field = make_field(g);
  for (int b = 0; b < 4; ++b) {
    const double c = uc(rng), a = ua(rng), w = uw(rng);
    for (int i = 0; i < g.n; ++i) {
      const double t = (g.point(i) - c) / w;
      p.field.values[i] += a * std::exp(-t * t);
    }
  }
  // damp to the envelope shape so the weighted norm is attained mid-grid
  for (int i = 0; i < g.n; ++i)
    p.field.values[i] *= std::exp(gamma_weight(g.point(i), rho, beta));
  // de-mean with a unit-mass bump inside the envelope
  Field bump = make_field(g);
  for (int i = 0; i < g.n; ++i) {
    const double s = 1.0 / std::cosh(g.point(i));
    bump.values[i] = s * s;
  }
  refit_tails(bump);
  refit_tails(p.field);
  const double m0 = integrate_field(bump, g.x_min, g.x_max);
  const double mp = integrate_field(p.field, g.x_min, g.x_max);
  p.field.values -= (mp / m0) * bump.values;
  refit_tails(p.field);
  const double w = weighted_norm(p);
  p.field.values *= norm_target / w;
  refit_tails(p.field);
  return p;
}

}  // namespace coagself::testutil
