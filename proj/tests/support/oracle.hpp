#pragma once

// Test-only adaptive-quadrature oracle: independent evaluation of the
// transformed-equation integrals by recursive Gauss-Kronrod bisection,
// used to cross-check the production quadratures.

#include <functional>

#include "coagself/grid.hpp"
#include "coagself/kernel.hpp"

namespace coagself::oracle {

// Adaptive GK7-15 on [a,b] down to an absolute tolerance.
double adaptive(const std::function<double(double)>& f, double a, double b, double tol_abs,
                int depth = 48);

// int_a^b of the field (finite limits, samples + tails honoured).
double field_integral(const Field& f, double a, double b, double tol_abs);

// (int_{-inf}^x F)(int_x^inf F) via adaptive quadrature + closed-form tails.
double leading(const Field& f, double x, double tol_abs);

// Two-sided remainder integral at x.
double r2(const Field& f, const coagself::KernelSpec& spec, double rho, double x,
          double tol_abs);

// Additive-kernel separable form of r2 (two 1-D quadratures, centered to
// avoid overflow).
double r2_separable_additive(const Field& f, double rho, double x, double tol_abs);

// Corner integral at x: dyadic outer shells toward the singular end with
// geometric tail extrapolation, adaptive inner integrals in the log-mass
// coordinate.
double r3(const Field& f, const coagself::KernelSpec& spec, double rho, double x,
          double tol_abs);

// Full right-hand side at x.
double rhs(const Field& f, const coagself::KernelSpec& spec, double rho, double x,
           double tol_abs, bool include_corner = true);

}  // namespace coagself::oracle
