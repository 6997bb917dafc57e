#pragma once

#include "coagself/grid.hpp"
#include "coagself/kernel.hpp"

namespace coagself {

// Product of one-sided integrals: (int_{-inf}^x F)(int_x^inf F) at every
// grid node. This is the leading term of the transformed equation, and
// applied to a mean-zero perturbation it is the remainder term R1.
Field product_of_halves(const Field& f);

// Two-sided remainder integral over {y < x < z} against [K(e^{(y-z)/rho},1)-1].
Field r2_term(const Field& f, const KernelSpec& spec, double rho);

// Corner-region integral (the translated region Omega_rho), evaluated in
// substituted coordinates where the domain is {u>0, 0<v<V(u)},
// V(u) = -ln(1-e^{-u}); the endpoint singularity at u->0 is absorbed by a
// power-law change of variable.
Field r3_term(const Field& f, const KernelSpec& spec, double rho);

// Corner integral at a single point (same rule as r3_term).
double corner_point(const Field& f, const KernelSpec& spec, double rho, double x);

// Same corner integral at a single point, computed directly in the log
// coordinate with the inner limit truncated at depth below x (dyadic
// outer shells with geometric tail extrapolation). Cross-check path for
// the substituted-coordinate evaluation.
double r3_log_truncated(const Field& f, const KernelSpec& spec, double rho, double x,
                        double depth = 30.0);

// int_0^inf [K(e^{-(d0+s)/rho},1)-1] e^{-r s} ds; building block of the
// strip integrals against an exponential tail.
double kernel_tail_conv(const KernelSpec& spec, double rho, double d0, double r);

// Full right-hand side of the transformed self-similar equation.
Field rhs_full(const Field& lam, const KernelSpec& spec, double rho,
               bool include_corner = true);

struct RemainderTerms {
  Field r1;
  Field r2;
  Field r3;
};

RemainderTerms remainder_terms(const Perturbation& psi, const KernelSpec& spec, double rho,
                               bool include_corner = true);

// Antiderivative solution Psi(x) = lambda_bar(x)/(1+rho) * int_0^x R/lambda_bar.
Field big_psi(const Field& r, double rho);

// int_0^{x_i} of the field for every node i (grid part only; the grid
// must straddle 0).
Eigen::ArrayXd anchored_cumulative(const Field& f);

}  // namespace coagself
