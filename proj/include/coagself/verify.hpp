#pragma once

#include "coagself/grid.hpp"
#include "coagself/kernel.hpp"

namespace coagself {

// Weighted sup of |(1+rho) lambda - rhs_full(lambda)| / (eps e^{gamma} + |lambda|).
double residual(const Field& lam, const KernelSpec& spec, double rho, double eps = 0.1,
                double beta = 0.0, bool include_corner = true);

struct OmegaReport {
  Field omega;       // lambda - (int_{-inf}^x lambda)(int_x^inf lambda)
  double fit_rate;   // decay rate of |omega| on x > 0
  double identity_gap;  // sup |direct - three-term| over the grid
};

// The remainder pinning the e^{-x} tail, with the three-term form of the
// equation cross-checked against the direct definition.
OmegaReport omega_remainder(const Field& lam, const KernelSpec& spec, double rho,
                            bool include_corner = true);

// sup |lambda'| / lambda by central differences (one-sided at the ends).
// Throws on nonpositive nodes.
double derivative_ratio(const Field& lam);

struct EnvelopeReport {
  bool pass = false;
  double lower_left = 0.0;   // min over x<0 of lambda / ((1/16) e^{x/(1+rho)})
  double upper_left = 0.0;   // min over x<0 of 2 e^{x/(1+rho)} / lambda
  double upper_right = 0.0;  // min over x>0 of 2 e^{-beta x} / |lambda|
};

// Corollary-style envelope: (1/16) e^{x/(1+rho)} <= lambda <= 2 e^{x/(1+rho)}
// for x<0 and |lambda| <= 2 e^{-beta x} for x>0. Margins >= 1 pass.
EnvelopeReport envelope_check(const Field& lam, double rho, double beta);

struct VerificationReport {
  double residual = 0.0;
  double omega_fit_rate = 0.0;
  double derivative_ratio = 0.0;
  EnvelopeReport envelope;
  double tail_left = 0.0;
  double tail_right = 0.0;
};

VerificationReport verify_profile(const Field& lam, const KernelSpec& spec, double rho,
                                  double eps = 0.1, double beta = 0.0,
                                  bool include_corner = true);

}  // namespace coagself
