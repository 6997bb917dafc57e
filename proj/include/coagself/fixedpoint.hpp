#pragma once

#include <vector>

#include "coagself/grid.hpp"
#include "coagself/kernel.hpp"

namespace coagself {

// Explicit solution of the leading-order equation:
// lambda_bar(x) = e^{x/(1+rho)} / ((1+rho)(1+e^{x/(1+rho)})^2),
// evaluated overflow-safely as sech^2.
double lambda_bar(double rho, double x);

// d/dx of lambda_bar.
double lambda_bar_prime(double rho, double x);

// Closed-form left cumulative of lambda_bar: int_{-inf}^x = F(u)=e^u/(1+e^u).
double lambda_bar_cdf(double rho, double x);

// lambda_bar sampled on a grid, with its exact tail descriptors.
Field lambda_bar_field(const LogGrid& grid, double rho);

// Admissible default beta: midpoint of (2/3, 1/(1+rho)).
double default_beta(double rho);

struct SolveConfig {
  double rho = 0.1;
  double beta = 0.0;  // 0 = default_beta(rho)
  double eps = 0.1;
  double tol = 1e-10;  // weighted-norm tolerance
  int max_iter = 200;
  LogGrid grid;  // n==0 = default (-40, 40, 2048)
  bool include_corner = true;

  void finalize();  // fill defaults, validate ranges
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> contraction_ratios;
  double final_weighted_residual = 0.0;
  bool converged = false;
  double tail_left = 0.0;   // fitted left decay rate of lambda
  double tail_right = 0.0;  // fitted right decay rate of lambda
  double mass = 0.0;
};

// One application of the fixed-point map H_rho.
Perturbation apply_H(const Perturbation& psi, const KernelSpec& spec, double rho,
                     bool include_corner = true);

struct SolveResult {
  Field lambda;
  SolveReport report;
};

// Banach iteration psi_{n+1} = H_rho[psi_n] from psi_0 = 0. Divergence is
// reported, not thrown.
SolveResult solve(const KernelSpec& spec, const SolveConfig& cfg);

struct RhoSweepEntry {
  double rho = 0.0;
  bool converged = false;
  int iterations = 0;
  double final_weighted_residual = 0.0;
  double max_contraction_ratio = 0.0;
};

struct RhoSweepReport {
  std::vector<RhoSweepEntry> entries;
  double largest_converged_rho = 0.0;  // 0 = none converged
};

// Empirical convergence boundary in rho: runs solve per value, reports
// raw flags. Not a determination of the true critical exponent.
RhoSweepReport estimate_rho_star(const KernelSpec& spec, const std::vector<double>& rho_values,
                                 SolveConfig cfg_template);

}  // namespace coagself
