#pragma once

#include <functional>
#include <vector>

#include "coagself/kernel.hpp"
#include "coagself/profile.hpp"

namespace coagself {

// Transport characteristics x(t;z) = (z^alpha - Gamma t)^{1/alpha} of the
// subsolution equation; throws once the characteristic is exhausted.
double characteristics(double z, double t, double alpha, double Gamma);

// Inverse map z(x,t) = (x^alpha + Gamma t)^{1/alpha}.
double characteristic_origin(double x, double t, double alpha, double Gamma);

// Explicit subsolution phi0(z(x,t)/R) with phi0(s) = (1 - 1/s)^+.
double subsolution_value(double x, double t, double R, double alpha, double Gamma);

// L_b(phi) = dphi/dt + b x dphi/dx - int K(x,z)/z g(z) [phi(x+z,t)-phi(x,t)] dz,
// derivatives by central finite differences, integral over the sampled
// support of g.
double adjoint_operator(const std::function<double(double, double)>& phi,
                        const MassProfile& g, const KernelSpec& spec, double b, double x,
                        double t);

// All derived constants of the iteration-of-subsolutions argument.
struct DualitySchedule {
  double alpha = 0.0;
  double beta0 = 0.0;
  double A = 0.0;
  double R0 = 0.0;
  double Gamma = 0.0;  // alpha*beta0/2
  int n_bar = 0;
  std::vector<double> delta;  // delta_k = 1/(k+1), k = 0..n_bar
  std::vector<double> eps;    // eps_k = 2^{1/alpha}/(k+1)^{(1+alpha)/alpha}, eps[0] unused
  std::vector<double> R;      // R_k = delta_k R0
  std::vector<double> T;      // T_k = (R_k^alpha - A^alpha)/Gamma
  double q = 0.0;             // prod_{k>=1} (1 - eps_k)
  double D = 0.0;             // 2^{(2 alpha+1)/alpha} A
  double M_dual = 0.0;        // 2/q
  double omega_R0 = 0.0;
};

DualitySchedule duality_schedule(double R0, double alpha, double beta0, double A);

struct GapReport {
  double lhs = 0.0;      // int_{(D,inf)} g
  double tail_R0 = 0.0;  // int_{(R0,inf)} g
  double rhs = 0.0;      // M_dual * tail_R0 + (b-1) omega_R0
  double b_hat = 0.0;    // b where lhs = rhs
  bool flag = false;     // lhs > rhs: candidate cannot solve at this b
};

// Evaluates the subsolution inequality for a candidate profile with unit
// alpha-moment.
GapReport duality_gap(const MassProfile& g, const DualitySchedule& sched, double b);

// Rescale coordinates by M_alpha^{1/alpha}: unit alpha-moment, same mass.
MassProfile normalize_moment(const MassProfile& g, double alpha);

// sum_{k=1}^n (1-eps)^{2k-1} (1-eta)^k / b^k.
double decay_exponent_sum(double eps, double eta, double b, int n);

struct FarTailCertificate {
  struct Row {
    double R = 0.0, mass = 0.0, bound = 0.0;
  };
  std::vector<Row> rows;
  bool pass = false;
};

// Checks int_{(R,inf)} g <= R^{-alpha} for a unit-alpha-moment profile.
FarTailCertificate tail_mass_far(const MassProfile& g, double alpha,
                                 const std::vector<double>& Rs = {1.0, 10.0, 100.0},
                                 double tol = 1e-9);

struct OriginTailCertificate {
  double fitted_exponent = 0.0;
  double gamma = 0.0;
  bool pass = false;
};

// Fits the near-origin mass growth exponent and compares it with gamma.
OriginTailCertificate tail_mass_origin(const MassProfile& g, double gamma,
                                       std::vector<double> xs = {});

// Doubling search for the subsolution threshold A: smallest power of two
// with L_1(subsolution) <= tol on a sample set beyond the characteristic.
double find_threshold_A(const MassProfile& g, const KernelSpec& spec, double alpha,
                        double beta0, double tol = 1e-8, int max_doublings = 22);

}  // namespace coagself
