#pragma once

#include <Eigen/Core>
#include <optional>

namespace coagself {

// Uniform grid in the log-mass coordinate x.
struct LogGrid {
  double x_min = 0.0;
  double x_max = 0.0;
  int n = 0;
  double h = 0.0;

  double point(int i) const { return x_min + h * i; }
  int cells() const { return n - 1; }
  bool operator==(const LogGrid& o) const {
    return x_min == o.x_min && x_max == o.x_max && n == o.n;
  }
};

LogGrid build_grid(double x_min, double x_max, int n);

// Exponential tail descriptor. On the left, value ~ coef*exp(rate*x) as
// x -> -inf; on the right, value ~ coef*exp(-rate*x) as x -> +inf.
// rate > 0 whenever the tail is integrated over a half line.
struct TailDecay {
  double rate = 0.0;
  double coef = 0.0;
};

struct Field {
  LogGrid grid;
  Eigen::ArrayXd values;
  std::optional<TailDecay> left_tail;
  std::optional<TailDecay> right_tail;
};

Field make_field(const LogGrid& grid);

// Local cubic (4-point Lagrange) inside the grid, tail extrapolation
// outside. Throws if extrapolation is requested without a descriptor.
double interpolate(const Field& f, double x);

// Composite quadrature built from per-cell integrals of the local
// quintic through 6 neighbouring samples; exactly additive across
// arbitrary split points. Infinite endpoints use the closed-form tail
// integrals and require tail descriptors.
double integrate_field(const Field& f, double a, double b);

// Running integrals of the same per-cell rule, both directions:
// left[i] = int_{-inf}^{x_i} f, right[i] = int_{x_i}^{inf} f.
// The right accumulation is carried out from the right edge so far-tail
// values keep full relative accuracy. Missing tails count as zero mass.
struct CumulativePair {
  Eigen::ArrayXd left;
  Eigen::ArrayXd right;
  double total = 0.0;
};
CumulativePair cumulants(const Field& f);

// int_{-inf}^t f, exact for the per-cell rule, O(1) given the cumulants.
double left_integral_to(const Field& f, const CumulativePair& cp, double t);

// Weight exponent of the fixed-point space: x/(1+rho) for x<0, -beta*x
// for x>=0.
double gamma_weight(double x, double rho, double beta);

// Perturbation in the weighted space X_{rho,eps}.
struct Perturbation {
  Field field;
  double rho = 0.0;
  double eps = 0.0;
  double beta = 0.0;
};

// sup over grid points of |psi(x)| / (eps * e^{gamma(x)}).
double weighted_norm(const Perturbation& p);

// Log-linear regression of |values| over the outermost `window`
// fraction of points. Returns nullopt when the window has zeros or
// mixed signs (the tail is then treated as massless).
enum class Side { left, right };
std::optional<TailDecay> fit_tail(const Field& f, Side side, double window = 0.10);

// Fit both tails in place; degenerate windows get a zero-mass
// descriptor so that full-line integrals remain defined.
void refit_tails(Field& f, double window = 0.10);

}  // namespace coagself
