#include "coagself/nonexist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coagself/integral_ops.hpp"

namespace coagself {

namespace {

void require_alpha01(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0,1)");
}

}  // namespace

double characteristics(double z, double t, double alpha, double Gamma) {
  if (!(z >= 0.0)) throw std::domain_error("characteristics: z must be nonnegative");
  const double za = std::pow(z, alpha);
  if (za < Gamma * t) throw std::domain_error("characteristics: characteristic exhausted");
  return std::pow(za - Gamma * t, 1.0 / alpha);
}

double characteristic_origin(double x, double t, double alpha, double Gamma) {
  if (!(x >= 0.0)) throw std::domain_error("characteristic_origin: x must be nonnegative");
  return std::pow(std::pow(x, alpha) + Gamma * t, 1.0 / alpha);
}

double subsolution_value(double x, double t, double R, double alpha, double Gamma) {
  if (!(R > 0.0)) throw std::domain_error("subsolution_value: R must be positive");
  if (!(x >= 0.0 && t >= 0.0))
    throw std::domain_error("subsolution_value: x and t must be nonnegative");
  const double s = characteristic_origin(x, t, alpha, Gamma) / R;
  return s > 1.0 ? 1.0 - 1.0 / s : 0.0;
}

double adjoint_operator(const std::function<double(double, double)>& phi,
                        const MassProfile& g, const KernelSpec& spec, double b, double x,
                        double t) {
  const double hx = 1e-5 * std::max(1.0, std::abs(x));
  const double ht = 1e-5 * std::max(1.0, std::abs(t));
  const double phi0 = phi(x, t);
  const double dpt = (phi(x, t + ht) - phi(x, t - ht)) / (2.0 * ht);
  const double dpx = (phi(x + hx, t) - phi(x - hx, t)) / (2.0 * hx);

  // int K(x,z)/z g(z) [phi(x+z,t)-phi(x,t)] dz over the sampled support,
  // carried out in l = ln z
  const int n = g.n();
  Field igr = make_field(build_grid(std::log(g.xi_values[0]), std::log(g.xi_values[n - 1]), n));
  for (int j = 0; j < n; ++j) {
    const double z = g.xi_values[j];
    igr.values[j] = evaluate(spec, x, z) * g.g_values[j] * (phi(x + z, t) - phi0);
  }
  const double jump = integrate_field(igr, igr.grid.x_min, igr.grid.x_max);

  return dpt + b * x * dpx - jump;
}

DualitySchedule duality_schedule(double R0, double alpha, double beta0, double A) {
  require_alpha01(alpha);
  if (!(beta0 > 0.0)) throw std::domain_error("duality_schedule: beta0 must be positive");
  if (!(A > 0.0)) throw std::domain_error("duality_schedule: A must be positive");
  const double thr = std::pow(2.0, (1.0 + alpha) / alpha) * A;
  if (!(R0 > thr))
    throw std::domain_error("duality_schedule: need R0 > 2^{(1+alpha)/alpha} A");

  DualitySchedule s;
  s.alpha = alpha;
  s.beta0 = beta0;
  s.A = A;
  s.R0 = R0;
  s.Gamma = alpha * beta0 / 2.0;
  s.D = std::pow(2.0, (2.0 * alpha + 1.0) / alpha) * A;

  // n_bar: first k with delta_k R0 <= 2^{(1+alpha)/alpha} A
  int k = 1;
  while (R0 / (k + 1) > thr) {
    ++k;
    if (k > 10'000'000) throw std::runtime_error("duality_schedule: n_bar too large");
  }
  s.n_bar = k;

  // eps_k = 2^{1/alpha}/(k+1)^{(1+alpha)/alpha}, evaluated as
  // (2/(k+1))^{1/alpha}/(k+1) so that eps_1 = 1/2 comes out exact
  auto eps_of = [alpha](int k) {
    return std::pow(2.0 / (k + 1.0), 1.0 / alpha) / (k + 1.0);
  };
  s.delta.resize(s.n_bar + 1);
  s.eps.resize(s.n_bar + 1);
  s.R.resize(s.n_bar + 1);
  s.T.resize(s.n_bar + 1);
  for (int j = 0; j <= s.n_bar; ++j) {
    s.delta[j] = 1.0 / (j + 1);
    s.eps[j] = (j == 0) ? 0.0 : eps_of(j);
    s.R[j] = s.delta[j] * R0;
    s.T[j] = (std::pow(s.R[j], alpha) - std::pow(A, alpha)) / s.Gamma;
  }

  // q = prod (1 - eps_k): partial product, tail controlled through
  // log(1-e) >= -2e and sum_{j>K} eps_j <= 2^{1/alpha} alpha (K+1)^{-1/alpha}
  double logq = 0.0;
  int K = 1;
  for (;; ++K) {
    logq += std::log1p(-eps_of(K));
    const double tail =
        std::pow(2.0, 1.0 / alpha) * alpha * std::pow(K + 1.0, -1.0 / alpha);
    if (tail < 1e-12 || K >= 200000) {
      logq -= tail;
      break;
    }
  }
  s.q = std::exp(logq);

  double dsum = 0.0;
  for (int j = 1; j <= s.n_bar; ++j) dsum += std::pow(s.delta[j - 1], 1.0 + alpha);
  s.omega_R0 = 2.0 * std::pow(R0, 1.0 + alpha) / (s.q * s.Gamma * std::pow(A, 1.0 + alpha)) * dsum;
  s.M_dual = 2.0 / s.q;
  return s;
}

GapReport duality_gap(const MassProfile& g, const DualitySchedule& sched, double b) {
  const double ma = alpha_moment(g, sched.alpha);
  if (std::abs(ma - 1.0) > 1e-6)
    throw std::runtime_error("duality_gap: profile must have unit alpha-moment");
  GapReport rep;
  rep.lhs = mass_above(g, sched.D);
  rep.tail_R0 = mass_above(g, sched.R0);
  rep.rhs = sched.M_dual * rep.tail_R0 + (b - 1.0) * sched.omega_R0;
  rep.b_hat = 1.0 + (rep.lhs - sched.M_dual * rep.tail_R0) / sched.omega_R0;
  rep.flag = rep.lhs > rep.rhs;
  return rep;
}

MassProfile normalize_moment(const MassProfile& g, double alpha) {
  const double ma = alpha_moment(g, alpha);
  if (!(ma > 0.0)) throw std::domain_error("normalize_moment: degenerate alpha-moment");
  const double lam = std::pow(ma, 1.0 / alpha);
  MassProfile out;
  out.rho = g.rho;
  out.xi_values = g.xi_values / lam;
  out.g_values = g.g_values * lam;
  out.mass = profile_mass(out);
  return out;
}

double decay_exponent_sum(double eps, double eta, double b, int n) {
  if (n < 0 || n > 10'000'000) throw std::invalid_argument("decay_exponent_sum: bad n");
  double acc = 0.0;
  for (int k = 1; k <= n; ++k)
    acc += std::pow(1.0 - eps, 2 * k - 1) * std::pow(1.0 - eta, k) / std::pow(b, k);
  return acc;
}

FarTailCertificate tail_mass_far(const MassProfile& g, double alpha,
                                 const std::vector<double>& Rs, double tol) {
  FarTailCertificate cert;
  cert.pass = true;
  for (double R : Rs) {
    FarTailCertificate::Row row;
    row.R = R;
    row.mass = mass_above(g, R);
    row.bound = std::pow(R, -alpha);
    if (row.mass > row.bound * (1.0 + tol) + tol) cert.pass = false;
    cert.rows.push_back(row);
  }
  return cert;
}

OriginTailCertificate tail_mass_origin(const MassProfile& g, double gamma,
                                       std::vector<double> xs) {
  OriginTailCertificate cert;
  cert.gamma = gamma;
  if (xs.empty()) {
    const double lo = g.xi_values[0] * 10.0;
    for (int j = 0; j < 8; ++j) xs.push_back(lo * std::pow(10.0, j * 0.5));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (double x : xs) {
    const double mb = mass_below(g, x);
    if (!(mb > 0.0)) continue;
    const double lx = std::log(x), ly = std::log(mb);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 3) throw std::runtime_error("tail_mass_origin: not enough usable sample points");
  cert.fitted_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  cert.pass = cert.fitted_exponent >= gamma * 0.98 - 0.02;
  return cert;
}

double find_threshold_A(const MassProfile& g, const KernelSpec& spec, double alpha,
                        double beta0, double tol, int max_doublings) {
  require_alpha01(alpha);
  if (!(beta0 > 0.0)) throw std::domain_error("find_threshold_A: beta0 must be positive");
  const double Gamma = alpha * beta0 / 2.0;
  double A = 1.0;
  for (int d = 0; d < max_doublings; ++d, A *= 2.0) {
    const double R = 2.0 * std::pow(2.0, (1.0 + alpha) / alpha) * A;
    const double T = (std::pow(R, alpha) - std::pow(A, alpha)) / Gamma;
    auto phi = [R, alpha, Gamma](double x, double t) {
      const double s = std::pow(std::pow(x, alpha) + Gamma * t, 1.0 / alpha) / R;
      return s > 1.0 ? 1.0 - 1.0 / s : 0.0;
    };
    bool ok = true;
    for (double tf : {0.01, 1.0 / 3.0, 2.0 / 3.0, 0.97}) {
      const double t = tf * T;
      const double edge = characteristics(R, t, alpha, Gamma);
      for (double xf : {1.05, 1.5, 2.0, 4.0, 8.0, 16.0}) {
        const double L = adjoint_operator(phi, g, spec, 1.0, edge * xf, t);
        if (!(L <= tol)) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) return A;
  }
  throw std::runtime_error("find_threshold_A: no admissible A within the doubling budget");
}

}  // namespace coagself
