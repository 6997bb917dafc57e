#include "coagself/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace coagself {

namespace {

KernelSpec make_additive() {
  KernelSpec k;
  k.name = "additive";
  k.eval = [](double x, double y) { return x + y; };
  k.alpha = 1.0;
  k.K0 = 1.0;
  k.beta0 = 1.0;
  k.k0 = 1.0;
  k.reduced_m1 = [](double s) { return s; };
  return k;
}

KernelSpec make_shear() {
  KernelSpec k;
  k.name = "shear";
  k.eval = [](double x, double y) {
    const double t = std::cbrt(x) + std::cbrt(y);
    return t * t * t;
  };
  k.alpha = 1.0 / 3.0;
  k.K0 = 7.0;  // sup over [0,1] of ((1+s^{1/3})^3 - 1)/s^{1/3}
  k.beta0 = 3.0;
  k.k0 = 1.0;
  k.reduced_m1 = [](double s) {
    const double c = std::cbrt(s);
    return c * (3.0 + c * (3.0 + c));
  };
  return k;
}

// K(x,y) = max(x,y) * (1 + c*(min/max)^a); class II with alpha=a, beta0=c.
KernelSpec make_param(double a, double c) {
  if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("param kernel: need a in (0,1]");
  if (!(c > -1.0)) throw std::invalid_argument("param kernel: need c > -1");
  KernelSpec k;
  std::ostringstream nm;
  nm << "param:a=" << a << ",c=" << c;
  k.name = nm.str();
  k.eval = [a, c](double x, double y) {
    const double hi = std::max(x, y), lo = std::min(x, y);
    if (hi == 0.0) return 0.0;
    return hi * (1.0 + c * std::pow(lo / hi, a));
  };
  k.alpha = a;
  k.beta0 = c;
  k.K0 = std::abs(c);  // |K(s,1)-1| = |c| s^a on [0,1]
  k.k0 = std::min(1.0, 1.0 + c);
  k.reduced_m1 = [a, c](double s) {
    if (s <= 1.0) return c * std::pow(s, a);
    return (s - 1.0) + c * std::pow(s, 1.0 - a);
  };
  return k;
}

KernelSpec make_unit_test() {
  KernelSpec k;
  k.name = "unit-test";
  k.eval = [](double x, double y) { return std::max(x, y); };
  k.alpha = 1.0;
  k.K0 = 1.0;
  k.beta0 = 0.0;
  k.k0 = 1.0;
  k.reduced_m1 = [](double) { return 0.0; };
  k.forced_unit = true;
  return k;
}

}  // namespace

double evaluate(const KernelSpec& spec, double x, double y) {
  if (x < 0.0 || y < 0.0) throw std::domain_error("kernel evaluate: negative mass");
  const double v = spec.eval(x, y);
  if (!std::isfinite(v)) throw std::domain_error("kernel evaluate: non-finite rate");
  return v;
}

double reduced(const KernelSpec& spec, double s) {
  if (s < 0.0) throw std::domain_error("kernel reduced: negative argument");
  if (spec.forced_unit) return 1.0;
  if (s <= 1.0) return spec.eval(s, 1.0);
  return s * spec.eval(1.0, 1.0 / s);
}

double reduced_minus_one(const KernelSpec& spec, double s) {
  if (s < 0.0) throw std::domain_error("kernel reduced: negative argument");
  if (spec.forced_unit) return 0.0;
  if (spec.reduced_m1) return spec.reduced_m1(s);
  return reduced(spec, s) - 1.0;
}

KernelSpec make_kernel(const std::string& name) {
  if (name == "additive") return make_additive();
  if (name == "shear") return make_shear();
  if (name == "unit-test") return make_unit_test();
  if (name.rfind("param:", 0) == 0) {
    double a = 0.0, c = 0.0;
    bool got_a = false, got_c = false;
    std::string rest = name.substr(6);
    std::istringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) break;
      const std::string key = item.substr(0, eq);
      const double val = std::stod(item.substr(eq + 1));
      if (key == "a") {
        a = val;
        got_a = true;
      } else if (key == "c") {
        c = val;
        got_c = true;
      }
    }
    if (!got_a || !got_c)
      throw std::invalid_argument("kernel '" + name + "': expected param:a=<>,c=<>");
    return make_param(a, c);
  }
  std::string known;
  for (const auto& n : kernel_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown kernel '" + name + "'; available: " + known);
}

std::vector<std::string> kernel_names() {
  return {"additive", "shear", "param:a=<>,c=<>", "unit-test"};
}

SmallArgFit fit_small_argument(const KernelSpec& spec, int sample_count) {
  if (sample_count < 2) throw std::invalid_argument("fit_small_argument: need >= 2 samples");
  const double lo = 1e-8, hi = 1e-2;
  SmallArgFit fit;

  double sgn = 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> ss(sample_count), dd(sample_count);
  for (int i = 0; i < sample_count; ++i) {
    const double u = static_cast<double>(i) / (sample_count - 1);
    const double s = lo * std::pow(hi / lo, u);
    const double d = reduced_minus_one(spec, s);  // symmetric kernel: K(1,s)=K(s,1)
    if (d == 0.0) {
      fit.indeterminate = true;
      return fit;
    }
    const double sg = d > 0 ? 1.0 : -1.0;
    if (sgn == 0.0) sgn = sg;
    if (sg != sgn) {
      fit.indeterminate = true;
      return fit;
    }
    ss[i] = s;
    dd[i] = d;
    const double x = std::log(s), y = std::log(std::abs(d));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const int m = sample_count;
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double icept = (sy - slope * sx) / m;
  fit.alpha_hat = slope;
  fit.beta0_hat = sgn * std::exp(icept);
  double worst = 0.0;
  for (int i = 0; i < m; ++i)
    worst = std::max(worst, std::abs(dd[i]) / std::pow(ss[i], fit.alpha_hat));
  fit.K0_hat = worst;
  return fit;
}

AssumptionReport check_assumptions(const KernelSpec& spec, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("check_assumptions: tol must be positive");
  AssumptionReport rep;
  std::mt19937_64 rng(0x5eedc0a6u);
  std::uniform_real_distribution<double> ulog(-6.0, 6.0);

  for (int i = 0; i < 256; ++i) {
    const double x = std::pow(10.0, ulog(rng)), y = std::pow(10.0, ulog(rng));
    const double kxy = evaluate(spec, x, y), kyx = evaluate(spec, y, x);
    const double scale = std::max({std::abs(kxy), std::abs(kyx), 1e-300});
    rep.symmetry_defect = std::max(rep.symmetry_defect, std::abs(kxy - kyx) / scale);
  }
  for (int i = 0; i < 64; ++i) {
    const double x = std::pow(10.0, ulog(rng)), y = std::pow(10.0, ulog(rng));
    const double a = std::pow(10.0, ulog(rng) / 2.0);
    const double lhs = evaluate(spec, a * x, a * y);
    const double rhs = a * evaluate(spec, x, y);
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    rep.homogeneity_defect = std::max(rep.homogeneity_defect, std::abs(lhs - rhs) / scale);
  }
  for (int i = 0; i <= 64; ++i) {
    const double s = 1e-8 * std::pow(1e8, i / 64.0);  // [1e-8, 1]
    const double d = std::abs(reduced_minus_one(spec, s));
    const double bound = spec.K0 * std::pow(s, spec.alpha);
    if (bound > 0.0) rep.small_arg_ratio = std::max(rep.small_arg_ratio, d / bound);
  }
  rep.min_reduced = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 128; ++i) {
    const double s = 1e-8 * std::pow(1e10, i / 128.0);  // [1e-8, 1e2]
    rep.min_reduced = std::min(rep.min_reduced, reduced(spec, s));
  }
  rep.symmetry_ok = rep.symmetry_defect <= tol;
  rep.homogeneity_ok = rep.homogeneity_defect <= tol;
  rep.small_arg_ok = rep.small_arg_ratio <= 1.0 + tol;
  rep.lower_bound_ok = rep.min_reduced >= spec.k0 * (1.0 - tol) - tol;
  return rep;
}

}  // namespace coagself
