#include <doctest.h>

#include <cmath>

#include "coagself/fixedpoint.hpp"
#include "coagself/profile.hpp"

using namespace coagself;

TEST_CASE("lambda_to_g preserves mass and the point value at xi=1") {
  const double rho = 0.2;
  LogGrid g = build_grid(-40.0, 40.0, 2048);
  Field lb = lambda_bar_field(g, rho);
  MassProfile gp = lambda_to_g(lb, rho);
  const double lam_mass = integrate_field(lb, g.x_min, g.x_max);
  CHECK(gp.mass == doctest::Approx(lam_mass).epsilon(1e-8));

  // formula at xi = 1 (rho = 1 admissible boundary case)
  Field f1 = lambda_bar_field(build_grid(-20.0, 20.0, 801), 0.0);
  f1.values.setConstant(0.37);
  MassProfile hyp = lambda_to_g(f1, 1.0);
  CHECK(eval_g(hyp, 1.0) == doctest::Approx(0.37).epsilon(1e-9));

  CHECK_THROWS_AS(lambda_to_g(lb, 0.0), std::domain_error);
}

TEST_CASE("round trip g -> lambda -> g") {
  const double rho = 0.25;
  MassProfile gp = lambda_to_g(lambda_bar_field(build_grid(-30.0, 30.0, 1024), rho), rho);
  // lambda grid aligned with the profile's log-mass nodes: the round trip
  // then touches samples only
  LogGrid aligned = build_grid(rho * std::log(gp.xi_values[0]),
                               rho * std::log(gp.xi_values[gp.n() - 1]), gp.n());
  Field lam = g_to_lambda(gp, aligned);
  MassProfile gp2 = lambda_to_g(lam, rho);
  REQUIRE(gp2.n() == gp.n());
  double worst = 0.0;
  for (int i = 0; i < gp.n(); ++i)
    worst = std::max(worst, std::abs(gp2.g_values[i] / gp.g_values[i] - 1.0));
  CHECK(worst < 1e-10);
}

TEST_CASE("heuristic exponent relations") {
  auto [b1, a1] = heuristic_b(1.0, 1.0);
  CHECK(b1 == doctest::Approx(2.0));
  CHECK(a1 == doctest::Approx(0.5));
  auto [b2, a2] = heuristic_b(0.5, 1.0);
  CHECK(b2 == doctest::Approx(3.0));
  CHECK(a2 == doctest::Approx(1.0 / 3.0));
  CHECK(heuristic_b(0.5, 2.0).first == doctest::Approx(6.0));
  // b*rho = M*(1+rho) identically
  for (double rho : {0.05, 0.3, 0.9})
    CHECK(heuristic_b(rho, 1.0).first * rho == doctest::Approx(1.0 + rho).epsilon(1e-15));
  CHECK_THROWS_AS(heuristic_b(-0.1, 1.0), std::domain_error);
}

TEST_CASE("tail_exponent: pure exponential and lambda_bar") {
  LogGrid g = build_grid(0.5, 30.0, 1024);
  Field f = make_field(g);
  for (int i = 0; i < g.n; ++i) f.values[i] = std::exp(-2.0 * g.point(i));
  CHECK(tail_exponent(f, Side::right) == doctest::Approx(2.0).epsilon(1e-6));

  const double rho = 0.2;
  Field lb = lambda_bar_field(build_grid(-40.0, 40.0, 2048), rho);
  CHECK(tail_exponent(lb, Side::right) ==
        doctest::Approx(1.0 / (1.0 + rho)).epsilon(0.01));
  CHECK(tail_exponent(lb, Side::left) ==
        doctest::Approx(1.0 / (1.0 + rho)).epsilon(0.01));

  // lambda ~ e^{-x} right tail maps to g-exponent 1+rho
  Field e1 = make_field(build_grid(-40.0, 40.0, 2048));
  for (int i = 0; i < e1.grid.n; ++i)
    e1.values[i] = std::exp(-std::abs(e1.grid.point(i)));
  refit_tails(e1);
  MassProfile gp = lambda_to_g(e1, rho);
  CHECK(tail_exponent(gp, Side::right) == doctest::Approx(1.0 + rho).epsilon(0.01));

  Field neg = f;
  neg.values[g.n - 40] = -1.0;
  CHECK_THROWS_AS(tail_exponent(neg, Side::right), std::domain_error);
}

TEST_CASE("selfsim_density: t=0 identity and mass invariance in t") {
  const double rho = 0.25;
  Field lb = lambda_bar_field(build_grid(-30.0, 30.0, 2048), rho);
  MassProfile gp = lambda_to_g(lb, rho);
  const auto [b, a] = heuristic_b(rho, gp.mass);

  CHECK(selfsim_density(gp, b, 2.5, 0.0) ==
        doctest::Approx(eval_g(gp, 2.5) / 2.5).epsilon(1e-12));

  // int xi f(xi,t) dxi is t-independent
  auto mass_f = [&](double t) {
    // integrate xi*f over the shifted support in log space
    const double l0 = std::log(gp.xi_values[0]) + b * t - 1.0;
    const double l1 = std::log(gp.xi_values[gp.n() - 1]) + b * t + 1.0;
    const int n = 4096;
    const double d = (l1 - l0) / (n - 1);
    // composite Simpson in l
    double acc = 0.0;
    for (int i = 0; i < n - 1; i += 2) {
      auto val = [&](int j) {
        const double xi = std::exp(l0 + j * d);
        return xi * selfsim_density(gp, b, xi, t) * xi;  // xi f * (dxi = xi dl)
      };
      acc += (val(i) + 4.0 * val(i + 1) + val(i + 2)) * d / 3.0;
    }
    return acc;
  };
  const double m0 = mass_f(0.0);
  for (double t : {0.5, 1.0})
    CHECK(mass_f(t) == doctest::Approx(m0).epsilon(1e-6));

  CHECK_THROWS_AS(selfsim_density(gp, b, -1.0, 0.0), std::domain_error);
}

TEST_CASE("selfsim_density: pure power-law tail amplitude") {
  // g ~ xi^{-(1+rho)} gives xi^{2+rho} f -> e^{M(1+rho)t} exactly
  const double rho = 0.3, M = 1.0;
  const int n = 400;
  MassProfile gp;
  gp.rho = rho;
  gp.xi_values.resize(n);
  gp.g_values.resize(n);
  for (int i = 0; i < n; ++i) {
    const double xi = std::exp(-10.0 + 30.0 * i / (n - 1.0));
    gp.xi_values[i] = xi;
    gp.g_values[i] = std::pow(xi, -(1.0 + rho));
  }
  gp.mass = profile_mass(gp);
  const double b = heuristic_b(rho, M).first;
  const double xi = std::exp(12.0);
  for (double t : {0.0, 0.4}) {
    const double v = std::pow(xi, 2.0 + rho) * selfsim_density(gp, b, xi, t);
    CHECK(v == doctest::Approx(tail_amplitude(rho, M, t)).epsilon(1e-8));
  }
}

TEST_CASE("tail_amplitude basics") {
  CHECK(tail_amplitude(0.7, 1.0, 0.0) == 1.0);
  CHECK(tail_amplitude(1.0, 1.0, std::log(2.0)) == doctest::Approx(4.0).epsilon(1e-14));
  double prev = 0.0;
  for (double t : {0.0, 0.3, 0.9, 2.0}) {
    const double v = tail_amplitude(0.4, 1.0, t);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("beta0 tail prediction") {
  CHECK(beta0_tail_prediction(1.0, 1.0, 1.0, 3.3) ==
        doctest::Approx(std::exp(-3.3)).epsilon(1e-14));
  // x with x^alpha = beta0*alpha*M gives x^{alpha-1} e^{-1}
  const double alpha = 0.5, beta0 = 2.0, M = 1.5;
  const double x = std::pow(beta0 * alpha * M, 1.0 / alpha);
  CHECK(beta0_tail_prediction(alpha, beta0, M, x) ==
        doctest::Approx(std::pow(x, alpha - 1.0) / M_E).epsilon(1e-13));
  // strictly decreasing (alpha <= 1): numerical scan plus the sign of the
  // log-derivative (alpha-1)/x - x^{alpha-1}/(beta0 M)
  double prev = beta0_tail_prediction(alpha, beta0, M, 0.01);
  for (int k = 1; k <= 60; ++k) {
    const double xx = 0.01 * std::pow(1.3, k);
    const double v = beta0_tail_prediction(alpha, beta0, M, xx);
    CHECK(v < prev);
    const double logd = (alpha - 1.0) / xx - std::pow(xx, alpha - 1.0) / (beta0 * M);
    CHECK(logd < 0.0);
    prev = v;
  }
  CHECK_THROWS_AS(beta0_tail_prediction(0.5, -1.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(beta0_tail_prediction(1.5, 1.0, 1.0, 1.0), std::domain_error);
}
