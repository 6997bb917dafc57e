#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "coagself/kernel.hpp"

using namespace coagself;

TEST_CASE("evaluate: built-in values and homogeneity") {
  KernelSpec add = make_kernel("additive");
  CHECK(evaluate(add, 1.0, 2.0) == doctest::Approx(3.0));
  CHECK(evaluate(add, 2.0, 4.0) == doctest::Approx(2.0 * evaluate(add, 1.0, 2.0)));

  KernelSpec shear = make_kernel("shear");
  CHECK(evaluate(shear, 1.0, 1.0) == doctest::Approx(8.0));

  CHECK_THROWS_AS(evaluate(add, -1.0, 2.0), std::domain_error);
}

TEST_CASE("symmetry and homogeneity over random pairs") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> ulog(-5.0, 5.0);
  for (const char* name : {"additive", "shear", "param:a=0.5,c=2"}) {
    KernelSpec k = make_kernel(name);
    for (int i = 0; i < 1000; ++i) {
      const double x = std::pow(10.0, ulog(rng)), y = std::pow(10.0, ulog(rng));
      CHECK(evaluate(k, x, y) == evaluate(k, y, x));
      const double two = evaluate(k, 2.0 * x, 2.0 * y);
      CHECK(std::abs(two - 2.0 * evaluate(k, x, y)) <= 1e-12 * two);
    }
  }
}

TEST_CASE("reduced: values, class-II limit, large-argument stability") {
  KernelSpec add = make_kernel("additive");
  CHECK(reduced(add, 0.0) == doctest::Approx(1.0));
  CHECK(reduced(add, 1e6) == doctest::Approx(1e6 + 1.0).epsilon(1e-15));

  KernelSpec shear = make_kernel("shear");
  CHECK(reduced(shear, 1.0) == doctest::Approx(8.0));
  // K(s,1) -> 1 with defect below K0 s^alpha
  for (const char* name : {"additive", "shear", "param:a=0.5,c=2"}) {
    KernelSpec k = make_kernel(name);
    for (int e = 2; e <= 8; ++e) {
      const double s = std::pow(10.0, -e);
      CHECK(std::abs(reduced_minus_one(k, s)) <=
            k.K0 * std::pow(s, k.alpha) * (1.0 + 1e-12));
    }
  }
  CHECK_THROWS_AS(reduced(add, -0.1), std::domain_error);
}

TEST_CASE("unit-test kernel forces the reduced variable to one") {
  KernelSpec u = make_kernel("unit-test");
  CHECK(reduced(u, 0.3) == 1.0);
  CHECK(reduced(u, 42.0) == 1.0);
  CHECK(reduced_minus_one(u, 0.3) == 0.0);
  CHECK(evaluate(u, 2.0, 5.0) == doctest::Approx(5.0));  // symmetric envelope
}

TEST_CASE("fit_small_argument recovers (alpha, beta0)") {
  SmallArgFit add = fit_small_argument(make_kernel("additive"));
  CHECK(!add.indeterminate);
  CHECK(add.alpha_hat == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(add.beta0_hat == doctest::Approx(1.0).epsilon(1e-9));

  // the O(s^{2/3}) term biases the log-log fit upward over the fixed
  // window; alpha ~ 0.345, beta0 ~ 3.6 is what the estimator yields
  SmallArgFit sh = fit_small_argument(make_kernel("shear"));
  CHECK(sh.alpha_hat == doctest::Approx(1.0 / 3.0).epsilon(0.05));
  CHECK(sh.beta0_hat == doctest::Approx(3.0).epsilon(0.25));
  CHECK(sh.K0_hat >= 3.0);

  // synthetic K(1,s) = 1 + 2 sqrt(s)
  SmallArgFit par = fit_small_argument(make_kernel("param:a=0.5,c=2"));
  CHECK(par.alpha_hat == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(par.beta0_hat == doctest::Approx(2.0).epsilon(1e-9));

  // negative beta0 keeps its sign
  SmallArgFit neg = fit_small_argument(make_kernel("param:a=0.5,c=-0.5"));
  CHECK(neg.beta0_hat == doctest::Approx(-0.5).epsilon(1e-9));

  // K(1,s) - 1 identically zero -> indeterminate
  CHECK(fit_small_argument(make_kernel("unit-test")).indeterminate);
}

TEST_CASE("check_assumptions flags violations and passes built-ins") {
  AssumptionReport add = check_assumptions(make_kernel("additive"), 1e-12);
  CHECK(add.symmetry_defect == 0.0);
  CHECK(add.symmetry_ok);
  CHECK(add.homogeneity_ok);
  CHECK(add.small_arg_ok);
  CHECK(add.lower_bound_ok);

  AssumptionReport sh = check_assumptions(make_kernel("shear"), 1e-12);
  CHECK(sh.homogeneity_defect < 1e-12);
  CHECK(sh.symmetry_ok);

  KernelSpec bad = make_kernel("additive");
  bad.name = "asym-test";
  bad.eval = [](double x, double) { return x; };
  AssumptionReport rep = check_assumptions(bad, 1e-9);
  CHECK(!rep.symmetry_ok);
}

TEST_CASE("kernel parsing errors") {
  CHECK_THROWS_WITH_AS(make_kernel("nosuch"), doctest::Contains("available:"),
                       std::invalid_argument);
  CHECK_THROWS_AS(make_kernel("param:a=2,c=1"), std::invalid_argument);
  KernelSpec p = make_kernel("param:a=0.25,c=1.5");
  CHECK(p.alpha == doctest::Approx(0.25));
  CHECK(p.beta0 == doctest::Approx(1.5));
}
