#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace coagself {

// Homogeneous degree-one coagulation rate kernel with its structural
// metadata: |K(s,1)-1| <= K0 s^alpha on [0,1], (K(1,s)-1)/s^alpha -> beta0,
// K(1,s) >= k0.
struct KernelSpec {
  std::string name;
  std::function<double(double, double)> eval;
  double alpha = 1.0;
  double K0 = 1.0;
  double beta0 = 1.0;
  double k0 = 1.0;
  // Exact K(s,1)-1 where a cancellation-free form exists.
  std::function<double(double)> reduced_m1;
  // Unit-test mode: K(s,1) forced to 1 in the reduced variable.
  bool forced_unit = false;
};

double evaluate(const KernelSpec& spec, double x, double y);

// K(s,1); for s > 1 evaluated through homogeneity as s*K(1,1/s).
double reduced(const KernelSpec& spec, double s);

// K(s,1) - 1 without cancellation for small s.
double reduced_minus_one(const KernelSpec& spec, double s);

// Built-in kernels: "additive", "shear", "param:a=<>,c=<>", "unit-test".
KernelSpec make_kernel(const std::string& name);
std::vector<std::string> kernel_names();

struct SmallArgFit {
  double alpha_hat = 0.0;
  double beta0_hat = 0.0;
  double K0_hat = 0.0;
  bool indeterminate = false;  // K(1,s)-1 changed sign on the sample
};

// Least-squares fit of log|K(1,s)-1| against log s on a geometric
// sample of s in [1e-8, 1e-2].
SmallArgFit fit_small_argument(const KernelSpec& spec, int sample_count = 64);

struct AssumptionReport {
  double symmetry_defect = 0.0;     // max relative |K(x,y)-K(y,x)|
  double homogeneity_defect = 0.0;  // max relative |K(ax,ay)-aK(x,y)|
  double small_arg_ratio = 0.0;     // sup |K(s,1)-1| / (K0 s^alpha)
  double min_reduced = 0.0;         // min K(1,s) over samples
  bool symmetry_ok = false;
  bool homogeneity_ok = false;
  bool small_arg_ok = false;
  bool lower_bound_ok = false;
};

AssumptionReport check_assumptions(const KernelSpec& spec, double tol);

}  // namespace coagself
