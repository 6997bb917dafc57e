// Command-line driver: solve/validate/sweep/probe/export for self-similar
// coagulation profiles.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "coagself/fixedpoint.hpp"
#include "coagself/integral_ops.hpp"
#include "coagself/kernel.hpp"
#include "coagself/nonexist.hpp"
#include "coagself/profile.hpp"
#include "coagself/serialize.hpp"
#include "coagself/verify.hpp"

namespace {

using namespace coagself;

std::string verify_path(const std::string& out) {
  const std::string suffix = ".json";
  if (out.size() > suffix.size() &&
      out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
    return out.substr(0, out.size() - suffix.size()) + ".verify.json";
  return out + ".verify.json";
}

LogGrid parse_grid(const std::string& s) {
  double xmin, xmax;
  int n;
  if (std::sscanf(s.c_str(), "%lf,%lf,%d", &xmin, &xmax, &n) != 3)
    throw CLI::ValidationError("grid", "expected xmin,xmax,n");
  return build_grid(xmin, xmax, n);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

const auto rho_check = CLI::Validator(
    [](std::string& s) -> std::string {
      const double v = std::stod(s);
      if (!(v > 0.0 && v < 1.0)) return "rho must lie in (0,1)";
      return {};
    },
    "RHO");

struct ConfigOverride {
  nlohmann::json j;
  CLI::App* cmd = nullptr;

  void load(const std::string& path) {
    if (!path.empty()) j = load_json(path);
  }
  template <typename T>
  void apply(const std::string& key, T& target) const {
    if (j.is_object() && j.contains(key) && cmd->count("--" + key) == 0)
      target = j.at(key).get<T>();
  }
};

int cmd_solve(const std::string& kernel, double rho, double beta, double eps, double tol,
              int max_iter, const std::string& grid, bool no_corner,
              const std::string& out) {
  KernelSpec spec = make_kernel(kernel);
  SolveConfig cfg;
  cfg.rho = rho;
  cfg.beta = beta;
  cfg.eps = eps;
  cfg.tol = tol;
  cfg.max_iter = max_iter;
  cfg.include_corner = !no_corner;
  if (!grid.empty()) cfg.grid = parse_grid(grid);
  cfg.finalize();

  SolveResult sr = solve(spec, cfg);
  ProfileDoc doc;
  doc.kernel = kernel;
  doc.rho = cfg.rho;
  doc.beta = cfg.beta;
  doc.eps = cfg.eps;
  doc.include_corner = cfg.include_corner;
  doc.lambda = sr.lambda;
  doc.report = sr.report;
  save_json(profile_to_json(doc), out);

  if (!sr.report.converged) {
    std::cerr << "solve: iteration did not converge after " << sr.report.iterations
              << " steps (partial report written to " << out << ")\n";
    return 2;
  }
  VerificationReport rep =
      verify_profile(sr.lambda, spec, cfg.rho, cfg.eps, cfg.beta, cfg.include_corner);
  save_json(verification_to_json(rep), verify_path(out));
  std::cout << "converged in " << sr.report.iterations << " iterations, mass "
            << sr.report.mass << ", weighted residual " << sr.report.final_weighted_residual
            << "\nprofile: " << out << "\nverification: " << verify_path(out) << "\n";
  return 0;
}

int cmd_validate(const std::string& profile, const std::string& out) {
  ProfileDoc doc = profile_from_json(load_json(profile));
  KernelSpec spec = make_kernel(doc.kernel);
  VerificationReport rep = verify_profile(doc.lambda, spec, doc.rho, doc.eps, doc.beta,
                                          doc.include_corner);
  nlohmann::json j = verification_to_json(rep);
  if (!out.empty())
    save_json(j, out);
  else
    std::cout << j.dump(1) << "\n";
  std::cout << "residual " << rep.residual << ", omega fit rate " << rep.omega_fit_rate
            << ", envelope " << (rep.envelope.pass ? "pass" : "FAIL") << "\n";
  return 0;
}

int cmd_sweep(const std::string& kernel, const std::string& rhos, double eps, double tol,
              int max_iter, const std::string& grid, bool no_corner, const std::string& out) {
  KernelSpec spec = make_kernel(kernel);
  SolveConfig cfg;
  cfg.eps = eps;
  cfg.tol = tol;
  cfg.max_iter = max_iter;
  cfg.include_corner = !no_corner;
  if (!grid.empty()) cfg.grid = parse_grid(grid);
  RhoSweepReport rep = estimate_rho_star(spec, parse_list(rhos), cfg);

  std::ofstream os(out);
  if (!os) throw IoError("cannot open '" + out + "' for writing");
  os << "rho,converged,iterations,final_weighted_residual,max_contraction_ratio\n";
  char buf[160];
  for (const auto& e : rep.entries) {
    std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%.17g,%.17g\n", e.rho, e.converged ? 1 : 0,
                  e.iterations, e.final_weighted_residual, e.max_contraction_ratio);
    os << buf;
  }
  if (!os) throw IoError("write to '" + out + "' failed");
  std::cout << "largest converged rho: " << rep.largest_converged_rho << " (table: " << out
            << ")\n";
  return 0;
}

int cmd_probe(const std::string& profile, const std::string& kernel, double b, double R0,
              double A, bool normalize, const std::string& out) {
  ProfileDoc doc = profile_from_json(load_json(profile));
  KernelSpec spec = make_kernel(kernel.empty() ? doc.kernel : kernel);
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0) || !(spec.beta0 > 0.0))
    throw std::invalid_argument(
        "probe: kernel must have alpha in (0,1) and beta0 > 0 (e.g. shear)");

  MassProfile g = lambda_to_g(doc.lambda, doc.rho);
  if (normalize) g = normalize_moment(g, spec.alpha);
  if (std::abs(alpha_moment(g, spec.alpha) - 1.0) > 1e-6)
    throw std::runtime_error(
        "probe: profile must have unit alpha-moment (pass --normalize to rescale)");

  if (A <= 0.0) A = find_threshold_A(g, spec, spec.alpha, spec.beta0);
  DualitySchedule sched = duality_schedule(
      R0 > 0.0 ? R0 : 100.0 * std::pow(2.0, (2.0 * spec.alpha + 1.0) / spec.alpha) * A,
      spec.alpha, spec.beta0, A);
  GapReport gap = duality_gap(g, sched, b);
  save_json(probe_to_json(sched, gap), out);
  std::cout << "lhs " << gap.lhs << " vs rhs " << gap.rhs << " at b " << b
            << (gap.flag ? "  -> inequality violated (not a valid solution)" : "  -> consistent")
            << "\nb_hat " << gap.b_hat << " (report: " << out << ")\n";
  return 0;
}

int cmd_export(const std::string& profile, const std::string& format, const std::string& out) {
  ProfileDoc doc = profile_from_json(load_json(profile));
  if (format == "json") {
    save_json(profile_to_json(doc), out);
  } else if (format == "csv") {
    export_profile_csv(doc, out);
  } else {
    throw std::invalid_argument("export: format must be json or csv");
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-similar coagulation profiles: contraction-mapping solver and checks"};
  app.require_subcommand(1);

  // solve
  auto* s = app.add_subcommand("solve", "solve for a self-similar profile");
  std::string s_kernel = "additive", s_grid, s_out = "profile.json", s_cfg;
  double s_rho = 0.1, s_beta = 0.0, s_eps = 0.1, s_tol = 1e-10;
  int s_maxit = 200;
  bool s_nocorner = false;
  s->add_option("--kernel", s_kernel, "kernel name");
  s->add_option("--rho", s_rho, "tail exponent parameter")->check(rho_check);
  s->add_option("--beta", s_beta, "weight exponent (0 = auto)");
  s->add_option("--eps", s_eps, "weighted-space radius");
  s->add_option("--tol", s_tol, "weighted-norm tolerance");
  s->add_option("--max_iter", s_maxit, "iteration cap");
  s->add_option("--grid", s_grid, "grid triple xmin,xmax,n");
  s->add_flag("--no-corner", s_nocorner, "suppress the corner-region integral");
  s->add_option("--out", s_out, "profile output path");
  s->add_option("--config", s_cfg, "JSON config file (flags win)");

  // validate
  auto* v = app.add_subcommand("validate", "re-verify an existing profile file");
  std::string v_profile, v_out;
  v->add_option("--profile", v_profile, "profile JSON")->required();
  v->add_option("--out", v_out, "verification report path (default: stdout)");

  // sweep
  auto* w = app.add_subcommand("sweep", "per-rho convergence table");
  std::string w_kernel = "additive", w_rhos = "0.05,0.1,0.2,0.3", w_grid,
              w_out = "sweep.csv", w_cfg;
  double w_eps = 0.1, w_tol = 1e-10;
  int w_maxit = 200;
  bool w_nocorner = false;
  w->add_option("--kernel", w_kernel, "kernel name");
  w->add_option("--rhos", w_rhos, "ascending comma list in (0,1)");
  w->add_option("--eps", w_eps, "weighted-space radius");
  w->add_option("--tol", w_tol, "weighted-norm tolerance");
  w->add_option("--max_iter", w_maxit, "iteration cap");
  w->add_option("--grid", w_grid, "grid triple xmin,xmax,n");
  w->add_flag("--no-corner", w_nocorner, "suppress the corner-region integral");
  w->add_option("--out", w_out, "CSV output path");
  w->add_option("--config", w_cfg, "JSON config file (flags win)");

  // probe
  auto* p = app.add_subcommand("probe", "duality subsolution probe");
  std::string p_profile, p_kernel, p_out = "probe.json";
  double p_b = 1.05, p_R0 = 0.0, p_A = 0.0;
  bool p_norm = false;
  p->add_option("--profile", p_profile, "profile JSON")->required();
  p->add_option("--kernel", p_kernel, "duality kernel (default: profile kernel)");
  p->add_option("--b", p_b, "self-similar coefficient b > 1");
  p->add_option("--R0", p_R0, "outer radius (0 = 100*D)");
  p->add_option("--A", p_A, "subsolution threshold (0 = doubling search)");
  p->add_flag("--normalize", p_norm, "rescale to unit alpha-moment first");
  p->add_option("--out", p_out, "probe report path");

  // export
  auto* e = app.add_subcommand("export", "re-export a profile");
  std::string e_profile, e_format = "csv", e_out = "profile.csv";
  e->add_option("--profile", e_profile, "profile JSON")->required();
  e->add_option("--format", e_format, "json or csv");
  e->add_option("--out", e_out, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (s->parsed()) {
      ConfigOverride cfg;
      cfg.cmd = s;
      cfg.load(s_cfg);
      cfg.apply("kernel", s_kernel);
      cfg.apply("rho", s_rho);
      cfg.apply("beta", s_beta);
      cfg.apply("eps", s_eps);
      cfg.apply("tol", s_tol);
      cfg.apply("max_iter", s_maxit);
      cfg.apply("grid", s_grid);
      cfg.apply("out", s_out);
      if (!(s_rho > 0.0 && s_rho < 1.0)) throw std::invalid_argument("rho must lie in (0,1)");
      return cmd_solve(s_kernel, s_rho, s_beta, s_eps, s_tol, s_maxit, s_grid, s_nocorner,
                       s_out);
    }
    if (v->parsed()) return cmd_validate(v_profile, v_out);
    if (w->parsed()) {
      ConfigOverride cfg;
      cfg.cmd = w;
      cfg.load(w_cfg);
      cfg.apply("kernel", w_kernel);
      cfg.apply("rhos", w_rhos);
      cfg.apply("eps", w_eps);
      cfg.apply("tol", w_tol);
      cfg.apply("max_iter", w_maxit);
      cfg.apply("grid", w_grid);
      cfg.apply("out", w_out);
      return cmd_sweep(w_kernel, w_rhos, w_eps, w_tol, w_maxit, w_grid, w_nocorner, w_out);
    }
    if (p->parsed()) return cmd_probe(p_profile, p_kernel, p_b, p_R0, p_A, p_norm, p_out);
    if (e->parsed()) return cmd_export(e_profile, e_format, e_out);
  } catch (const coagself::IoError& err) {
    std::cerr << "io error: " << err.what() << "\n";
    return 3;
  } catch (const nlohmann::json::parse_error& err) {
    std::cerr << "parse error at byte " << err.byte << ": " << err.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& err) {
    std::cerr << "parse error: " << err.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return 1;
  } catch (const std::domain_error& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
