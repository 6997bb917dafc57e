#include "coagself/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace coagself {

namespace {

nlohmann::json tail_to_json(const std::optional<TailDecay>& t) {
  if (!t) return nullptr;
  return {{"rate", t->rate}, {"coef", t->coef}};
}

std::optional<TailDecay> tail_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return TailDecay{j.at("rate").get<double>(), j.at("coef").get<double>()};
}

}  // namespace

nlohmann::json field_to_json(const Field& f) {
  nlohmann::json j;
  j["grid"] = {{"xmin", f.grid.x_min}, {"xmax", f.grid.x_max}, {"n", f.grid.n}};
  j["values"] = std::vector<double>(f.values.data(), f.values.data() + f.values.size());
  j["left_tail"] = tail_to_json(f.left_tail);
  j["right_tail"] = tail_to_json(f.right_tail);
  return j;
}

Field field_from_json(const nlohmann::json& j) {
  const auto& jg = j.at("grid");
  Field f = make_field(build_grid(jg.at("xmin").get<double>(), jg.at("xmax").get<double>(),
                                  jg.at("n").get<int>()));
  const auto vals = j.at("values").get<std::vector<double>>();
  if (static_cast<int>(vals.size()) != f.grid.n)
    throw IoError("field: value count does not match grid n");
  for (int i = 0; i < f.grid.n; ++i) f.values[i] = vals[i];
  f.left_tail = tail_from_json(j.at("left_tail"));
  f.right_tail = tail_from_json(j.at("right_tail"));
  return f;
}

nlohmann::json report_to_json(const SolveReport& r) {
  nlohmann::json j;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["final_weighted_residual"] = r.final_weighted_residual;
  j["contraction_ratios"] = r.contraction_ratios;
  j["tail_fits"] = {{"left", r.tail_left}, {"right", r.tail_right}};
  j["mass"] = r.mass;
  return j;
}

SolveReport report_from_json(const nlohmann::json& j) {
  SolveReport r;
  r.iterations = j.at("iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.final_weighted_residual = j.at("final_weighted_residual").get<double>();
  r.contraction_ratios = j.at("contraction_ratios").get<std::vector<double>>();
  r.tail_left = j.at("tail_fits").at("left").get<double>();
  r.tail_right = j.at("tail_fits").at("right").get<double>();
  r.mass = j.at("mass").get<double>();
  return r;
}

nlohmann::json profile_to_json(const ProfileDoc& doc) {
  nlohmann::json j = field_to_json(doc.lambda);
  j["kernel"] = doc.kernel;
  j["rho"] = doc.rho;
  j["beta"] = doc.beta;
  j["eps"] = doc.eps;
  j["corner"] = doc.include_corner;
  j["report"] = report_to_json(doc.report);
  return j;
}

ProfileDoc profile_from_json(const nlohmann::json& j) {
  ProfileDoc doc;
  doc.lambda = field_from_json(j);
  doc.kernel = j.at("kernel").get<std::string>();
  doc.rho = j.at("rho").get<double>();
  doc.beta = j.at("beta").get<double>();
  doc.eps = j.at("eps").get<double>();
  doc.include_corner = j.value("corner", true);
  doc.report = report_from_json(j.at("report"));
  return doc;
}

nlohmann::json verification_to_json(const VerificationReport& rep) {
  nlohmann::json j;
  j["residual"] = rep.residual;
  j["omega_fit_rate"] = rep.omega_fit_rate;
  j["derivative_ratio"] = rep.derivative_ratio;
  j["envelope"] = {{"pass", rep.envelope.pass},
                   {"margins",
                    {{"lower_left", rep.envelope.lower_left},
                     {"upper_left", rep.envelope.upper_left},
                     {"upper_right", rep.envelope.upper_right}}}};
  j["tails"] = {{"left", rep.tail_left}, {"right", rep.tail_right}};
  return j;
}

nlohmann::json probe_to_json(const DualitySchedule& sched, const GapReport& gap) {
  nlohmann::json j;
  j["alpha"] = sched.alpha;
  j["beta0"] = sched.beta0;
  j["A"] = sched.A;
  j["R0"] = sched.R0;
  j["D"] = sched.D;
  j["M_dual"] = sched.M_dual;
  j["omega_R0"] = sched.omega_R0;
  j["q"] = sched.q;
  j["n_bar"] = sched.n_bar;
  j["lhs"] = gap.lhs;
  j["rhs"] = gap.rhs;
  j["flag"] = gap.flag;
  j["b_hat"] = gap.b_hat;
  return j;
}

void save_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(1) << "\n";
  if (!out) throw IoError("write to '" + path + "' failed");
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return nlohmann::json::parse(in);  // parse_error reports the byte offset
}

void export_profile_csv(const ProfileDoc& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "x,lambda,xi,g\n";
  char buf[96];
  const LogGrid& g = doc.lambda.grid;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.point(i);
    const double lam = doc.lambda.values[i];
    const double xi = std::exp(x / doc.rho);
    const double gv = doc.rho * lam * std::exp(-x / doc.rho);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x, lam, xi, gv);
    out << buf;
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace coagself
