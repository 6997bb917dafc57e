#pragma once

#include <json.hpp>
#include <string>

#include "coagself/fixedpoint.hpp"
#include "coagself/nonexist.hpp"
#include "coagself/verify.hpp"

namespace coagself {

// I/O failures distinct from parse/usage errors (CLI maps them to a
// dedicated exit status).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solved profile plus the configuration needed to re-verify it.
struct ProfileDoc {
  std::string kernel;
  double rho = 0.0;
  double beta = 0.0;
  double eps = 0.0;
  bool include_corner = true;
  Field lambda;
  SolveReport report;
};

nlohmann::json field_to_json(const Field& f);
Field field_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const SolveReport& r);
SolveReport report_from_json(const nlohmann::json& j);

nlohmann::json profile_to_json(const ProfileDoc& doc);
ProfileDoc profile_from_json(const nlohmann::json& j);

nlohmann::json verification_to_json(const VerificationReport& rep);
nlohmann::json probe_to_json(const DualitySchedule& sched, const GapReport& gap);

void save_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);

// CSV with header x,lambda,xi,g, one row per grid point, full-precision
// decimals.
void export_profile_csv(const ProfileDoc& doc, const std::string& path);

}  // namespace coagself
