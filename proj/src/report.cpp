#include "gbh/report.hpp"

#include "gbh/format.hpp"

namespace gbh {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string optional_text(const std::optional<double>& v) { return v ? shortest(*v) : "NA"; }

}  // namespace

Json to_json(const BoundBreakdown& b) {
  Json j;
  j["parameterization"] = b.parameterization == Parameterization::kRho ? "rho" : "a";
  j["terms"] = Json::array();
  for (double t : b.terms) j["terms"].push_back(t);
  j["total"] = b.total;
  j["ratio"] = b.ratio();
  return j;
}

Json to_json(const SimConfig& c) {
  Json j;
  j["m"] = c.m;
  j["group_sizes"] = c.group_sizes;
  j["nonnull_counts"] = c.nonnull_counts;
  j["effect_mu"] = c.effect_mu;
  j["rho"] = c.rho;
  j["lambda"] = c.lambda;
  j["alpha"] = c.alpha;
  j["procedure"] = to_string(c.procedure);
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  return j;
}

Json to_json(const SimSummary& s) {
  Json j;
  j["fdr_hat"] = s.fdr_hat;
  j["fdr_se"] = s.fdr_se;
  j["power_hat"] = optional_number(s.power_hat);
  j["power_se"] = optional_number(s.power_se);
  j["bound"] = optional_number(s.bound_value);
  j["replications_run"] = s.replications_run;
  if (s.x0) j["x0"] = *s.x0;
  j["config"] = to_json(s.config);
  return j;
}

Json to_json(const VerifyReport& r) {
  Json j;
  j["section"] = to_string(r.section);
  j["passed"] = r.passed;
  j["max_violation"] = r.max_violation;
  j["notes"] = r.notes;
  j["points"] = Json::array();
  for (const VerifyPoint& p : r.grid) {
    Json pj;
    for (const auto& [name, value] : p.coords) pj[name] = value;
    pj["observed"] = p.observed;
    pj["claimed"] = p.claimed;
    pj["violation"] = p.violation;
    pj["se"] = optional_number(p.se);
    pj["asserted"] = p.asserted;
    if (p.asserted) pj["ok"] = p.ok;
    j["points"].push_back(std::move(pj));
  }
  return j;
}

std::string sim_log_row(const SimSummary& s) {
  const SimConfig& c = s.config;
  std::string row = to_string(c.procedure);
  row += ',' + std::to_string(c.m);
  row += ',' + shortest(c.rho);
  row += ',' + shortest(c.lambda);
  row += ',' + shortest(c.alpha);
  row += ',' + std::to_string(s.replications_run);
  row += ',' + shortest(s.fdr_hat);
  row += ',' + shortest(s.fdr_se);
  row += ',' + optional_text(s.power_hat);
  row += ',' + optional_text(s.power_se);
  row += ',' + optional_text(s.bound_value);
  return row;
}

}  // namespace gbh
