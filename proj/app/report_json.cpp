#include "report_json.hpp"

#include <cmath>
#include <cstdio>

namespace pbrp::app {

Json real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json reals(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

Json reals(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(real(v(i)));
  return a;
}

namespace {

Json vectors(const std::vector<Eigen::VectorXd>& vs) {
  Json a = Json::array();
  for (const auto& v : vs) a.push_back(reals(v));
  return a;
}

}  // namespace

Json to_json(const ItoReport& r) {
  Json j;
  j["theorem"] = r.theorem;
  j["alpha"] = real(r.alpha);
  j["s"] = real(r.s);
  j["t"] = real(r.t);
  j["meshes"] = reals(r.meshes);
  j["lhs"] = vectors(r.lhs);
  Json terms = Json::array();
  for (const auto& t : r.terms) terms.push_back({{"name", t.name}, {"values", vectors(t.values)}});
  j["terms"] = terms;
  j["residuals"] = reals(r.residuals);
  j["order"] = real(r.order);
  j["threshold"] = real(r.threshold);
  j["slack"] = real(r.slack);
  j["tolerance"] = real(r.tolerance);
  j["verdict"] = r.verdict;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const ConvergenceReport& r) {
  Json j;
  j["meshes"] = reals(r.meshes);
  j["values"] = vectors(r.values);
  j["residuals"] = reals(r.residuals);
  j["slope"] = real(r.slope);
  j["threshold"] = real(r.threshold);
  j["pass"] = r.pass;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const SelftestResult& r) {
  Json j;
  j["pass"] = r.pass();
  j["reference_coproducts_matched"] = r.reference_vectors_matched;
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"cases", c.cases}});
  j["checks"] = checks;
  return j;
}

std::string convergence_table(const std::vector<double>& meshes, const std::vector<double>& residuals,
                              double floor) {
  std::string out = "  mesh          residual      order\n";
  char buf[96];
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    std::string res = std::isnan(residuals[k]) ? "-" : "";
    if (res.empty()) {
      std::snprintf(buf, sizeof buf, "%.6e", residuals[k]);
      res = buf;
    }
    std::string ord = "-";
    if (k > 0 && residuals[k] > floor && residuals[k - 1] > floor && !std::isnan(residuals[k - 1])) {
      std::snprintf(buf, sizeof buf, "%.3f", std::log(residuals[k] / residuals[k - 1]) / std::log(meshes[k] / meshes[k - 1]));
      ord = buf;
    }
    std::snprintf(buf, sizeof buf, "  %-13.6e %-13s %s\n", meshes[k], res.c_str(), ord.c_str());
    out += buf;
  }
  return out;
}

}  // namespace pbrp::app
