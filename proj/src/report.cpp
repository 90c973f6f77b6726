#include "nilab/report.hpp"

#include <algorithm>
#include <cmath>

namespace nilab {

namespace {

double rel_margin(double big, double small) {
  const double scale = std::max(std::abs(big), std::abs(small));
  if (scale == 0.0) return 0.0;
  return (big - small) / scale;
}

}  // namespace

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Check& VerificationReport::check_le(std::string name, std::string anchor, std::string ineq,
                                    double lhs, double rhs, double rel_slack) {
  Check c{std::move(name), std::move(anchor), std::move(ineq), lhs, rhs, rel_margin(rhs, lhs),
          false, {}};
  c.pass = std::isfinite(c.margin) && c.margin >= -rel_slack;
  checks.push_back(std::move(c));
  return checks.back();
}

Check& VerificationReport::check_ge(std::string name, std::string anchor, std::string ineq,
                                    double lhs, double rhs, double rel_slack) {
  Check c{std::move(name), std::move(anchor), std::move(ineq), lhs, rhs, rel_margin(lhs, rhs),
          false, {}};
  c.pass = std::isfinite(c.margin) && c.margin >= -rel_slack;
  checks.push_back(std::move(c));
  return checks.back();
}

Check& VerificationReport::check_true(std::string name, std::string anchor, std::string ineq,
                                      bool ok, std::string note) {
  Check c{std::move(name), std::move(anchor), std::move(ineq), ok ? 1.0 : 0.0, 1.0,
          ok ? 0.0 : -1.0, ok, std::move(note)};
  checks.push_back(std::move(c));
  return checks.back();
}

void VerificationReport::merge(const VerificationReport& other, const std::string& prefix) {
  for (Check c : other.checks) {
    if (!prefix.empty()) c.name = prefix + "." + c.name;
    checks.push_back(std::move(c));
  }
  for (auto it = other.metrics.begin(); it != other.metrics.end(); ++it)
    metrics[prefix.empty() ? it.key() : prefix + "." + it.key()] = it.value();
}

nlohmann::json VerificationReport::to_json(bool with_runtime) const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["config"] = config;
  j["pass"] = pass();
  j["metrics"] = metrics;
  auto arr = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e;
    e["name"] = c.name;
    e["anchor"] = c.anchor;
    e["inequality"] = c.inequality;
    e["lhs"] = c.lhs;
    e["rhs"] = c.rhs;
    e["margin"] = c.margin;
    e["pass"] = c.pass;
    if (!c.note.empty()) e["note"] = c.note;
    arr.push_back(std::move(e));
  }
  j["checks"] = std::move(arr);
  if (with_runtime) j["runtime_seconds"] = runtime_seconds;
  return j;
}

}  // namespace nilab
