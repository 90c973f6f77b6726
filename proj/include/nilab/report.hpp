// Structured pass/fail record of checked inequalities.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace nilab {

struct Check {
  std::string name;
  std::string anchor;      // stable identifier of the inequality under test
  std::string inequality;  // rendered as text
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;     // relative; >= -slack means pass
  bool pass = false;
  std::string note;
};

struct VerificationReport {
  std::string experiment;
  nlohmann::json config = nlohmann::json::object();
  std::vector<Check> checks;
  nlohmann::json metrics = nlohmann::json::object();
  double runtime_seconds = 0.0;

  bool pass() const;
  // lhs <= rhs up to relative slack
  Check& check_le(std::string name, std::string anchor, std::string ineq, double lhs, double rhs,
                  double rel_slack = 0.0);
  // lhs >= rhs up to relative slack
  Check& check_ge(std::string name, std::string anchor, std::string ineq, double lhs, double rhs,
                  double rel_slack = 0.0);
  Check& check_true(std::string name, std::string anchor, std::string ineq, bool ok,
                    std::string note = {});
  void merge(const VerificationReport& other, const std::string& prefix = {});
  nlohmann::json to_json(bool with_runtime = true) const;
};

}  // namespace nilab
