// Experiment configuration: flat key = value text (a TOML subset).
#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nilab/grid.hpp"
#include "nilab/init_data.hpp"

namespace nilab {

enum class Experiment { Lom2d, Lom3d, EllipticCheck, Remainder2d, Sweep };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& s);

// Carries every violation found during validation, one per line of what().
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

enum class CaseSelect { I, II, Both };

struct ExperimentConfig {
  Experiment experiment = Experiment::Lom2d;
  Experiment sweep_experiment = Experiment::Lom2d;  // child type of a sweep
  double alpha = 0.0;
  std::vector<double> alpha_list;
  double delta = 0.1;
  int k = 3;
  std::size_t nR = 2048;
  std::size_t nbeta = 64;
  double R_max = 8.0;
  double R_min = 0.0;  // 0: R_max / nR on uniform grids
  Spacing spacing = Spacing::UniformR;
  bool t_star = true;
  std::optional<double> t_end;
  std::size_t snapshots = 512;
  CaseSelect case3d = CaseSelect::Both;
  std::string output_dir = "out";
  double bracket_slack = 1e-3;
  double f_cap_multiplier = 3.0;
  std::size_t outputs = 32;  // remainder2d: full-solver output times
  bool corrupt = false;      // negative-control twin

  std::set<std::string> explicit_keys;  // keys present in the source text

  nlohmann::json to_json() const;
};

// Command-line values; they win over the text.
struct ConfigOverrides {
  std::optional<Experiment> experiment;
  std::optional<double> alpha, delta;
  std::optional<std::string> output_dir;
  bool corrupt = false;
};

// Parses and validates; experiment-specific defaults are applied to keys the
// text leaves unset.  Throws ConfigError listing every problem.
ExperimentConfig parse_config(const std::string& text, const ConfigOverrides& ov = {});
ExperimentConfig load_config(const std::string& path, const ConfigOverrides& ov = {});

// Re-checks invariants after command-line overrides.
void validate(const ExperimentConfig& c);
// Applies the experiment-specific defaults to keys not set explicitly.
void apply_defaults(ExperimentConfig& c);

// One child per alpha in alpha_list, written below output_dir/alpha_<value>.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& c);

}  // namespace nilab
