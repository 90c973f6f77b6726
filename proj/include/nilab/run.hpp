// Experiment orchestration: runs a validated config and writes its artifacts.
#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "nilab/config.hpp"
#include "nilab/report.hpp"

namespace nilab {

enum ExitCode { kExitPass = 0, kExitFail = 1, kExitError = 2 };

struct RunOutcome {
  int exit_code = kExitError;
  VerificationReport report;
  std::vector<std::string> files;
};

// Writes <experiment>_report.json plus series CSVs under cfg.output_dir and
// run_meta.json with the wall-clock time (kept out of the report so reruns are
// byte-identical).  Module errors become a failing "error" check and exit 2.
RunOutcome run_experiment(const ExperimentConfig& cfg, std::ostream& log);

struct Table {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct ExperimentResult {
  VerificationReport report;
  std::vector<Table> tables;
};

// Experiment bodies without file output (cfg.experiment must not be sweep).
ExperimentResult run_body(const ExperimentConfig& cfg);

// Vorticity used by elliptic-check: a smooth bump times three sine modes.
ScalarField elliptic_test_omega(GridPtr g);

}  // namespace nilab
