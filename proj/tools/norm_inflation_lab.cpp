// norm-inflation-lab <subcommand> --config FILE [--alpha X --delta Y --out DIR --debug-corrupt-lom]
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nilab/config.hpp"
#include "nilab/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Leading order model and remainder experiments for norm inflation"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<double> alpha, delta;
  std::optional<std::string> out;
  bool corrupt = false;
  for (const char* name : {"lom2d", "lom3d", "elliptic-check", "remainder2d", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_option("--alpha", alpha, "override alpha");
    sub->add_option("--delta", delta, "override delta");
    sub->add_option("--out", out, "output directory");
    sub->add_flag("--debug-corrupt-lom", corrupt, "run the corrupted-input twin (checks should fail)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nilab::kExitError;
  }
  try {
    nilab::ConfigOverrides ov;
    ov.experiment = nilab::parse_experiment(app.get_subcommands().front()->get_name());
    ov.alpha = alpha;
    ov.delta = delta;
    ov.output_dir = out;
    ov.corrupt = corrupt;
    const nilab::ExperimentConfig cfg =
        config_path.empty() ? nilab::parse_config("", ov) : nilab::load_config(config_path, ov);
    const nilab::RunOutcome r = nilab::run_experiment(cfg, std::cout);
    std::cout << (r.exit_code == nilab::kExitPass ? "PASS" : r.exit_code == nilab::kExitFail ? "FAIL" : "ERROR")
              << "\n";
    return r.exit_code;
  } catch (const nilab::ConfigError& e) {
    std::cerr << "config error:\n" << e.what() << "\n";
    return nilab::kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nilab::kExitError;
  }
}
