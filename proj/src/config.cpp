#include "nilab/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace nilab {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

bool to_double(const std::string& s, double& out) {
  std::istringstream in(s);
  in >> out;
  return !in.fail() && in.eof();
}

bool to_size(const std::string& s, std::size_t& out) {
  double d = 0.0;
  if (!to_double(s, d) || d < 0.0 || d != std::floor(d) || d > 1e12) return false;
  out = static_cast<std::size_t>(d);
  return true;
}

bool to_bool(const std::string& s, bool& out) {
  if (s == "true") return out = true, true;
  if (s == "false") return out = false, true;
  return false;
}

const char* case_name(CaseSelect c) {
  switch (c) {
    case CaseSelect::I: return "i";
    case CaseSelect::II: return "ii";
    default: return "both";
  }
}

const std::set<std::string> kKeys = {
    "experiment", "sweep_experiment", "alpha", "alpha_list", "delta", "k", "N", "nR", "nbeta",
    "R_max", "R_min", "spacing", "t_star", "t_end", "snapshots", "case3d", "output_dir",
    "bracket_slack", "f_cap_multiplier", "outputs", "corrupt"};

void assign(ExperimentConfig& c, const std::string& key, const std::string& raw,
            std::vector<std::string>& errs) {
  const std::string v = unquote(raw);
  auto bad = [&](const char* what) { errs.push_back(fmt::format("{}: expected {}, got '{}'", key, what, raw)); };
  double d = 0.0;
  std::size_t n = 0;
  bool b = false;
  if (key == "experiment" || key == "sweep_experiment") {
    try {
      (key == "experiment" ? c.experiment : c.sweep_experiment) = parse_experiment(v);
    } catch (const std::exception& e) {
      errs.push_back(e.what());
    }
  } else if (key == "alpha") {
    to_double(v, d) ? void(c.alpha = d) : bad("a number");
  } else if (key == "alpha_list") {
    if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') return bad("an array [a, b, ...]");
    c.alpha_list.clear();
    std::stringstream items(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(items, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      if (!to_double(item, d)) return bad("an array of numbers");
      c.alpha_list.push_back(d);
    }
  } else if (key == "delta") {
    to_double(v, d) ? void(c.delta = d) : bad("a number");
  } else if (key == "k" || key == "N") {
    to_size(v, n) ? void(c.k = static_cast<int>(n)) : bad("a nonnegative integer");
  } else if (key == "nR") {
    to_size(v, n) ? void(c.nR = n) : bad("a nonnegative integer");
  } else if (key == "nbeta") {
    to_size(v, n) ? void(c.nbeta = n) : bad("a nonnegative integer");
  } else if (key == "snapshots") {
    to_size(v, n) ? void(c.snapshots = n) : bad("a nonnegative integer");
  } else if (key == "outputs") {
    to_size(v, n) ? void(c.outputs = n) : bad("a nonnegative integer");
  } else if (key == "R_max") {
    to_double(v, d) ? void(c.R_max = d) : bad("a number");
  } else if (key == "R_min") {
    to_double(v, d) ? void(c.R_min = d) : bad("a number");
  } else if (key == "t_end") {
    to_double(v, d) ? void(c.t_end = d) : bad("a number");
  } else if (key == "bracket_slack") {
    to_double(v, d) ? void(c.bracket_slack = d) : bad("a number");
  } else if (key == "f_cap_multiplier") {
    to_double(v, d) ? void(c.f_cap_multiplier = d) : bad("a number");
  } else if (key == "spacing") {
    if (v == "uniform") c.spacing = Spacing::UniformR;
    else if (v == "log") c.spacing = Spacing::LogR;
    else bad("uniform or log");
  } else if (key == "case3d") {
    if (v == "i") c.case3d = CaseSelect::I;
    else if (v == "ii") c.case3d = CaseSelect::II;
    else if (v == "both") c.case3d = CaseSelect::Both;
    else bad("i, ii or both");
  } else if (key == "t_star") {
    to_bool(v, b) ? void(c.t_star = b) : bad("true or false");
  } else if (key == "corrupt") {
    to_bool(v, b) ? void(c.corrupt = b) : bad("true or false");
  } else if (key == "output_dir") {
    c.output_dir = v;
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string s;
        for (const auto& p : problems) s += (s.empty() ? "" : "\n") + p;
        return s;
      }()),
      problems_(std::move(problems)) {}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Lom2d: return "lom2d";
    case Experiment::Lom3d: return "lom3d";
    case Experiment::EllipticCheck: return "elliptic-check";
    case Experiment::Remainder2d: return "remainder2d";
    case Experiment::Sweep: return "sweep";
  }
  return "?";
}

Experiment parse_experiment(const std::string& s) {
  for (Experiment e : {Experiment::Lom2d, Experiment::Lom3d, Experiment::EllipticCheck,
                       Experiment::Remainder2d, Experiment::Sweep})
    if (to_string(e) == s) return e;
  throw std::invalid_argument("unknown experiment '" + s + "'");
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = to_string(experiment);
  if (experiment == Experiment::Sweep) j["sweep_experiment"] = to_string(sweep_experiment);
  j["alpha"] = alpha;
  j["alpha_list"] = alpha_list;
  j["delta"] = delta;
  j["k"] = k;
  j["nR"] = nR;
  j["nbeta"] = nbeta;
  j["R_max"] = R_max;
  j["R_min"] = R_min;
  j["spacing"] = spacing == Spacing::LogR ? "log" : "uniform";
  j["t_star"] = t_star;
  j["t_end"] = t_end ? nlohmann::json(*t_end) : nlohmann::json(nullptr);
  j["snapshots"] = snapshots;
  j["case3d"] = case_name(case3d);
  j["bracket_slack"] = bracket_slack;
  j["f_cap_multiplier"] = f_cap_multiplier;
  j["outputs"] = outputs;
  j["corrupt"] = corrupt;
  return j;
}

void apply_defaults(ExperimentConfig& c) {
  const Experiment e = c.experiment == Experiment::Sweep ? c.sweep_experiment : c.experiment;
  auto unset = [&](const char* key) { return !c.explicit_keys.count(key); };
  switch (e) {
    case Experiment::Lom3d:
      if (unset("k") && unset("N")) c.k = 4;
      if (unset("nR")) c.nR = 8192;
      if (unset("R_max")) c.R_max = 6.0;
      break;
    case Experiment::EllipticCheck:
      if (unset("alpha_list")) c.alpha_list = {1e-1, 1e-2, 1e-3};
      if (unset("spacing")) c.spacing = Spacing::LogR;
      if (unset("R_min")) c.R_min = 1e-2;
      break;
    case Experiment::Remainder2d:
      if (unset("nR")) c.nR = 1024;
      if (unset("delta")) c.delta = 0.25;
      if (unset("R_min")) c.R_min = 0.25;
      if (unset("spacing")) c.spacing = Spacing::LogR;
      break;
    default:
      break;
  }
}

void validate(const ExperimentConfig& c) {
  std::vector<std::string> errs;
  const Experiment e = c.experiment == Experiment::Sweep ? c.sweep_experiment : c.experiment;
  if (c.sweep_experiment == Experiment::Sweep) errs.push_back("sweep_experiment cannot be sweep");
  if (!(c.delta > 0.0 && c.delta < 1.0)) errs.push_back("delta must lie in (0, 1)");
  std::vector<double> alphas;
  if (c.experiment == Experiment::Sweep || e == Experiment::EllipticCheck) {
    if (c.alpha_list.empty()) errs.push_back("alpha_list must not be empty");
    alphas = c.alpha_list;
  } else {
    alphas = {c.alpha};
  }
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) {
      errs.push_back(fmt::format("alpha = {} must lie in (0, 1)", a));
      continue;
    }
    if (e == Experiment::EllipticCheck) continue;
    if (a > c.delta * c.delta) errs.push_back(fmt::format("alpha <= delta^2 violated (alpha = {}, delta = {})", a, c.delta));
    if (!(std::log(std::abs(std::log(a))) > 1.0))
      errs.push_back(fmt::format("|log|log alpha|| > 1 violated (alpha = {})", a));
  }
  if (c.k < 3) errs.push_back("k must be >= 3");
  if (e == Experiment::Lom3d && c.k < 4) errs.push_back("lom3d needs k >= 4");
  if (e == Experiment::Remainder2d && c.k != 3 && c.k != 4) errs.push_back("remainder2d needs N in {3, 4}");
  if (c.snapshots < 32) errs.push_back("snapshots must be >= 32");
  if (c.nR < 16) errs.push_back("nR must be >= 16");
  if (c.nbeta < 4) errs.push_back("nbeta must be >= 4");
  if (!(c.R_max > 0.0)) errs.push_back("R_max must be positive");
  if (c.R_min < 0.0 || c.R_min >= c.R_max) errs.push_back("R_min must lie in [0, R_max)");
  if (c.spacing == Spacing::LogR && !(c.R_min > 0.0)) errs.push_back("log spacing needs R_min > 0");
  if (!c.t_star && !c.t_end) errs.push_back("t_star = false needs t_end");
  if (c.t_end && !(*c.t_end > 0.0)) errs.push_back("t_end must be positive");
  if (!(c.bracket_slack > 0.0)) errs.push_back("bracket_slack must be positive");
  if (!(c.f_cap_multiplier > 0.0)) errs.push_back("f_cap_multiplier must be positive");
  if (c.outputs < 1) errs.push_back("outputs must be >= 1");
  if (c.output_dir.empty()) errs.push_back("output_dir must not be empty");
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

ExperimentConfig parse_config(const std::string& text, const ConfigOverrides& ov) {
  ExperimentConfig c;
  std::vector<std::string> errs;
  std::map<std::string, std::string> raw;
  std::istringstream in(text);
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errs.push_back(fmt::format("line {}: expected key = value", lineno));
      continue;
    }
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (!kKeys.count(key)) {
      errs.push_back(fmt::format("line {}: unknown key '{}'", lineno, key));
      continue;
    }
    if (raw.count(key)) {
      errs.push_back(fmt::format("line {}: duplicate key '{}'", lineno, key));
      continue;
    }
    raw[key] = value;
  }
  // experiment first so defaults and later keys see it
  for (const char* first : {"experiment", "sweep_experiment"})
    if (raw.count(first)) assign(c, first, raw[first], errs);
  for (const auto& [key, value] : raw) {
    c.explicit_keys.insert(key);
    if (key != "experiment" && key != "sweep_experiment") assign(c, key, value, errs);
  }
  if (ov.experiment) {
    if (raw.count("experiment") && c.experiment != *ov.experiment)
      errs.push_back("config names experiment '" + to_string(c.experiment) + "' but the command is '" +
                     to_string(*ov.experiment) + "'");
    c.experiment = *ov.experiment;
  }
  if (ov.alpha) c.alpha = *ov.alpha, c.explicit_keys.insert("alpha");
  if (ov.delta) c.delta = *ov.delta, c.explicit_keys.insert("delta");
  if (ov.output_dir) c.output_dir = *ov.output_dir, c.explicit_keys.insert("output_dir");
  if (ov.corrupt) c.corrupt = true;
  if (!errs.empty()) throw ConfigError(std::move(errs));
  apply_defaults(c);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path, const ConfigOverrides& ov) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), ov);
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& c) {
  if (c.experiment != Experiment::Sweep) throw std::invalid_argument("expand_sweep needs a sweep config");
  std::vector<ExperimentConfig> out;
  for (double a : c.alpha_list) {
    ExperimentConfig child = c;
    child.experiment = c.sweep_experiment;
    child.alpha = a;
    child.alpha_list = c.sweep_experiment == Experiment::EllipticCheck ? std::vector<double>{a}
                                                                       : std::vector<double>{};
    child.output_dir = c.output_dir + "/" + fmt::format("alpha_{:g}", a);
    out.push_back(std::move(child));
  }
  return out;
}

}  // namespace nilab
