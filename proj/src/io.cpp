#include "nilab/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace nilab {
namespace {

void dump(const nlohmann::json& j, std::string& out, int depth) {
  const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted keys
        if (!first) out += ",\n";
        first = false;
        out += pad + nlohmann::json(it.key()).dump() + ": ";
        dump(it.value(), out, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], out, depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + csv_field(header[i]);
  out += "\r\n";
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw std::invalid_argument("CSV row width does not match header");
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_double(r[i]);
    out += "\r\n";
  }
  return out;
}

std::string dump_json(const nlohmann::json& j) {
  std::string out;
  dump(j, out, 0);
  return out + "\n";
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  write_text(path, to_csv(header, rows));
}

void write_report(const VerificationReport& rep, const std::string& path) {
  write_text(path, dump_json(rep.to_json(false)));
}

const std::vector<std::string> kLom2dColumns = {
    "t", "I_max", "eta_linf", "xi_linf", "g_linf", "omega_app_HN", "bracket_lower_margin",
    "bracket_upper_margin"};
const std::vector<std::string> kLom3dColumns = {
    "t", "J_max", "g_linf", "eta_linf", "xi_linf", "support_outer", "support_inner"};
const std::vector<std::string> kRemainderColumns = {
    "t", "F", "omega_r_HN", "eta_r_HN", "xi_r_HN", "sqrt_alpha_cap"};

std::vector<std::vector<double>> lom2d_rows(const LomTrajectory2d& traj) {
  std::vector<std::vector<double>> rows;
  for (const auto& n : traj.norms)
    rows.push_back({n.t, n.I_max, n.eta_linf, n.xi_linf, n.g_linf, n.omega_app_HN,
                    n.bracket_lower_margin, n.bracket_upper_margin});
  return rows;
}

std::vector<std::vector<double>> lom3d_rows(const LomTrajectory3d& traj, const SupportSeries& s) {
  if (s.times.size() != traj.norms.size()) throw std::invalid_argument("support series length mismatch");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < traj.norms.size(); ++i) {
    const auto& n = traj.norms[i];
    rows.push_back({n.t, n.J_max, n.g_linf, n.eta_linf, n.xi_linf, s.outer[i], s.inner[i]});
  }
  return rows;
}

std::vector<std::vector<double>> remainder_rows(const RemainderSeries& s) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < s.times.size(); ++i)
    rows.push_back({s.times[i], s.F[i], s.omega_r[i], s.eta_r[i], s.xi_r[i], s.sqrt_alpha_cap[i]});
  return rows;
}

}  // namespace nilab
