// CSV and JSON writers.  Floats use 17 significant digits; JSON objects are
// written with sorted keys, so identical inputs give identical bytes.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nilab/full2d.hpp"
#include "nilab/lom2d.hpp"
#include "nilab/lom3d.hpp"
#include "nilab/report.hpp"

namespace nilab {

std::string format_double(double x);
// RFC-4180 quoting when the field holds a comma, quote or line break.
std::string csv_field(const std::string& s);
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);
std::string dump_json(const nlohmann::json& j);

// Creates parent directories; throws std::runtime_error on I/O failure.
void write_text(const std::string& path, const std::string& text);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_report(const VerificationReport& rep, const std::string& path);

extern const std::vector<std::string> kLom2dColumns;
extern const std::vector<std::string> kLom3dColumns;
extern const std::vector<std::string> kRemainderColumns;

std::vector<std::vector<double>> lom2d_rows(const LomTrajectory2d& traj);
std::vector<std::vector<double>> lom3d_rows(const LomTrajectory3d& traj, const SupportSeries& s);
std::vector<std::vector<double>> remainder_rows(const RemainderSeries& s);

}  // namespace nilab
