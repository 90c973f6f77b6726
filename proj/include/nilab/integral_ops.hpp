// Integral operators L, L12, R^alpha and the tail integral G(R) = int_R^inf f(s)/s ds.
#pragma once

#include <vector>

#include "nilab/grid.hpp"

namespace nilab {

// s_i = log R_i
std::vector<double> log_nodes(const Grid& g);

// Throws if f has mass (relative 1e-12) at R >= R_max / 2.
void require_certified_support(const RadialProfile& f, const char* what);

// Right-to-left cumulative trapezoid of f d(log s); the last node is 0.
RadialProfile tail_log_integral(const RadialProfile& f);

// (1/pi) int_R^inf int_0^{2pi} Omega sin(2b) / s db ds
RadialProfile op_L(const ScalarField& omega);

// (3 / (8 pi)) int_R^inf int_0^{2pi} Omega sin(2b) cos(b) / s db ds
RadialProfile op_L12(const ScalarField& omega);

// R^{-4/alpha} / (4 alpha pi) int_0^R int_0^{2pi} s^{4/alpha} Omega sin(2b) / s db ds,
// accumulated as int exp((4/alpha)(log s - log R)) f2(s) dlog s.
RadialProfile op_Ralpha(const ScalarField& omega, double alpha);

}  // namespace nilab
