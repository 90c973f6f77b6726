// Initial data families (2d and 3d) and the size constants C_k, C_{k+1}.
#pragma once

#include "nilab/grid.hpp"

namespace nilab {

enum class Case3d { None, I, II };

struct DataParams {
  double delta = 0.1;
  double alpha = 1e-3;
  int k = 3;
  Case3d case3d = Case3d::None;
};

// Throws unless alpha <= delta^2, delta in (0, 1), k >= 3.
void validate(const DataParams& p);

struct SizeConstants {
  double C_k = 0.0;
  double C_k1 = 0.0;
};

// |log|log alpha||; throws if it is not > 1.
double loglog(double alpha);

SizeConstants size_constants(const DataParams& p);

// Smooth bump exp(1 - 1/(1 - u^2)), u = (R - center) / width; max 1 at center.
double bump(double R, double center, double width);
double bump_derivative(double R, double center, double width);
// Smooth plateau: 1 on [a, b], 0 outside (a0, b0), a0 < a <= b < b0.
double plateau(double x, double a0, double a, double b, double b0);

RadialProfile make_bump(GridPtr g, double center, double width);
RadialProfile make_eta0_2d(GridPtr g, const DataParams& p);
RadialProfile make_eta0_2d_Rderiv(GridPtr g, const DataParams& p);  // R d_R eta0, exact
RadialProfile make_g0_2d(GridPtr g, const DataParams& p);

struct Data3d {
  RadialProfile g0;
  RadialProfile eta0;
  RadialProfile eta0_Rderiv;  // R d_R eta0, exact
  double epsilon = 0.0;
  // support of eta0 and g0 in R (the alpha-th power of the physical radius)
  double eta_support_lo = 0.0, eta_support_hi = 0.0;
  double g_support_lo = 0.0, g_support_hi = 0.0;
  // S(0)^alpha: outer edge of the union of supports, and the stated bracket
  double S0_alpha = 0.0;
  double S0_bracket_lo = 0.0, S0_bracket_hi = 0.0;
};

Data3d make_data_3d(GridPtr g, const DataParams& p);

}  // namespace nilab
