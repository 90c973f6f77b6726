// 3d axisymmetric leading order model: J(t, R) = int_0^t L12(g(tau))(R) dtau,
// the explicit fields, and the support radius envelope.
#pragma once

#include <memory>
#include <vector>

#include "nilab/grid.hpp"
#include "nilab/init_data.hpp"
#include "nilab/report.hpp"

namespace nilab {

// K(x) = int_0^{2 pi} G(beta, x) sin(2 beta) cos(beta) dbeta where
// G = 2 tan(b) e^{-7x/2} / (1 + tan(b)^2 e^{-6x})^{3/2}, so that
// L12(g0 G) = (3 / 8 pi) int_R^inf g0(s) K(J(s)/alpha) / s ds.
// Evaluated as 16 e^{-7x/2} int_0^inf t^2 (1 + t^2 e^{-6x})^{-3/2} (1 + t^2)^{-5/2} dt.
double kernel3d_quadrature(double x);

// Table of log K on [-x_max, x_max] (negative x is reached in case (ii)), with
// 4-point Lagrange interpolation and linear extrapolation of log K outside.
struct Kernel3d {
  double x_max = 100.0;
  double dx = 0.0;
  std::vector<double> logK;

  double operator()(double x) const;
  double sup() const;  // max over the table
  // bounds of K(x) e^{7x/2} over x in [0, x_max]
  double ratio_min = 0.0, ratio_max = 0.0;
};

// resolution = number of intervals on [0, x_max]
Kernel3d build_kernel(std::size_t resolution = 4096, double x_max = 100.0);

struct LomState3d {
  double t = 0.0;
  RadialProfile J;
  RadialProfile g0;
  RadialProfile eta0;
  RadialProfile eta0_Rderiv;
  double alpha = 0.0;
  Case3d which = Case3d::I;
};

struct LomNorms3d {
  double t = 0.0;
  double J_max = 0.0;  // max |J|
  double g_linf = 0.0;
  double eta_linf = 0.0;
  double xi_linf = 0.0;
};

struct LomTrajectory3d {
  GridPtr grid;
  double alpha = 0.0;
  Case3d which = Case3d::I;
  RadialProfile g0, eta0, eta0_Rderiv;
  std::vector<double> times;
  std::vector<RadialProfile> J;
  std::vector<LomNorms3d> norms;
  std::size_t substeps = 0;
  std::shared_ptr<const Kernel3d> kernel;

  LomState3d state(std::size_t n) const;
};

LomTrajectory3d evolve_J(const Data3d& data, double alpha, const std::vector<double>& times,
                         Case3d which, std::shared_ptr<const Kernel3d> kernel);

struct Lom3dFields {
  ScalarField g;
  ScalarField eta_app;
  ScalarField xi_app;
};

// Case (i): eta0 radial, xi0 = (alpha/2) R d_R eta0 sin(2 beta).
// Case (ii): the roles are exchanged.  Radial parts scale by exp(3J/alpha)
// (eta) and exp(-J/alpha) (xi); angular parts ride the characteristics
// tan(beta0) = tan(beta) e^{-3J/alpha}.
Lom3dFields eval_lom3d_fields(const LomState3d& s);

void compute_lom3d_norms(LomTrajectory3d& traj);

struct SupportSeries {
  std::vector<double> times;
  std::vector<double> outer;  // S(t)^alpha
  std::vector<double> inner;
};

// Worst-case radial characteristics d log R / dt = +-|L12(Omega_app)(R)| / 2
// from the outer and inner edges of the initial support.
SupportSeries evolve_support(const LomTrajectory3d& traj, double outer0, double inner0);

VerificationReport check_growth_bounds_3d(const LomTrajectory3d& traj, const SizeConstants& consts,
                                          const Data3d& data, double floor_margin = 1e-3);

// max_n max_R |int_0^{t_n} L12(g) - J(t_n)| / max |J|
double closed_loop_residual_3d(const LomTrajectory3d& traj);

// Largest relative gap between the case (i) eta series and the case (ii) xi
// series (each divided by its initial value).
double mirror_defect(const LomTrajectory3d& case_i, const LomTrajectory3d& case_ii);

}  // namespace nilab
