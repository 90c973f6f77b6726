// 2d leading order model: I(t, R) = int_0^t L(g(tau))(R) dtau and the explicit fields.
#pragma once

#include <optional>
#include <vector>

#include "nilab/grid.hpp"
#include "nilab/init_data.hpp"
#include "nilab/report.hpp"

namespace nilab {

// h(x) = e^{-x} / (1 + e^{-x})^2, evaluated without overflow (h is even).
double lom_h(double x);

struct LomState2d {
  double t = 0.0;
  RadialProfile I;
  RadialProfile g0;
  RadialProfile eta0;
  double alpha = 0.0;
  // R d_R eta0; only needed by the transported xi mode
  std::optional<RadialProfile> eta0_Rderiv;
};

struct LomNorms2d {
  double t = 0.0;
  double I_max = 0.0;
  double eta_linf = 0.0;
  double xi_linf = 0.0;
  double g_linf = 0.0;
  double omega_app_HN = 0.0;
  double bracket_lower_margin = 0.0;
  double bracket_upper_margin = 0.0;
};

struct LomTrajectory2d {
  GridPtr grid;
  double alpha = 0.0;
  RadialProfile g0;
  RadialProfile eta0;
  std::optional<RadialProfile> eta0_Rderiv;
  std::vector<double> times;
  std::vector<RadialProfile> I;
  std::vector<LomNorms2d> norms;
  std::size_t substeps = 0;

  LomState2d state(std::size_t n) const;
};

struct BracketConstants {
  double c1 = 1.0;
  double c2 = 4.0;
};

LomTrajectory2d evolve_I(const RadialProfile& g0, double alpha, const std::vector<double>& times);

ScalarField eval_g(const LomState2d& s);
ScalarField eval_eta_app(const LomState2d& s);

enum class XiMode { ExplicitZeroData, Transported };
ScalarField eval_xi_app(const LomState2d& s, XiMode mode);

// Omega_app at snapshot n: g + eta0 int_0^t exp(I / (2 alpha)) dtau (trapezoid over snapshots).
ScalarField eval_omega_app(const LomTrajectory2d& traj, std::size_t n);

double t_star(double alpha, double C_N1);

// Fills traj.norms (calH^N of Omega_app, L-infinity norms, bracket margins).
void compute_lom2d_norms(LomTrajectory2d& traj, int N, XiMode xi_mode = XiMode::ExplicitZeroData,
                         BracketConstants c = {});

struct GrowthCheckOptions {
  BracketConstants c;
  double bracket_slack = 1e-3;
  double floor_margin = 1e-3;
};

VerificationReport check_growth_bounds(const LomTrajectory2d& traj, const SizeConstants& consts,
                                       GrowthCheckOptions opt = {});

// max_n max_R |int_0^{t_n} L(g) - I(t_n)| / max |I|
double closed_loop_residual_2d(const LomTrajectory2d& traj);

std::vector<double> uniform_times(double t_end, std::size_t intervals);

}  // namespace nilab
