// Full 2d Boussinesq system for (Omega, eta, xi) = (omega, d_x rho, d_y rho) in
// scaled coordinates on a half-period log-R grid, and the remainder against
// the leading order model.
//
//   Omega_t + u.grad Omega = eta
//   eta_t   + u.grad eta   = d_x u2 - d_x u1 eta - d_x u2 xi
//   xi_t    + u.grad xi    = d_y u2 - d_y u1 eta - d_y u2 xi
//
// with u.grad = (-alpha d_b Psi) d_s + (2 Psi + alpha d_s Psi) d_b, s = log R.
#pragma once

#include <optional>
#include <vector>

#include "nilab/grid.hpp"
#include "nilab/init_data.hpp"
#include "nilab/report.hpp"

namespace nilab {

struct FullState2d {
  double t = 0.0;
  ScalarField omega, eta, xi;
  double alpha = 0.0;
};

struct VelocityTerms {
  ScalarField Vs;  // coefficient of d_s
  ScalarField Vb;  // coefficient of d_beta
  ScalarField dxu1, dxu2, dyu1, dyu2;
};

// Velocity gradients of u1 = -d_y(r^2 Psi), u2 = d_x(r^2 Psi); the radial
// prefactors cancel exactly, so every output is a plain field.
VelocityTerms velocity_terms(const ScalarField& psi, double alpha);

struct FullSolverOptions {
  bool sources = true;  // false: pure transport
  double hyper_gamma = 0.01;
  double cfl = 0.5;
  double dt_max = 0.0;  // cap on adaptive steps (0: none)
  std::optional<ScalarField> frozen_psi;  // transport with a fixed stream function
};

// Largest stable dt for the given transport coefficients (infinite if at rest).
double cfl_limit(const VelocityTerms& v, double cfl);

struct StepStats {
  double hyper_rate = 0.0;  // max |hyperdiffusion term| over stages and fields
  double dt_limit = 0.0;
};

// One classical RK4 step.  Throws std::invalid_argument if dt exceeds the CFL limit.
FullState2d step(const FullState2d& s, double dt, const FullSolverOptions& opt,
                 StepStats* stats = nullptr);

struct FullRun {
  std::vector<FullState2d> snapshots;  // one per requested output time (fewer if aborted)
  std::size_t steps = 0;
  double hyper_integral = 0.0;  // sum over steps of dt * hyper_rate
  bool aborted = false;
};

// Adaptive steps of dt_scale * CFL limit, landing on every output time.
// Aborts (keeping the partial run) when any value exceeds 1e12.
FullRun evolve_full(const FullState2d& s0, const std::vector<double>& out_times,
                    const FullSolverOptions& opt, double dt_scale = 1.0);

struct RemainderSeries {
  std::vector<double> times;
  std::vector<double> F;
  std::vector<double> omega_r, eta_r, xi_r;  // calH^N norms
  std::vector<double> sqrt_alpha_cap;
  std::vector<double> eta_linf, eta_app_linf;
  double F0 = 0.0;
};

struct RemainderOptions {
  int N = 3;
  std::size_t nR = 1024;
  std::size_t nbeta = 64;  // quarter-grid count; the half period gets 2 (nbeta - 1) nodes
  double R_min = 0.25;
  double R_max = 8.0;
  std::optional<double> t_end;  // default t_star
  std::size_t outputs = 32;
  std::size_t lom_refine = 8;  // LOM snapshots per output interval
  double f_cap_multiplier = 3.0;
  double eta_app_scale = 1.0;  // 1.5 for the corrupted-LOM control
  double dt_scale = 1.0;
  FullSolverOptions solver;
};

struct RemainderResult {
  RemainderSeries series;
  VerificationReport report;
  bool aborted = false;
};

RemainderResult run_remainder_experiment(const DataParams& p, const RemainderOptions& opt = {});

}  // namespace nilab
