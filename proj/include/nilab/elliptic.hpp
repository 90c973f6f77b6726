// Scaled elliptic problems for the stream function.
//
// 2d:  4 Psi + a^2 R^2 Psi_RR + d_bb Psi + (4a + a^2) R Psi_R = -Omega
// 3d: -a^2 R^2 Psi_RR - a(a + 5) R Psi_R - d_bb Psi + d_b(tan(b) Psi) - 6 Psi = Omega
//
// In s = log R each beta mode reduces to a constant-coefficient ODE whose
// decaying Green's function is a sum of one-sided exponential convolutions.
#pragma once

#include <vector>

#include "nilab/grid.hpp"
#include "nilab/report.hpp"

namespace nilab {

// Quarter grid, Dirichlet at beta = 0 and pi/2 (sin(2 n beta) modes).
ScalarField solve_psi_2d(const ScalarField& omega, double alpha);

// Half-period grid: full Fourier content cos/sin(m beta), m even.
ScalarField solve_psi_plane(const ScalarField& omega, double alpha);

// Quarter grid, Dirichlet at beta = 0 and pi/2.
ScalarField solve_psi_3d(const ScalarField& omega, double alpha);

// Dense operator -d_bb + d_b(tan(b) .) - 6 on the interior beta nodes of a
// quarter grid (row-major, (nB - 2)^2), built by sine/cosine collocation.
std::vector<double> beta_operator_3d(const Grid& g);
// Applies that operator row by row (boundary columns of the result are 0).
ScalarField apply_beta_operator_3d(const ScalarField& psi);
// Eigenvalues of the operator, ascending.
std::vector<double> beta_operator_3d_spectrum(const Grid& g);

struct PsiDecomposition {
  ScalarField psi;
  ScalarField psi_app;  // L(Omega) / (4 alpha) sin(2 beta)
  ScalarField r_part;   // R^alpha(Omega) sin(2 beta)
  ScalarField psi_err;  // psi - psi_app - r_part
  double ell2_residual = 0.0;
};

PsiDecomposition decompose_psi_2d(const ScalarField& omega, const ScalarField& psi, double alpha);

// max |a^2 psi2_ss + 4 a psi2_s + omega2| / max |omega2| over nodes at least
// three cells from either radial end; psi2, omega2 are the sin(2 beta) coefficients.
double ell2_residual(const ScalarField& omega, const ScalarField& psi, double alpha);

struct EllipticCheckOptions {
  double cap = 10.0;          // every ratio must stay below this
  double max_variation = 0.5;  // Hardy ratio: (max - min) / max over the ladder
  double max_growth = 0.5;     // other ratios: sup / value at the largest alpha - 1
  double psi_scale = 1.0;      // != 1 only for the corrupted-input control
};

// Per alpha: |d_bb Psi_err|, alpha |R d_Rb Psi_err|, alpha |d_bb Psi2|,
// alpha^2 |R^2 d_RR Psi2|, |R^alpha(Omega)| divided by |Omega| (L2 norms),
// plus the mode-2 content of Psi_err and the Poincare ratio of Psi_err.
VerificationReport verify_elliptic_estimates(const ScalarField& omega,
                                             const std::vector<double>& alphas,
                                             EllipticCheckOptions opt = {});

}  // namespace nilab
