// Norms of the weighted Sobolev scale and beta-mode projections.
//
// All integrals are over (R, beta) in [0, inf) x [0, 2 pi] with measure dR dbeta.
// On a quarter grid the full-circle integral of a product with parity class
// (a, b) is (1 + a)(1 + b) times the quarter integral; on a half-period grid it
// is twice the stored integral for pi-periodic products and zero otherwise.
#pragma once

#include <functional>
#include <vector>

#include "nilab/grid.hpp"

namespace nilab {

enum class NormKind { Linf, L2, CalH, CalW, WeightedL2_3d };

struct NormResult {
  NormKind kind;
  int k = 0;
  double value = 0.0;
};

NormResult linf_norm(const ScalarField& f);
double l2_norm(const ScalarField& f);
NormResult calHk_norm(const ScalarField& f, int k);
NormResult calWk_norm(const ScalarField& f, int k);
// calH^k norm of a sum of parts lying in pairwise distinct parity classes.
// Cross terms integrate to zero over the full circle, so each Sobolev term is
// the root of the summed squares.
NormResult calHk_norm_orthogonal(const std::vector<ScalarField>& parts, int k);
NormResult weighted_L2_3d(const ScalarField& f, double sigma, double alpha);

// L2 norm of a radial profile in dR (no beta factor).
double l2_norm_dR(const RadialProfile& f);

struct BetaWeight {
  std::function<double(double)> w;
  Parity parity;
  int half_period_sign = 1;  // +1 if w(beta + pi) = w(beta), -1 if it flips sign
};

// Full-circle multiplier of the stored beta integral for a product of class p.
double circle_factor(const Grid& g, Parity p, int half_period_sign = 1);

// R -> int_0^{2 pi} f(R, beta) w(beta) dbeta
RadialProfile beta_integral(const ScalarField& f, const BetaWeight& w);

// R -> (1/pi) int_0^{2 pi} f(R, beta) sin(n beta) dbeta
RadialProfile beta_project(const ScalarField& f, int n);

}  // namespace nilab
