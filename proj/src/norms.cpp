#include "nilab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nilab {

namespace {

constexpr int kMaxOrder = 6;

// Sum over nodes of f^2 with quadrature weights, full circle.
double l2_squared(const ScalarField& f, int R_power) {
  const auto& g = *f.grid;
  const auto wr = radial_weights(g);
  const auto wb = beta_weights(g);
  const std::size_t nB = g.nB();
  double total = 0.0;
  for (std::size_t i = 0; i < g.nR(); ++i) {
    const double Rp = R_power == 0 ? 1.0 : std::pow(g.R[i], R_power);
    double row = 0.0;
    for (std::size_t j = 0; j < nB; ++j) {
      const double x = f.v[i * nB + j];
      row += wb[j] * x * x;
    }
    total += wr[i] * Rp * Rp * row;
  }
  return circle_factor(g, Parity::even_even()) * total;
}

double sup_weighted(const ScalarField& f, int R_power) {
  const auto& g = *f.grid;
  const std::size_t nB = g.nB();
  double m = 0.0;
  for (std::size_t i = 0; i < g.nR(); ++i) {
    const double Rp = R_power == 0 ? 1.0 : std::pow(g.R[i], R_power);
    for (std::size_t j = 0; j < nB; ++j) m = std::max(m, Rp * std::abs(f.v[i * nB + j]));
  }
  return m;
}

// Sum_{m <= k} Sum_{i <= m} (N(d_R^i d_b^{m-i} f) + N(R^i d_R^i d_b^{m-i} f)).
template <class NormFn>
double sobolev_sum(const ScalarField& f, int k, NormFn norm) {
  if (k < 0 || k > kMaxOrder)
    throw std::invalid_argument("Sobolev order must lie in [0, 6], got " + std::to_string(k));
  double total = 0.0;
  ScalarField beta_der = f;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) beta_der = d_dbeta(beta_der);
    ScalarField A = beta_der;
    for (int i = 0; i + j <= k; ++i) {
      if (i > 0) A = d_dR(A);
      total += norm(A, 0) + norm(A, i);
    }
  }
  return total;
}

}  // namespace

double circle_factor(const Grid& g, Parity p, int half_period_sign) {
  if (g.domain == BetaDomain::HalfPeriod) return half_period_sign > 0 ? 2.0 : 0.0;
  if (!p.known()) return 4.0;
  return static_cast<double>((1 + p.at_zero) * (1 + p.at_half_pi));
}

NormResult linf_norm(const ScalarField& f) { return {NormKind::Linf, 0, f.max_abs()}; }

double l2_norm(const ScalarField& f) { return std::sqrt(l2_squared(f, 0)); }

double l2_norm_dR(const RadialProfile& f) {
  const auto w = radial_weights(*f.grid);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f.v[i] * f.v[i];
  return std::sqrt(s);
}

NormResult calHk_norm(const ScalarField& f, int k) {
  const double v = sobolev_sum(f, k, [](const ScalarField& a, int p) {
    return std::sqrt(l2_squared(a, p));
  });
  return {NormKind::CalH, k, v};
}

NormResult calHk_norm_orthogonal(const std::vector<ScalarField>& parts, int k) {
  if (parts.empty()) return {NormKind::CalH, k, 0.0};
  for (std::size_t a = 0; a < parts.size(); ++a) {
    if (parts[a].grid != parts[0].grid)
      throw std::invalid_argument("calHk_norm_orthogonal: parts live on different grids");
    if (parts.size() > 1 && parts[a].grid->domain == BetaDomain::Quarter && !parts[a].parity.known())
      throw std::invalid_argument("calHk_norm_orthogonal: parts need known parity");
    for (std::size_t b = 0; b < a; ++b)
      if (parts[a].parity == parts[b].parity)
        throw std::invalid_argument("calHk_norm_orthogonal: parts share a parity class");
  }
  if (k < 0 || k > kMaxOrder)
    throw std::invalid_argument("Sobolev order must lie in [0, 6], got " + std::to_string(k));
  double total = 0.0;
  std::vector<ScalarField> bder = parts;
  for (int j = 0; j <= k; ++j) {
    if (j > 0)
      for (auto& f : bder) f = d_dbeta(f);
    std::vector<ScalarField> A = bder;
    for (int i = 0; i + j <= k; ++i) {
      double s0 = 0.0, si = 0.0;
      for (auto& f : A) {
        if (i > 0) f = d_dR(f);
        s0 += l2_squared(f, 0);
        si += l2_squared(f, i);
      }
      total += std::sqrt(s0) + std::sqrt(si);
    }
  }
  return {NormKind::CalH, k, total};
}

NormResult calWk_norm(const ScalarField& f, int k) {
  const double v = sobolev_sum(f, k, [](const ScalarField& a, int p) { return sup_weighted(a, p); });
  return {NormKind::CalW, k, v};
}

NormResult weighted_L2_3d(const ScalarField& f, double sigma, double /*alpha*/) {
  const auto& g = *f.grid;
  const auto wr = radial_weights(g);
  const auto wb = beta_weights(g);
  const std::size_t nB = g.nB();
  double total = 0.0;
  for (std::size_t i = 0; i < g.nR(); ++i) {
    const double R = g.R[i];
    const double radial = std::pow((1.0 + R) / R, 4);
    for (std::size_t j = 0; j < nB; ++j) {
      const double x = f.v[i * nB + j];
      if (x == 0.0) continue;
      const double s2 = std::abs(std::sin(2.0 * g.beta[j]));
      const double integrand = x * x * radial * std::pow(s2, -sigma);
      if (!(integrand <= 1e12))
        throw std::domain_error("weighted_L2_3d: nonintegrable weight singularity at node (" +
                                std::to_string(i) + ", " + std::to_string(j) + ")");
      total += wr[i] * wb[j] * integrand;
    }
  }
  return {NormKind::WeightedL2_3d, 0, std::sqrt(circle_factor(g, Parity::even_even()) * total)};
}

RadialProfile beta_integral(const ScalarField& f, const BetaWeight& w) {
  const auto& g = *f.grid;
  const auto wb = beta_weights(g);
  const std::size_t nB = g.nB();
  std::vector<double> wv(nB);
  for (std::size_t j = 0; j < nB; ++j) wv[j] = wb[j] * w.w(g.beta[j]);
  const double factor = circle_factor(g, f.parity * w.parity, w.half_period_sign);
  RadialProfile out(f.grid);
  if (factor == 0.0) return out;
  for (std::size_t i = 0; i < g.nR(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < nB; ++j) s += wv[j] * f.v[i * nB + j];
    out.v[i] = factor * s;
  }
  return out;
}

RadialProfile beta_project(const ScalarField& f, int n) {
  if (n < 1) throw std::invalid_argument("beta_project: mode index must be >= 1");
  const double dn = static_cast<double>(n);
  BetaWeight w{[dn](double b) { return std::sin(dn * b); },
               Parity{-1, n % 2 == 1 ? 1 : -1}, n % 2 == 0 ? 1 : -1};
  RadialProfile out = beta_integral(f, w);
  for (double& x : out.v) x /= std::numbers::pi;
  return out;
}

}  // namespace nilab
