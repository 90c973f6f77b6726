#include "nilab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nilab/kernels.hpp"

namespace nilab {

namespace {

void check_common(double alpha, double R_max, std::size_t nR, std::size_t nB) {
  if (!(alpha > 0.0 && alpha <= 0.25))
    throw std::invalid_argument("alpha must lie in (0, 1/4], got " + std::to_string(alpha));
  if (!(R_max > 1.0)) throw std::invalid_argument("R_max must exceed 1");
  if (nR < 8 || nB < 8) throw std::invalid_argument("nR and nbeta must be at least 8");
}

void fill_radial(Grid& g, double R_min, double R_max, std::size_t nR) {
  g.R.resize(nR);
  if (g.spacing == Spacing::UniformR) {
    g.hR = (R_max - R_min) / static_cast<double>(nR - 1);
    for (std::size_t i = 0; i < nR; ++i) g.R[i] = R_min + g.hR * static_cast<double>(i);
  } else {
    const double s0 = std::log(R_min), s1 = std::log(R_max);
    g.hR = (s1 - s0) / static_cast<double>(nR - 1);
    for (std::size_t i = 0; i < nR; ++i) g.R[i] = std::exp(s0 + g.hR * static_cast<double>(i));
  }
  g.R.front() = R_min;
  g.R.back() = R_max;
}

kernels::BetaBoundary beta_bc(const Grid& g, Parity p) {
  if (g.domain == BetaDomain::HalfPeriod) return {kernels::BetaBC::Periodic, 0, 0};
  if (p.known()) return {kernels::BetaBC::Parity, p.at_zero, p.at_half_pi};
  return {kernels::BetaBC::OneSided, 0, 0};
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (a.grid != b.grid && (a.grid->nR() != b.grid->nR() || a.grid->nB() != b.grid->nB()))
    throw std::invalid_argument("fields live on different grids");
}

}  // namespace

GridPtr build_grid(double alpha, double R_max, std::size_t nR, std::size_t nB, Spacing spacing,
                   double R_min) {
  check_common(alpha, R_max, nR, nB);
  if (R_min <= 0.0) R_min = R_max / static_cast<double>(nR);
  if (R_min >= R_max) throw std::invalid_argument("R_min must be below R_max");
  auto g = std::make_shared<Grid>();
  g->alpha = alpha;
  g->spacing = spacing;
  g->domain = BetaDomain::Quarter;
  fill_radial(*g, R_min, R_max, nR);
  g->beta.resize(nB);
  g->hbeta = 0.5 * std::numbers::pi / static_cast<double>(nB - 1);
  for (std::size_t j = 0; j < nB; ++j) g->beta[j] = g->hbeta * static_cast<double>(j);
  g->beta.back() = 0.5 * std::numbers::pi;
  return g;
}

GridPtr build_half_period_grid(double alpha, double R_min, double R_max, std::size_t nR,
                               std::size_t nB) {
  check_common(alpha, R_max, nR, nB);
  if (nB % 2 != 0) throw std::invalid_argument("half-period grid needs an even nbeta");
  if (!(R_min > 0.0 && R_min < R_max)) throw std::invalid_argument("need 0 < R_min < R_max");
  auto g = std::make_shared<Grid>();
  g->alpha = alpha;
  g->spacing = Spacing::LogR;
  g->domain = BetaDomain::HalfPeriod;
  fill_radial(*g, R_min, R_max, nR);
  g->beta.resize(nB);
  g->hbeta = std::numbers::pi / static_cast<double>(nB);
  for (std::size_t j = 0; j < nB; ++j) g->beta[j] = g->hbeta * static_cast<double>(j);
  return g;
}

RadialProfile::RadialProfile(GridPtr g) : grid(std::move(g)), v(grid->nR(), 0.0) {}

RadialProfile::RadialProfile(GridPtr g, std::vector<double> values)
    : grid(std::move(g)), v(std::move(values)) {
  if (v.size() != grid->nR()) throw std::invalid_argument("profile size does not match grid");
}

RadialProfile RadialProfile::from_function(GridPtr g, const std::function<double(double)>& f) {
  RadialProfile p(g);
  for (std::size_t i = 0; i < g->nR(); ++i) p.v[i] = f(g->R[i]);
  return p;
}

double RadialProfile::max_abs() const {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

ScalarField::ScalarField(GridPtr g, Parity p) : grid(std::move(g)), v(grid->size(), 0.0), parity(p) {}

ScalarField::ScalarField(GridPtr g, std::vector<double> values, Parity p)
    : grid(std::move(g)), v(std::move(values)), parity(p) {
  if (v.size() != grid->size()) throw std::invalid_argument("field size does not match grid");
}

ScalarField ScalarField::from_function(GridPtr g,
                                       const std::function<double(double, double)>& f, Parity p) {
  ScalarField out(g, p);
  const std::size_t nB = g->nB();
  for (std::size_t i = 0; i < g->nR(); ++i)
    for (std::size_t j = 0; j < nB; ++j) out.v[i * nB + j] = f(g->R[i], g->beta[j]);
  return out;
}

ScalarField ScalarField::separable(const RadialProfile& f, const std::function<double(double)>& w,
                                   Parity p) {
  const auto& g = f.grid;
  ScalarField out(g, p);
  const std::size_t nB = g->nB();
  std::vector<double> wb(nB);
  for (std::size_t j = 0; j < nB; ++j) wb[j] = w(g->beta[j]);
  for (std::size_t i = 0; i < g->nR(); ++i)
    for (std::size_t j = 0; j < nB; ++j) out.v[i * nB + j] = f.v[i] * wb[j];
  return out;
}

ScalarField ScalarField::radial(const RadialProfile& f) {
  return separable(f, [](double) { return 1.0; }, Parity::even_even());
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(*this, o);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += o.v[k];
  if (!(parity == o.parity)) parity = Parity::none();
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(*this, o);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] -= o.v[k];
  if (!(parity == o.parity)) parity = Parity::none();
  return *this;
}

ScalarField& ScalarField::operator*=(double c) {
  for (double& x : v) x *= c;
  return *this;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double c, ScalarField a) { return a *= c; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  ScalarField out(a.grid, a.parity * b.parity);
  for (std::size_t k = 0; k < a.v.size(); ++k) out.v[k] = a.v[k] * b.v[k];
  return out;
}

ScalarField PrefactoredField::materialize() const {
  ScalarField out = base;
  if (power == 0) return out;
  const auto& g = *base.grid;
  const std::size_t nB = g.nB();
  for (std::size_t i = 0; i < g.nR(); ++i) {
    const double factor = std::exp(static_cast<double>(power) * std::log(g.R[i]) / g.alpha);
    for (std::size_t j = 0; j < nB; ++j) {
      double& x = out.v[i * nB + j];
      if (x == 0.0) continue;
      x *= factor;
      if (!std::isfinite(x))
        throw std::overflow_error("R^(power/alpha) prefactor leaves the double range");
    }
  }
  return out;
}

std::pair<double, double> to_scaled(double x, double y, double alpha) {
  if (x == 0.0 && y == 0.0) throw std::invalid_argument("to_scaled: origin is singular");
  const double r2 = x * x + y * y;
  return {std::pow(r2, 0.5 * alpha), std::atan2(x, y)};
}

std::pair<double, double> from_scaled(double R, double beta, double alpha) {
  if (!(R > 0.0)) throw std::invalid_argument("from_scaled: R must be positive");
  const double r = std::pow(R, 1.0 / alpha);
  return {r * std::sin(beta), r * std::cos(beta)};
}

ScalarField d_dR(const ScalarField& f) {
  const auto& g = *f.grid;
  ScalarField out(f.grid, f.parity);
  kernels::parallel::radial_diff(f.v.data(), out.v.data(), g.nR(), g.nB(), g.hR);
  if (g.spacing == Spacing::LogR) {
    const std::size_t nB = g.nB();
    for (std::size_t i = 0; i < g.nR(); ++i) {
      const double inv = 1.0 / g.R[i];
      for (std::size_t j = 0; j < nB; ++j) out.v[i * nB + j] *= inv;
    }
  }
  return out;
}

ScalarField R_dR(const ScalarField& f) {
  const auto& g = *f.grid;
  ScalarField out(f.grid, f.parity);
  kernels::parallel::radial_diff(f.v.data(), out.v.data(), g.nR(), g.nB(), g.hR);
  if (g.spacing == Spacing::UniformR) {
    const std::size_t nB = g.nB();
    for (std::size_t i = 0; i < g.nR(); ++i)
      for (std::size_t j = 0; j < nB; ++j) out.v[i * nB + j] *= g.R[i];
  }
  return out;
}

ScalarField d_dbeta(const ScalarField& f) {
  const auto& g = *f.grid;
  ScalarField out(f.grid, f.parity.flipped());
  kernels::parallel::beta_diff(f.v.data(), out.v.data(), g.nR(), g.nB(), g.hbeta,
                               beta_bc(g, f.parity));
  return out;
}

RadialProfile d_dR(const RadialProfile& f) {
  const auto& g = *f.grid;
  RadialProfile out(f.grid);
  kernels::serial::radial_diff(f.v.data(), out.v.data(), g.nR(), 1, g.hR);
  if (g.spacing == Spacing::LogR)
    for (std::size_t i = 0; i < g.nR(); ++i) out.v[i] /= g.R[i];
  return out;
}

RadialProfile R_dR(const RadialProfile& f) {
  const auto& g = *f.grid;
  RadialProfile out(f.grid);
  kernels::serial::radial_diff(f.v.data(), out.v.data(), g.nR(), 1, g.hR);
  if (g.spacing == Spacing::UniformR)
    for (std::size_t i = 0; i < g.nR(); ++i) out.v[i] *= g.R[i];
  return out;
}

PrefactoredField cartesian_derivative(const PrefactoredField& f, Axis which) {
  const auto& g = *f.base.grid;
  const ScalarField Rb = R_dR(f.base);
  const ScalarField db = d_dbeta(f.base);
  const double m = static_cast<double>(f.power);
  const Parity p = f.base.parity;
  PrefactoredField out{ScalarField(f.base.grid, which == Axis::X
                                                    ? Parity{p.at_zero, -p.at_half_pi}
                                                    : Parity{-p.at_zero, p.at_half_pi}),
                       f.power - 1};
  const std::size_t nB = g.nB();
  std::vector<double> cb(nB), sb(nB);
  for (std::size_t j = 0; j < nB; ++j) {
    cb[j] = std::cos(g.beta[j]);
    sb[j] = std::sin(g.beta[j]);
  }
  // Exact zeros of cos at pi/2 keep boundary columns clean.
  if (g.domain == BetaDomain::Quarter) cb[nB - 1] = 0.0;
  for (std::size_t i = 0; i < g.nR(); ++i) {
    for (std::size_t j = 0; j < nB; ++j) {
      const std::size_t k = i * nB + j;
      const double radial = m * f.base.v[k] + g.alpha * Rb.v[k];
      out.base.v[k] = which == Axis::X ? cb[j] * radial - sb[j] * db.v[k]
                                       : sb[j] * radial + cb[j] * db.v[k];
    }
  }
  return out;
}

PrefactoredField cartesian_derivative(const ScalarField& f, Axis which) {
  return cartesian_derivative(PrefactoredField{f, 0}, which);
}

std::vector<double> radial_weights(const Grid& g) {
  const std::size_t n = g.nR();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = g.R[i + 1] - g.R[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

std::vector<double> beta_weights(const Grid& g) {
  const std::size_t n = g.nB();
  std::vector<double> w(n, g.hbeta);
  if (g.domain == BetaDomain::Quarter) {
    w.front() *= 0.5;
    w.back() *= 0.5;
  }
  return w;
}

}  // namespace nilab
