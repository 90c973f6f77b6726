#include "nilab/init_data.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nilab {

namespace {

// e^{-1/x} for x > 0, else 0
double smooth_zero(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// 0 for u <= 0, 1 for u >= 1
double smooth_step(double u) {
  const double a = smooth_zero(u), b = smooth_zero(1.0 - u);
  return a / (a + b);
}

}  // namespace

void validate(const DataParams& p) {
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(p.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(p.alpha <= p.delta * p.delta)) throw std::invalid_argument("alpha <= delta^2 violated");
  if (p.k < 3) throw std::invalid_argument("regularity index k must be >= 3");
}

double loglog(double alpha) {
  const double L = std::abs(std::log(std::abs(std::log(alpha))));
  if (!(L > 1.0))
    throw std::domain_error("|log|log alpha|| = " + std::to_string(L) +
                            " must exceed 1 (alpha < exp(-e))");
  return L;
}

SizeConstants size_constants(const DataParams& p) {
  validate(p);
  const double L = loglog(p.alpha);
  return {p.delta * std::pow(L, 0.25), p.delta * std::sqrt(L)};
}

double bump(double R, double center, double width) {
  const double u = (R - center) / width;
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double bump_derivative(double R, double center, double width) {
  const double u = (R - center) / width;
  if (std::abs(u) >= 1.0) return 0.0;
  const double q = 1.0 - u * u;
  return bump(R, center, width) * (-2.0 * u / (q * q)) / width;
}

double plateau(double x, double a0, double a, double b, double b0) {
  if (x <= a0 || x >= b0) return 0.0;
  return smooth_step((x - a0) / (a - a0)) * smooth_step((b0 - x) / (b0 - b));
}

RadialProfile make_bump(GridPtr g, double center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("bump width must be positive");
  return RadialProfile::from_function(g, [=](double R) { return bump(R, center, width); });
}

RadialProfile make_eta0_2d(GridPtr g, const DataParams& p) {
  validate(p);
  const double L = loglog(p.alpha);
  const double amp = std::pow(L, (1.0 - p.k) / 4.0), sc = std::pow(L, 0.25);
  // phi lives on [1, 3]: center 2, width 1
  return RadialProfile::from_function(g, [=](double R) {
    return p.delta * (bump(R, 2.0, 1.0) + amp * bump((R - 1.0) * sc, 2.0, 1.0));
  });
}

RadialProfile make_eta0_2d_Rderiv(GridPtr g, const DataParams& p) {
  validate(p);
  const double L = loglog(p.alpha);
  const double amp = std::pow(L, (1.0 - p.k) / 4.0), sc = std::pow(L, 0.25);
  return RadialProfile::from_function(g, [=](double R) {
    return p.delta * R *
           (bump_derivative(R, 2.0, 1.0) + amp * sc * bump_derivative((R - 1.0) * sc, 2.0, 1.0));
  });
}

RadialProfile make_g0_2d(GridPtr g, const DataParams& p) {
  validate(p);
  return RadialProfile::from_function(g, [=](double R) { return p.delta * bump(R, 2.0, 1.0); });
}

Data3d make_data_3d(GridPtr g, const DataParams& p) {
  validate(p);
  if (p.case3d == Case3d::None) throw std::invalid_argument("make_data_3d needs case (i) or (ii)");
  if (p.k < 4) throw std::invalid_argument("3d data needs k >= 4");
  const double L = loglog(p.alpha);
  const double eps = std::pow(L, -0.25);
  const double amp = std::pow(L, (1.0 - p.k) / 4.0), sc = std::pow(L, 0.25);
  const double sign = p.case3d == Case3d::I ? 1.0 : -1.0;
  Data3d d;
  d.epsilon = eps;
  d.eta0 = RadialProfile::from_function(
      g, [=](double R) { return p.delta * amp * bump(sc * (R - 0.125), 2.0, 1.0); });
  d.eta0_Rderiv = RadialProfile::from_function(g, [=](double R) {
    return p.delta * amp * R * sc * bump_derivative(sc * (R - 0.125), 2.0, 1.0);
  });
  // phi~ = 1 on [1/180, 1/90], supported in [0, 1/60]
  d.g0 = RadialProfile::from_function(g, [=](double R) {
    return sign * p.delta * plateau(R - 0.125 - eps, 0.0, 1.0 / 180.0, 1.0 / 90.0, 1.0 / 60.0);
  });
  d.eta_support_lo = 0.125 + eps;
  d.eta_support_hi = 0.125 + 3.0 * eps;
  d.g_support_lo = 0.125 + eps;
  d.g_support_hi = 0.125 + eps + 1.0 / 60.0;
  d.S0_alpha = std::max(d.eta_support_hi, d.g_support_hi);
  d.S0_bracket_lo = 0.125 + eps;
  d.S0_bracket_hi = 1.0 / 7.0 + eps;
  return d;
}

}  // namespace nilab
