#include "nilab/integral_ops.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nilab/kernels.hpp"
#include "nilab/norms.hpp"

namespace nilab {

std::vector<double> log_nodes(const Grid& g) {
  std::vector<double> s(g.nR());
  for (std::size_t i = 0; i < g.nR(); ++i) s[i] = std::log(g.R[i]);
  return s;
}

void require_certified_support(const RadialProfile& f, const char* what) {
  const auto& g = *f.grid;
  const double tol = 1e-12 * f.max_abs();
  const double half = 0.5 * g.R_max();
  for (std::size_t i = 0; i < g.nR(); ++i) {
    if (g.R[i] >= half && std::abs(f.v[i]) > tol)
      throw std::domain_error(std::string(what) + ": support reaches R_max/2 (R = " +
                              std::to_string(g.R[i]) + "); tail truncation not certified");
  }
}

RadialProfile tail_log_integral(const RadialProfile& f) {
  require_certified_support(f, "tail_log_integral");
  const auto s = log_nodes(*f.grid);
  RadialProfile out(f.grid);
  kernels::exp_conv_right(f.v.data(), out.v.data(), s.data(), s.size(), 0.0);
  return out;
}

RadialProfile op_L(const ScalarField& omega) { return tail_log_integral(beta_project(omega, 2)); }

RadialProfile op_L12(const ScalarField& omega) {
  BetaWeight w{[](double b) { return std::sin(2.0 * b) * std::cos(b); }, Parity::odd_even(), -1};
  RadialProfile G = tail_log_integral(beta_integral(omega, w));
  for (double& x : G.v) x *= 3.0 / (8.0 * std::numbers::pi);
  return G;
}

RadialProfile op_Ralpha(const ScalarField& omega, double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.25)) throw std::invalid_argument("op_Ralpha: alpha out of range");
  const RadialProfile f2 = beta_project(omega, 2);
  const auto s = log_nodes(*omega.grid);
  // The largest exponent met is (4/alpha) * (log s - log R) <= 0 by construction.
  const double mu = 4.0 / alpha;
  RadialProfile out(omega.grid);
  kernels::exp_conv_left(f2.v.data(), out.v.data(), s.data(), s.size(), mu);
  for (double& x : out.v) {
    x /= 4.0 * alpha;
    if (!std::isfinite(x)) throw std::overflow_error("op_Ralpha: non-finite value");
  }
  return out;
}

}  // namespace nilab
