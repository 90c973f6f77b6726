#include "nilab/closure.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "nilab/integral_ops.hpp"
#include "nilab/kernels.hpp"

namespace nilab {

RadialProfile closure_rhs(const RadialProfile& g0, double alpha, const RadialProfile& X,
                          const ClosureSpec& spec) {
  const std::size_t n = g0.size();
  std::vector<double> integrand(n), out(n);
  for (std::size_t i = 0; i < n; ++i)
    integrand[i] = g0.v[i] == 0.0 ? 0.0 : g0.v[i] * spec.rate(X.v[i] / alpha);
  const auto s = log_nodes(*g0.grid);
  kernels::exp_conv_right(integrand.data(), out.data(), s.data(), n, 0.0);
  for (double& x : out) x *= spec.coef;
  return RadialProfile(g0.grid, std::move(out));
}

ClosureRun evolve_closure(const RadialProfile& g0, double alpha, const std::vector<double>& times,
                          const ClosureSpec& spec) {
  if (times.empty() || times.front() != 0.0)
    throw std::invalid_argument("closure times must start at 0");
  for (std::size_t n = 1; n < times.size(); ++n)
    if (!(times[n] > times[n - 1])) throw std::invalid_argument("closure times must increase");
  require_certified_support(g0, "closure");

  const RadialProfile G0 = tail_log_integral(g0);
  const double G0max = G0.max_abs();
  ClosureRun run;
  run.times = times;
  run.dt_max = G0max > 0.0 ? alpha / (10.0 * spec.coef * spec.rate_max * G0max)
                           : std::numeric_limits<double>::infinity();
  RadialProfile X(g0.grid);
  run.X.push_back(X);
  if (G0max == 0.0) {
    for (std::size_t n = 1; n < times.size(); ++n) run.X.push_back(X);
    return run;
  }

  const std::size_t nR = g0.size();
  auto axpy = [&](const RadialProfile& a, double c, const RadialProfile& b) {
    RadialProfile r(a.grid);
    for (std::size_t i = 0; i < nR; ++i) r.v[i] = a.v[i] + c * b.v[i];
    return r;
  };
  for (std::size_t n = 1; n < times.size(); ++n) {
    const double span = times[n] - times[n - 1];
    const double m = std::ceil(span / run.dt_max);
    if (m > static_cast<double>(spec.max_substeps))
      throw std::runtime_error("closure step bound alpha/(10 |G0|) = " + std::to_string(run.dt_max) +
                               " needs " + std::to_string(m) + " substeps on interval " +
                               std::to_string(n) + "; limit " + std::to_string(spec.max_substeps));
    const std::size_t steps = static_cast<std::size_t>(m);
    const double dt = span / m;
    for (std::size_t q = 0; q < steps; ++q) {
      const RadialProfile k1 = closure_rhs(g0, alpha, X, spec);
      const RadialProfile k2 = closure_rhs(g0, alpha, axpy(X, 0.5 * dt, k1), spec);
      const RadialProfile k3 = closure_rhs(g0, alpha, axpy(X, 0.5 * dt, k2), spec);
      const RadialProfile k4 = closure_rhs(g0, alpha, axpy(X, dt, k3), spec);
      for (std::size_t i = 0; i < nR; ++i)
        X.v[i] += dt / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
    }
    run.substeps += steps;
    run.X.push_back(X);
  }
  return run;
}

std::vector<RadialProfile> cumulative_time_integral(const std::vector<double>& times,
                                                    const std::vector<RadialProfile>& f) {
  std::vector<RadialProfile> out;
  if (f.empty()) return out;
  RadialProfile acc(f[0].grid);
  out.push_back(acc);
  for (std::size_t n = 1; n < f.size(); ++n) {
    const double h = times[n] - times[n - 1];
    for (std::size_t i = 0; i < acc.size(); ++i) acc.v[i] += 0.5 * h * (f[n - 1].v[i] + f[n].v[i]);
    out.push_back(acc);
  }
  return out;
}

double transported_beta(double beta, double x) {
  const double s = std::sin(beta), c = std::cos(beta);
  // tan(beta0) = tan(beta) e^{-x}; scale both atan2 arguments to stay finite
  return x >= 0.0 ? std::atan2(s * std::exp(-x), c) : std::atan2(s, c * std::exp(x));
}

double transported_sin2beta(double beta, double x) {
  if (std::abs(std::cos(beta)) < 1e-14) return 0.0;
  return std::sin(2.0 * transported_beta(beta, x));
}

}  // namespace nilab
