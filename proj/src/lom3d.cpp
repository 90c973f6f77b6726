#include "nilab/lom3d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nilab/closure.hpp"
#include "nilab/integral_ops.hpp"

namespace nilab {

namespace {

constexpr double kExpGuard = 700.0;
constexpr double kL12 = 3.0 / (8.0 * std::numbers::pi);

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double exp_guarded(double x, const char* what) {
  if (x > kExpGuard)
    throw std::overflow_error(std::string(what) + ": exponent " + std::to_string(x) +
                              " exceeds the floating range guard 700");
  return std::exp(x);
}

double lerp_profile(const Grid& g, const RadialProfile& f, double R) {
  const auto& Rs = g.R;
  if (R <= Rs.front()) return f.v.front();
  if (R >= Rs.back()) return f.v.back();
  const auto it = std::upper_bound(Rs.begin(), Rs.end(), R);
  const std::size_t i = static_cast<std::size_t>(it - Rs.begin()) - 1;
  const double w = (R - Rs[i]) / (Rs[i + 1] - Rs[i]);
  return (1.0 - w) * f.v[i] + w * f.v[i + 1];
}

}  // namespace

double kernel3d_quadrature(double x) {
  // t = e^u; the integrand in u is smooth and decays exponentially at both
  // ends, so the trapezoid rule converges geometrically.
  const double lo = std::min(3.0 * x, 0.0) - 40.0, hi = std::max(3.0 * x, 0.0) + 40.0;
  const double h = 0.05;
  const std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / h));
  const double du = (hi - lo) / static_cast<double>(n);
  auto logf = [x](double u) {
    return 3.0 * u - 1.5 * softplus(2.0 * u - 6.0 * x) - 2.5 * softplus(2.0 * u);
  };
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= n; ++k) peak = std::max(peak, logf(lo + du * static_cast<double>(k)));
  double s = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 0.5 : 1.0;
    s += w * std::exp(logf(lo + du * static_cast<double>(k)) - peak);
  }
  return std::exp(std::log(16.0) - 3.5 * x + peak + std::log(s * du));
}

Kernel3d build_kernel(std::size_t resolution, double x_max) {
  if (resolution < 256) throw std::invalid_argument("build_kernel: resolution must be >= 256");
  if (!(x_max >= 100.0)) throw std::invalid_argument("build_kernel: x_max must be >= 100");
  Kernel3d k;
  k.x_max = x_max;
  k.dx = x_max / static_cast<double>(resolution);
  const std::size_t n = 2 * resolution + 1;
  k.logK.resize(n);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i)
    k.logK[i] = std::log(kernel3d_quadrature(-x_max + k.dx * static_cast<double>(i)));
  k.ratio_min = std::numeric_limits<double>::infinity();
  k.ratio_max = 0.0;
  for (std::size_t i = resolution; i < n; ++i) {
    const double x = -x_max + k.dx * static_cast<double>(i);
    const double r = std::exp(k.logK[i] + 3.5 * x);
    k.ratio_min = std::min(k.ratio_min, r);
    k.ratio_max = std::max(k.ratio_max, r);
  }
  return k;
}

double Kernel3d::operator()(double x) const {
  const std::size_t n = logK.size();
  const double u = (x + x_max) / dx;
  if (u <= 0.0) return std::exp(logK[0] + u * (logK[1] - logK[0]));
  if (u >= static_cast<double>(n - 1))
    return std::exp(logK[n - 1] + (u - static_cast<double>(n - 1)) * (logK[n - 1] - logK[n - 2]));
  std::size_t i = static_cast<std::size_t>(u);
  i = std::clamp<std::size_t>(i, 1, n - 3);
  const double t = u - static_cast<double>(i);
  const double y0 = logK[i - 1], y1 = logK[i], y2 = logK[i + 1], y3 = logK[i + 2];
  // Lagrange through nodes -1, 0, 1, 2
  const double v = -t * (t - 1.0) * (t - 2.0) / 6.0 * y0 + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * y1 -
                   (t + 1.0) * t * (t - 2.0) / 2.0 * y2 + (t + 1.0) * t * (t - 1.0) / 6.0 * y3;
  return std::exp(v);
}

double Kernel3d::sup() const { return std::exp(*std::max_element(logK.begin(), logK.end())); }

LomState3d LomTrajectory3d::state(std::size_t n) const {
  return LomState3d{times.at(n), J.at(n), g0, eta0, eta0_Rderiv, alpha, which};
}

LomTrajectory3d evolve_J(const Data3d& data, double alpha, const std::vector<double>& times,
                         Case3d which, std::shared_ptr<const Kernel3d> kernel) {
  if (which == Case3d::None) throw std::invalid_argument("evolve_J needs case (i) or (ii)");
  if (!kernel) throw std::invalid_argument("evolve_J needs a kernel table");
  for (double v : data.g0.v) {
    if (which == Case3d::I && v < 0.0) throw std::invalid_argument("case (i) needs g0 >= 0");
    if (which == Case3d::II && v > 0.0) throw std::invalid_argument("case (ii) needs g0 <= 0");
  }
  const Kernel3d* K = kernel.get();
  ClosureSpec spec{kL12, [K](double x) { return (*K)(x); }, K->sup()};
  ClosureRun run = evolve_closure(data.g0, alpha, times, spec);
  LomTrajectory3d traj;
  traj.grid = data.g0.grid;
  traj.alpha = alpha;
  traj.which = which;
  traj.g0 = data.g0;
  traj.eta0 = data.eta0;
  traj.eta0_Rderiv = data.eta0_Rderiv;
  traj.times = std::move(run.times);
  traj.J = std::move(run.X);
  traj.substeps = run.substeps;
  traj.kernel = std::move(kernel);
  return traj;
}

Lom3dFields eval_lom3d_fields(const LomState3d& s) {
  const auto& g = *s.J.grid;
  const std::size_t nB = g.nB();
  Lom3dFields f{ScalarField(s.J.grid, Parity::odd_even()), ScalarField(s.J.grid, Parity::none()),
                ScalarField(s.J.grid, Parity::none())};
  const bool case_i = s.which != Case3d::II;
  std::vector<double> cb(nB);
  for (std::size_t j = 0; j < nB; ++j) cb[j] = std::cos(g.beta[j]);
  const long nR = static_cast<long>(g.nR());
  // overflow guard outside the parallel region (no throwing across OpenMP)
  for (std::size_t i = 0; i < g.nR(); ++i) {
    if (s.eta0.v[i] == 0.0 && s.eta0_Rderiv.v[i] == 0.0) continue;
    exp_guarded(3.0 * s.J.v[i] / s.alpha, "eta_app");
    exp_guarded(-s.J.v[i] / s.alpha, "xi_app");
  }
#pragma omp parallel for schedule(static)
  for (long il = 0; il < nR; ++il) {
    const auto i = static_cast<std::size_t>(il);
    const double radial = s.eta0.v[i];
    const double angular = 0.5 * s.alpha * s.eta0_Rderiv.v[i];
    const double gi = s.g0.v[i];
    if (radial == 0.0 && angular == 0.0 && gi == 0.0) continue;
    const double x = s.J.v[i] / s.alpha;
    const double grow_eta = radial == 0.0 && angular == 0.0 ? 0.0 : std::exp(3.0 * x);
    const double grow_xi = radial == 0.0 && angular == 0.0 ? 0.0 : std::exp(-x);
    const double damp = std::exp(-0.5 * x);
    for (std::size_t j = 0; j < nB; ++j) {
      const bool interior = std::abs(cb[j]) > 1e-14;
      double s2 = 0.0, c0 = 0.0;
      if (interior && (gi != 0.0 || angular != 0.0)) {
        const double b0 = transported_beta(g.beta[j], 3.0 * x);
        s2 = std::sin(2.0 * b0);
        c0 = std::cos(b0);
      }
      f.g.at(i, j) = gi * damp * s2 * c0;
      const double carried = angular * s2;
      f.eta_app.at(i, j) = (case_i ? radial : carried) * grow_eta;
      f.xi_app.at(i, j) = (case_i ? carried : radial) * grow_xi;
    }
  }
  if (case_i) f.eta_app.parity = Parity::even_even();
  else f.xi_app.parity = Parity::even_even();
  return f;
}

void compute_lom3d_norms(LomTrajectory3d& traj) {
  traj.norms.clear();
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    const LomState3d s = traj.state(n);
    const Lom3dFields f = eval_lom3d_fields(s);
    traj.norms.push_back({s.t, s.J.max_abs(), f.g.max_abs(), f.eta_app.max_abs(), f.xi_app.max_abs()});
  }
}

SupportSeries evolve_support(const LomTrajectory3d& traj, double outer0, double inner0) {
  const Kernel3d* K = traj.kernel.get();
  ClosureSpec spec{kL12, [K](double x) { return (*K)(x); }, K->sup()};
  std::vector<RadialProfile> L;
  L.reserve(traj.times.size());
  for (const auto& J : traj.J) L.push_back(closure_rhs(traj.g0, traj.alpha, J, spec));
  SupportSeries out;
  out.times = traj.times;
  double so = std::log(outer0), si = std::log(inner0);
  out.outer.push_back(std::exp(so));
  out.inner.push_back(std::exp(si));
  const auto& g = *traj.grid;
  for (std::size_t n = 1; n < traj.times.size(); ++n) {
    const double dt = traj.times[n] - traj.times[n - 1];
    // Heun with the snapshot values of L12 at either end of the interval
    const double ko1 = 0.5 * std::abs(lerp_profile(g, L[n - 1], std::exp(so)));
    const double ki1 = -0.5 * std::abs(lerp_profile(g, L[n - 1], std::exp(si)));
    const double ko2 = 0.5 * std::abs(lerp_profile(g, L[n], std::exp(so + dt * ko1)));
    const double ki2 = -0.5 * std::abs(lerp_profile(g, L[n], std::exp(si + dt * ki1)));
    so += 0.5 * dt * (ko1 + ko2);
    si += 0.5 * dt * (ki1 + ki2);
    out.outer.push_back(std::exp(so));
    out.inner.push_back(std::exp(si));
  }
  return out;
}

VerificationReport check_growth_bounds_3d(const LomTrajectory3d& traj, const SizeConstants& consts,
                                          const Data3d& data, double floor_margin) {
  VerificationReport rep;
  const bool case_i = traj.which != Case3d::II;
  rep.experiment = case_i ? "lom3d_case_i" : "lom3d_case_ii";
  const double alpha = traj.alpha;
  const double c2 = 4.0;
  const Kernel3d& K = *traj.kernel;
  const RadialProfile G0 = tail_log_integral(traj.g0);

  double C0 = 0.0;
  for (std::size_t i = 0; i < G0.size(); ++i)
    if (traj.g0.v[i] != 0.0) C0 = std::max(C0, std::abs(G0.v[i]));
  const double gmax = G0.max_abs();

  std::vector<LomNorms3d> fresh;
  if (traj.norms.size() != traj.times.size()) {
    LomTrajectory3d copy = traj;
    compute_lom3d_norms(copy);
    fresh = std::move(copy.norms);
  }
  const auto& norms = fresh.empty() ? traj.norms : fresh;
  const double eta0_sup = norms[0].eta_linf, xi0_sup = norms[0].xi_linf, om0_sup = norms[0].g_linf;
  double eta_sup = eta0_sup, xi_sup = xi0_sup, om_sup = om0_sup;
  double floor_ratio = std::numeric_limits<double>::infinity();
  double lo_ratio = 1.0, up_ratio = 1.0, J_sign_viol = 0.0, g_ceiling = 0.0;
  const double a = kL12 * K.ratio_min, b = kL12 * K.ratio_max;
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    const double t = traj.times[n];
    const auto& J = traj.J[n];
    const LomNorms3d& f = norms[n];
    eta_sup = std::max(eta_sup, f.eta_linf);
    xi_sup = std::max(xi_sup, f.xi_linf);
    om_sup = std::max(om_sup, f.g_linf);
    if (case_i) {
      const double q = eta0_sup > 0.0 ? f.eta_linf / eta0_sup : 1.0;
      floor_ratio = std::min(floor_ratio, q / std::pow(1.0 + c2 * t * C0 / (2.0 * alpha), 1.0 / c2));
      if (traj.g0.max_abs() > 0.0) g_ceiling = std::max(g_ceiling, f.g_linf / traj.g0.max_abs());
      if (t > 0.0)
        for (std::size_t i = 0; i < J.size(); ++i) {
          if (!(G0.v[i] > 1e-12 * gmax)) continue;
          const double lo = (2.0 * alpha / 7.0) * std::log1p(3.5 * a * t * G0.v[i] / alpha);
          const double up = (2.0 * alpha / 7.0) * std::log1p(3.5 * b * t * G0.v[i] / alpha);
          lo_ratio = std::min(lo_ratio, J.v[i] / lo);
          up_ratio = std::max(up_ratio, J.v[i] / up);
        }
    } else {
      for (double v : J.v) J_sign_viol = std::max(J_sign_viol, v);
    }
  }

  const double L = std::log(std::abs(std::log(alpha)));
  const double headline = std::pow(1.0 + L / consts.C_k1, 1.0 / c2);
  auto floor_check = [&](const char* name, const char* anchor, const char* ineq, double sup, double init) {
    if (init > 0.0 && C0 > 0.0)
      rep.check_ge(name, anchor, ineq, sup / init, headline, -floor_margin);
    else
      rep.check_true(name, anchor, ineq, true, "vacuous: zero data");
  };
  if (case_i) {
    rep.check_ge("J_lower_bracket", "bound L12",
                 "min J / ((2a/7) log(1 + (7 k_min / 2a) t G0)) >= 1", lo_ratio, 1.0, 1e-3);
    rep.check_le("J_upper_bracket", "bound L12",
                 "max J / ((2a/7) log(1 + (7 k_max / 2a) t G0)) <= 1", up_ratio, 1.0, 1e-3);
    rep.check_le("g_linf_ceiling", "Omega_app does not blow up",
                 "max_t |g(t)|_inf / |g0|_inf <= 4 / (3 sqrt 3)", g_ceiling,
                 4.0 / (3.0 * std::sqrt(3.0)));
    rep.check_ge("eta_floor_per_time", "prop:expl3d",
                 "min_t |eta_app(t)|_inf / (|eta0|_inf (1 + c2 t C0/2a)^(1/c2)) >= 1",
                 C0 > 0.0 ? floor_ratio : 1.0, 1.0, 1e-3);
    floor_check("eta_inflation_floor", "etablow-up",
                "sup_t |eta_app|_inf / |eta0|_inf >= (1 + log|log a| / C_{N+1})^(1/c2)", eta_sup, eta0_sup);
  } else {
    rep.check_le("J_nonpositive", "prop:expl3d", "max J <= 0", J_sign_viol, 0.0);
    floor_check("omega_inflation_floor", "omegablow-up",
                "sup_t |Omega_app|_inf / |Omega_0|_inf >= (1 + log|log a| / C_{N+1})^(1/c2)", om_sup, om0_sup);
    floor_check("xi_inflation_floor", "xiblow-up",
                "sup_t |xi_app|_inf / |xi_0|_inf >= (1 + log|log a| / C_{N+1})^(1/c2)", xi_sup, xi0_sup);
  }

  const SupportSeries S = evolve_support(traj, data.S0_alpha, data.g_support_lo);
  const double eps = data.epsilon;
  const double outer_max = *std::max_element(S.outer.begin(), S.outer.end());
  const double inner_min = *std::min_element(S.inner.begin(), S.inner.end());
  rep.check_le("support_outer", "lem.local-supp", "max_t S(t)^a <= 1/7 + 2 eps", outer_max,
               1.0 / 7.0 + 2.0 * eps);
  rep.check_ge("support_inner", "lem.local-supp", "min_t S(t)^a >= 1/8", inner_min, 0.125);
  rep.check_true("support_in_T_prime_band", "T'", "1/10 <= S(t)^a <= 1/6",
                 inner_min >= 0.1 && outer_max <= 1.0 / 6.0);

  double disp = 0.0;
  for (std::size_t n = 0; n < S.times.size(); ++n)
    disp = std::max(disp, std::abs(std::log(S.outer[n] / S.outer[0])));
  rep.metrics["C0"] = C0;
  rep.metrics["C_N1"] = consts.C_k1;
  rep.metrics["epsilon"] = eps;
  rep.metrics["inflation_floor"] = headline;
  rep.metrics["eta_ratio_sup"] = eta0_sup > 0.0 ? eta_sup / eta0_sup : 1.0;
  rep.metrics["xi_ratio_sup"] = xi0_sup > 0.0 ? xi_sup / xi0_sup : 1.0;
  rep.metrics["omega_ratio_sup"] = om0_sup > 0.0 ? om_sup / om0_sup : 1.0;
  rep.metrics["S0_alpha"] = data.S0_alpha;
  rep.metrics["S_outer_max"] = outer_max;
  rep.metrics["S_inner_min"] = inner_min;
  rep.metrics["log_displacement_max"] = disp;
  rep.metrics["kernel_ratio_min"] = K.ratio_min;
  rep.metrics["kernel_ratio_max"] = K.ratio_max;
  rep.metrics["closure_substeps"] = traj.substeps;
  return rep;
}

namespace {

// g alone; rows outside supp g0 stay zero.
ScalarField g_only(const LomState3d& s) {
  const auto& g = *s.J.grid;
  ScalarField out(s.J.grid, Parity::odd_even());
  for (std::size_t i = 0; i < g.nR(); ++i) {
    if (s.g0.v[i] == 0.0) continue;
    const double x = s.J.v[i] / s.alpha, damp = std::exp(-0.5 * x);
    for (std::size_t j = 0; j < g.nB(); ++j) {
      if (!(std::abs(std::cos(g.beta[j])) > 1e-14)) continue;
      const double b0 = transported_beta(g.beta[j], 3.0 * x);
      out.at(i, j) = s.g0.v[i] * damp * std::sin(2.0 * b0) * std::cos(b0);
    }
  }
  return out;
}

}  // namespace

double closed_loop_residual_3d(const LomTrajectory3d& traj) {
  std::vector<RadialProfile> L;
  L.reserve(traj.times.size());
  for (std::size_t n = 0; n < traj.times.size(); ++n)
    L.push_back(op_L12(g_only(traj.state(n))));
  const auto Jq = cumulative_time_integral(traj.times, L);
  double scale = 0.0, err = 0.0;
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    scale = std::max(scale, traj.J[n].max_abs());
    for (std::size_t i = 0; i < Jq[n].size(); ++i)
      err = std::max(err, std::abs(Jq[n].v[i] - traj.J[n].v[i]));
  }
  return scale > 0.0 ? err / scale : err;
}

double mirror_defect(const LomTrajectory3d& case_i, const LomTrajectory3d& case_ii) {
  if (case_i.times != case_ii.times) throw std::invalid_argument("mirror_defect: time grids differ");
  LomTrajectory3d a = case_i, b = case_ii;
  if (a.norms.empty()) compute_lom3d_norms(a);
  if (b.norms.empty()) compute_lom3d_norms(b);
  const double a0 = a.norms[0].eta_linf, b0 = b.norms[0].xi_linf;
  if (a0 == 0.0 && b0 == 0.0) return 0.0;
  double d = 0.0;
  for (std::size_t n = 0; n < a.norms.size(); ++n) {
    const double x = a.norms[n].eta_linf / a0, y = b.norms[n].xi_linf / b0;
    d = std::max(d, std::abs(x - y) / std::max(std::abs(x), std::abs(y)));
  }
  return d;
}

}  // namespace nilab
