#include "nilab/lom2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "nilab/closure.hpp"
#include "nilab/integral_ops.hpp"
#include "nilab/norms.hpp"

namespace nilab {

namespace {

constexpr double kExpGuard = 700.0;

double exp_guarded(double x, const char* what) {
  if (x > kExpGuard)
    throw std::overflow_error(std::string(what) + ": exponent " + std::to_string(x) +
                              " exceeds the floating range guard 700");
  return std::exp(x);
}

// Mask of grid points where G0 is meaningfully positive.
std::vector<bool> positive_mask(const RadialProfile& G0) {
  const double m = G0.max_abs();
  std::vector<bool> mask(G0.size(), false);
  for (std::size_t i = 0; i < G0.size(); ++i) mask[i] = m > 0.0 && G0.v[i] > 1e-12 * m;
  return mask;
}

// sup and inf of G0 over supp g0
std::pair<double, double> G0_extrema_on_support(const RadialProfile& g0, const RadialProfile& G0) {
  double sup = 0.0, inf = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < g0.size(); ++i) {
    if (g0.v[i] == 0.0) continue;
    any = true;
    sup = std::max(sup, G0.v[i]);
    inf = std::min(inf, G0.v[i]);
  }
  if (!any) return {0.0, 0.0};
  return {sup, inf};
}

double bracket_lower(double alpha, double t, double G0, double c2) {
  return (2.0 * alpha / c2) * std::log1p((c2 / (2.0 * alpha)) * t * G0);
}

double bracket_upper(double alpha, double t, double G0, double c1) {
  return (2.0 * alpha / c1) * std::log1p((c1 / (2.0 * alpha)) * t * G0);
}

// int_0^{t_n} exp(I / (2 alpha)) dtau for every snapshot
std::vector<RadialProfile> eta_time_integrals(const LomTrajectory2d& traj) {
  std::vector<RadialProfile> e;
  e.reserve(traj.I.size());
  for (const auto& I : traj.I) {
    RadialProfile p(traj.grid);
    for (std::size_t i = 0; i < I.size(); ++i)
      p.v[i] = exp_guarded(I.v[i] / (2.0 * traj.alpha), "eta_app");
    e.push_back(std::move(p));
  }
  return cumulative_time_integral(traj.times, e);
}

void require_snapshots(const LomTrajectory2d& traj) {
  if (traj.times.size() < 33)
    throw std::invalid_argument("Omega_app needs at least 32 time intervals, got " +
                                std::to_string(traj.times.size() - 1));
}

ScalarField g_part(const RadialProfile& g0, const RadialProfile& I, double alpha) {
  const auto& g = *g0.grid;
  ScalarField out(g0.grid, Parity::odd_odd());
  for (std::size_t i = 0; i < g.nR(); ++i) {
    if (g0.v[i] == 0.0) continue;
    const double x = I.v[i] / alpha;
    for (std::size_t j = 0; j < g.nB(); ++j)
      out.at(i, j) = g0.v[i] * transported_sin2beta(g.beta[j], x);
  }
  return out;
}

}  // namespace

double lom_h(double x) {
  const double e = std::exp(-std::abs(x));
  return e / ((1.0 + e) * (1.0 + e));
}

LomState2d LomTrajectory2d::state(std::size_t n) const {
  return LomState2d{times.at(n), I.at(n), g0, eta0, alpha, eta0_Rderiv};
}

std::vector<double> uniform_times(double t_end, std::size_t intervals) {
  if (!(t_end > 0.0) || intervals == 0) throw std::invalid_argument("uniform_times: bad span");
  std::vector<double> t(intervals + 1);
  for (std::size_t n = 0; n <= intervals; ++n)
    t[n] = t_end * static_cast<double>(n) / static_cast<double>(intervals);
  t.back() = t_end;
  return t;
}

LomTrajectory2d evolve_I(const RadialProfile& g0, double alpha, const std::vector<double>& times) {
  ClosureSpec spec{4.0, lom_h, 0.25};
  ClosureRun run = evolve_closure(g0, alpha, times, spec);
  LomTrajectory2d traj;
  traj.grid = g0.grid;
  traj.alpha = alpha;
  traj.g0 = g0;
  traj.eta0 = RadialProfile(g0.grid);
  traj.times = std::move(run.times);
  traj.I = std::move(run.X);
  traj.substeps = run.substeps;
  return traj;
}

ScalarField eval_g(const LomState2d& s) { return g_part(s.g0, s.I, s.alpha); }

ScalarField eval_eta_app(const LomState2d& s) {
  RadialProfile p(s.eta0.grid);
  for (std::size_t i = 0; i < p.size(); ++i)
    p.v[i] = s.eta0.v[i] == 0.0 ? 0.0 : s.eta0.v[i] * exp_guarded(s.I.v[i] / (2.0 * s.alpha), "eta_app");
  return ScalarField::radial(p);
}

ScalarField eval_xi_app(const LomState2d& s, XiMode mode) {
  const auto& g = *s.I.grid;
  RadialProfile base(s.I.grid);
  for (std::size_t i = 0; i < base.size(); ++i) base.v[i] = -std::expm1(-s.I.v[i] / (2.0 * s.alpha));
  ScalarField out = ScalarField::radial(base);
  if (mode == XiMode::ExplicitZeroData) return out;
  if (!s.eta0_Rderiv) throw std::invalid_argument("transported xi_app needs R d_R eta0");
  // xi0 = (alpha/2) R d_R eta0 sin(2 beta) is carried along the beta characteristics
  // and damped by exp(-I / (2 alpha)).
  const auto& d = *s.eta0_Rderiv;
  ScalarField carried(s.I.grid, Parity::odd_odd());
  for (std::size_t i = 0; i < g.nR(); ++i) {
    if (d.v[i] == 0.0) continue;
    const double x = s.I.v[i] / s.alpha;
    const double amp = 0.5 * s.alpha * d.v[i] * std::exp(-0.5 * x);
    for (std::size_t j = 0; j < g.nB(); ++j)
      carried.at(i, j) = amp * transported_sin2beta(g.beta[j], x);
  }
  out += carried;
  out.parity = Parity::none();
  return out;
}

ScalarField eval_omega_app(const LomTrajectory2d& traj, std::size_t n) {
  require_snapshots(traj);
  const auto E = eta_time_integrals(traj);
  ScalarField out = eval_g(traj.state(n));
  RadialProfile r(traj.grid);
  for (std::size_t i = 0; i < r.size(); ++i) r.v[i] = traj.eta0.v[i] * E[n].v[i];
  out += ScalarField::radial(r);
  out.parity = Parity::none();
  return out;
}

double t_star(double alpha, double C_N1) {
  if (!(alpha > 0.0) || !(std::abs(std::log(alpha)) > std::exp(1.0)))
    throw std::domain_error("t_star needs |log alpha| > e");
  if (!(C_N1 > 0.0)) throw std::invalid_argument("t_star needs C_{N+1} > 0");
  return alpha * std::log(std::abs(std::log(alpha))) / (4.0 * C_N1);
}

void compute_lom2d_norms(LomTrajectory2d& traj, int N, XiMode xi_mode, BracketConstants c) {
  require_snapshots(traj);
  const RadialProfile G0 = tail_log_integral(traj.g0);
  const auto mask = positive_mask(G0);
  const auto E = eta_time_integrals(traj);
  traj.norms.clear();
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    const LomState2d s = traj.state(n);
    LomNorms2d r;
    r.t = s.t;
    r.I_max = s.I.max_abs();
    const ScalarField g = eval_g(s);
    r.g_linf = g.max_abs();
    r.eta_linf = eval_eta_app(s).max_abs();
    r.xi_linf = eval_xi_app(s, xi_mode).max_abs();
    RadialProfile rad(traj.grid);
    for (std::size_t i = 0; i < rad.size(); ++i) rad.v[i] = traj.eta0.v[i] * E[n].v[i];
    r.omega_app_HN = calHk_norm_orthogonal({g, ScalarField::radial(rad)}, N).value;
    double lo_m = std::numeric_limits<double>::infinity(), up_m = lo_m;
    for (std::size_t i = 0; i < G0.size(); ++i) {
      if (!mask[i] || s.t == 0.0) continue;
      const double lo = bracket_lower(traj.alpha, s.t, G0.v[i], c.c2);
      const double up = bracket_upper(traj.alpha, s.t, G0.v[i], c.c1);
      lo_m = std::min(lo_m, (s.I.v[i] - lo) / std::max(std::abs(s.I.v[i]), std::abs(lo)));
      up_m = std::min(up_m, (up - s.I.v[i]) / std::max(std::abs(s.I.v[i]), std::abs(up)));
    }
    r.bracket_lower_margin = std::isfinite(lo_m) ? lo_m : 0.0;
    r.bracket_upper_margin = std::isfinite(up_m) ? up_m : 0.0;
    traj.norms.push_back(r);
  }
}

VerificationReport check_growth_bounds(const LomTrajectory2d& traj, const SizeConstants& consts,
                                       GrowthCheckOptions opt) {
  VerificationReport rep;
  rep.experiment = "lom2d";
  const double alpha = traj.alpha;
  const double c1 = opt.c.c1, c2 = opt.c.c2;
  const RadialProfile G0 = tail_log_integral(traj.g0);
  const auto mask = positive_mask(G0);
  const auto [C0, c0] = G0_extrema_on_support(traj.g0, G0);
  const double g0_sup = traj.g0.max_abs();
  const double eta0_sup = traj.eta0.max_abs();

  // Worst ratios over every (t, R) with G0(R) > 0.
  double lo_ratio = 1.0, up_ratio = 1.0;
  double g_ratio = 0.0, xi_max = 0.0;
  double floor_ratio = std::numeric_limits<double>::infinity();
  double eta_ratio_final = 1.0, eta_ratio_sup = 1.0;
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    const double t = traj.times[n];
    const auto& I = traj.I[n];
    if (t > 0.0) {
      for (std::size_t i = 0; i < I.size(); ++i) {
        if (!mask[i]) continue;
        const double lo = bracket_lower(alpha, t, G0.v[i], c2);
        const double up = bracket_upper(alpha, t, G0.v[i], c1);
        lo_ratio = std::min(lo_ratio, I.v[i] / lo);
        up_ratio = std::max(up_ratio, I.v[i] / up);
      }
    }
    const LomState2d s = traj.state(n);
    if (g0_sup > 0.0) g_ratio = std::max(g_ratio, eval_g(s).max_abs() / g0_sup);
    xi_max = std::max(xi_max, eval_xi_app(s, XiMode::ExplicitZeroData).max_abs());
    const double eta_ratio = eta0_sup > 0.0 ? eval_eta_app(s).max_abs() / eta0_sup : 1.0;
    const double fl = std::pow(1.0 + c2 * t * C0 / (2.0 * alpha), 1.0 / c2);
    floor_ratio = std::min(floor_ratio, eta_ratio / fl);
    eta_ratio_sup = std::max(eta_ratio_sup, eta_ratio);
    eta_ratio_final = eta_ratio;
  }

  rep.check_ge("I_lower_bracket", "g-upperandlower",
               "min I / ((2a/c2) log(1 + (c2/2a) t G0)) >= 1", lo_ratio, 1.0, opt.bracket_slack);
  rep.check_le("I_upper_bracket", "g-upperandlower",
               "max I / ((2a/c1) log(1 + (c1/2a) t G0)) <= 1", up_ratio, 1.0, opt.bracket_slack);
  rep.check_le("g_linf_ceiling", "est:g-inf", "max_t |g(t)|_inf / |g0|_inf <= 1", g_ratio, 1.0);
  rep.check_le("xi_app_below_3", "csi-explicit", "max_t |xi_app(t)|_inf < 3", xi_max, 3.0, -1e-15);
  rep.check_ge("eta_floor_per_time", "prop:expl",
               "min_t |eta_app(t)|_inf / (|eta0|_inf (1 + c2 t C0/2a)^(1/c2)) >= 1", floor_ratio,
               1.0, opt.bracket_slack);

  const double L = std::log(std::abs(std::log(alpha)));
  const double headline = std::pow(1.0 + L / consts.C_k1, 1.0 / c2);
  const char* floor_ineq = "sup_t |eta_app(t)|_inf / |eta0|_inf >= (1 + log|log a| / C_{N+1})^(1/c2)";
  if (eta0_sup > 0.0 && C0 > 0.0)
    rep.check_ge("eta_inflation_floor", "prop:expl", floor_ineq, eta_ratio_sup, headline, -opt.floor_margin);
  else
    rep.check_true("eta_inflation_floor", "prop:expl", floor_ineq, true, "vacuous: zero data");

  rep.metrics["C0"] = C0;
  rep.metrics["c0"] = c0;
  rep.metrics["C_N1"] = consts.C_k1;
  rep.metrics["t_end"] = traj.times.back();
  rep.metrics["inflation_ratio_final"] = eta_ratio_final;
  rep.metrics["inflation_ratio_sup"] = eta_ratio_sup;
  rep.metrics["inflation_floor"] = headline;
  rep.metrics["bracket_lower_min_ratio"] = lo_ratio;
  rep.metrics["bracket_upper_max_ratio"] = up_ratio;
  rep.metrics["xi_linf_max"] = xi_max;
  rep.metrics["g_ratio_max"] = g_ratio;
  rep.metrics["closure_substeps"] = traj.substeps;
  return rep;
}

double closed_loop_residual_2d(const LomTrajectory2d& traj) {
  std::vector<RadialProfile> L;
  L.reserve(traj.times.size());
  for (std::size_t n = 0; n < traj.times.size(); ++n) L.push_back(op_L(eval_g(traj.state(n))));
  const auto Iq = cumulative_time_integral(traj.times, L);
  double scale = 0.0, err = 0.0;
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    scale = std::max(scale, traj.I[n].max_abs());
    for (std::size_t i = 0; i < Iq[n].size(); ++i)
      err = std::max(err, std::abs(Iq[n].v[i] - traj.I[n].v[i]));
  }
  return scale > 0.0 ? err / scale : err;
}

}  // namespace nilab
