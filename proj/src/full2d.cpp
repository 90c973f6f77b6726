#include "nilab/full2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "nilab/closure.hpp"
#include "nilab/elliptic.hpp"
#include "nilab/integral_ops.hpp"
#include "nilab/kernels.hpp"
#include "nilab/lom2d.hpp"
#include "nilab/norms.hpp"

namespace nilab {
namespace {

constexpr double kBlowup = 1e12;

void require_plane(const ScalarField& f) {
  if (!f.grid || f.grid->domain != BetaDomain::HalfPeriod || f.grid->spacing != Spacing::LogR)
    throw std::invalid_argument("full 2d solver needs a half-period log-R grid");
}

ScalarField plain(ScalarField f) {
  f.parity = Parity::none();
  return f;
}

ScalarField transport(const VelocityTerms& v, const ScalarField& f) {
  const ScalarField fs = R_dR(f), fb = d_dbeta(f);
  ScalarField out(f.grid, Parity::none());
  kernels::parallel::transport_rhs(f.size(), v.Vs.v.data(), v.Vb.v.data(), fs.v.data(),
                                   fb.v.data(), out.v.data());
  return out;
}

// rhs -= nu_s d4_s f + nu_b d4_b f (undivided differences); returns max |term|.
double add_hyper(ScalarField& rhs, const ScalarField& f, double nu_s, double nu_b) {
  const auto& g = *f.grid;
  std::vector<double> ds(f.size()), db(f.size());
  kernels::parallel::radial_fourth_diff(f.v.data(), ds.data(), g.nR(), g.nB());
  kernels::parallel::beta_fourth_diff(f.v.data(), db.data(), g.nR(), g.nB(),
                                      {kernels::BetaBC::Periodic, 0, 0});
  double mx = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double term = nu_s * ds[k] + nu_b * db[k];
    rhs.v[k] -= term;
    mx = std::max(mx, std::abs(term));
  }
  return mx;
}

struct Stage {
  ScalarField dO, dE, dX;
  double hyper = 0.0;
  double limit = 0.0;
};

Stage evaluate(const ScalarField& omega, const ScalarField& eta, const ScalarField& xi,
               double alpha, const FullSolverOptions& opt) {
  const ScalarField psi = opt.frozen_psi ? *opt.frozen_psi : solve_psi_plane(omega, alpha);
  const VelocityTerms v = velocity_terms(psi, alpha);
  Stage st;
  st.limit = cfl_limit(v, opt.cfl);
  st.dO = transport(v, omega);
  st.dE = transport(v, eta);
  st.dX = transport(v, xi);
  if (opt.sources) {
    for (std::size_t k = 0; k < omega.size(); ++k) {
      const double e = eta.v[k], x = xi.v[k];
      st.dO.v[k] += e;
      st.dE.v[k] += v.dxu2.v[k] - v.dxu1.v[k] * e - v.dxu2.v[k] * x;
      st.dX.v[k] += v.dyu2.v[k] - v.dyu1.v[k] * e - v.dyu2.v[k] * x;
    }
  }
  if (opt.hyper_gamma > 0.0) {
    const auto& g = *omega.grid;
    const double nu_s = opt.hyper_gamma * v.Vs.max_abs() / g.hR;
    const double nu_b = opt.hyper_gamma * v.Vb.max_abs() / g.hbeta;
    if (nu_s > 0.0 || nu_b > 0.0) {
      st.hyper = std::max({add_hyper(st.dO, omega, nu_s, nu_b), add_hyper(st.dE, eta, nu_s, nu_b),
                           add_hyper(st.dX, xi, nu_s, nu_b)});
    }
  }
  return st;
}

ScalarField axpy(const ScalarField& y, double a, const ScalarField& x) {
  ScalarField out = y;
  for (std::size_t k = 0; k < out.size(); ++k) out.v[k] += a * x.v[k];
  out.parity = Parity::none();
  return out;
}

bool healthy(const FullState2d& s) {
  for (const ScalarField* f : {&s.omega, &s.eta, &s.xi})
    if (!f->all_finite() || f->max_abs() > kBlowup) return false;
  return true;
}

}  // namespace

VelocityTerms velocity_terms(const ScalarField& psi, double alpha) {
  // u1, u2 are odd under beta -> beta + pi, so a periodic stencil must not see
  // them.  Both derivatives are expanded down to derivatives of Psi instead:
  // with F = R^{2/a} Psi, P = 2 Psi + a Psi_s and Q = Psi_b one has
  // d_x F = R^{1/a}(cP - sQ), d_y F = R^{1/a}(sP + cQ), and the second
  // derivatives follow from the same rule with power 1.
  const ScalarField b = plain(psi);
  const ScalarField bs = R_dR(b), bb = d_dbeta(b);
  const ScalarField bss = R_dR(bs), bsb = d_dbeta(bs), bbb = d_dbeta(bb);
  const auto& g = *b.grid;
  const std::size_t nB = g.nB();
  VelocityTerms v;
  for (ScalarField* f : {&v.Vs, &v.Vb, &v.dxu1, &v.dxu2, &v.dyu1, &v.dyu2})
    *f = ScalarField(b.grid, Parity::none());
  const double a = alpha;
  for (std::size_t i = 0; i < g.nR(); ++i) {
    for (std::size_t j = 0; j < nB; ++j) {
      const std::size_t k = i * nB + j;
      const double c = std::cos(g.beta[j]), s = std::sin(g.beta[j]);
      const double P = 2.0 * b.v[k] + a * bs.v[k], Q = bb.v[k];
      const double Ps = 2.0 * bs.v[k] + a * bss.v[k], Pb = 2.0 * bb.v[k] + a * bsb.v[k];
      const double Qs = bsb.v[k], Qb = bbb.v[k];
      const double X = c * P - s * Q, Y = s * P + c * Q;  // bases of d_x F, d_y F
      const double Xs = c * Ps - s * Qs, Xb = -s * P + c * Pb - c * Q - s * Qb;
      const double Ys = s * Ps + c * Qs, Yb = c * P + s * Pb - s * Q + c * Qb;
      const double XX = c * (X + a * Xs) - s * Xb, YX = s * (X + a * Xs) + c * Xb;
      const double XY = c * (Y + a * Ys) - s * Yb, YY = s * (Y + a * Ys) + c * Yb;
      v.dxu1.v[k] = -XY;
      v.dyu1.v[k] = -YY;
      v.dxu2.v[k] = XX;
      v.dyu2.v[k] = YX;
      v.Vs.v[k] = -a * Q;
      v.Vb.v[k] = P;
    }
  }
  return v;
}

double cfl_limit(const VelocityTerms& v, double cfl) {
  const auto& g = *v.Vs.grid;
  double m = 0.0;
  for (std::size_t k = 0; k < v.Vs.size(); ++k)
    m = std::max(m, std::abs(v.Vs.v[k]) / g.hR + std::abs(v.Vb.v[k]) / g.hbeta);
  return m > 0.0 ? cfl / m : std::numeric_limits<double>::infinity();
}

FullState2d step(const FullState2d& s, double dt, const FullSolverOptions& opt, StepStats* stats) {
  require_plane(s.omega);
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const double a = s.alpha;
  const Stage k1 = evaluate(s.omega, s.eta, s.xi, a, opt);
  if (dt > k1.limit * (1.0 + 1e-12))
    throw std::invalid_argument("step: dt = " + std::to_string(dt) +
                                " violates the CFL condition; use dt <= " +
                                std::to_string(k1.limit));
  const double h = 0.5 * dt;
  const Stage k2 = evaluate(axpy(s.omega, h, k1.dO), axpy(s.eta, h, k1.dE), axpy(s.xi, h, k1.dX),
                            a, opt);
  const Stage k3 = evaluate(axpy(s.omega, h, k2.dO), axpy(s.eta, h, k2.dE), axpy(s.xi, h, k2.dX),
                            a, opt);
  const Stage k4 = evaluate(axpy(s.omega, dt, k3.dO), axpy(s.eta, dt, k3.dE),
                            axpy(s.xi, dt, k3.dX), a, opt);
  FullState2d out{s.t + dt, plain(s.omega), plain(s.eta), plain(s.xi), a};
  const double w = dt / 6.0;
  for (std::size_t k = 0; k < out.omega.size(); ++k) {
    out.omega.v[k] += w * (k1.dO.v[k] + 2.0 * k2.dO.v[k] + 2.0 * k3.dO.v[k] + k4.dO.v[k]);
    out.eta.v[k] += w * (k1.dE.v[k] + 2.0 * k2.dE.v[k] + 2.0 * k3.dE.v[k] + k4.dE.v[k]);
    out.xi.v[k] += w * (k1.dX.v[k] + 2.0 * k2.dX.v[k] + 2.0 * k3.dX.v[k] + k4.dX.v[k]);
  }
  if (stats) {
    stats->hyper_rate = std::max({k1.hyper, k2.hyper, k3.hyper, k4.hyper});
    stats->dt_limit = k1.limit;
  }
  return out;
}

FullRun evolve_full(const FullState2d& s0, const std::vector<double>& out_times,
                    const FullSolverOptions& opt, double dt_scale) {
  require_plane(s0.omega);
  if (!(dt_scale > 0.0 && dt_scale <= 1.0)) throw std::invalid_argument("dt_scale must be in (0, 1]");
  FullRun run;
  FullState2d s = s0;
  for (double T : out_times) {
    if (T < s.t - 1e-14 * std::max(1.0, std::abs(T)))
      throw std::invalid_argument("output times must be nondecreasing and start after t0");
    while (s.t < T - 1e-14 * std::max(1.0, std::abs(T))) {
      const ScalarField psi = opt.frozen_psi ? *opt.frozen_psi : solve_psi_plane(s.omega, s.alpha);
      double dt = std::min(dt_scale * cfl_limit(velocity_terms(psi, s.alpha), opt.cfl), T - s.t);
      if (opt.dt_max > 0.0) dt = std::min(dt, dt_scale * opt.dt_max);
      // avoid a sliver step just before the output time
      if (T - s.t - dt < 1e-3 * dt) dt = T - s.t;
      StepStats st;
      FullSolverOptions relaxed = opt;
      if (dt == T - s.t) relaxed.cfl = opt.cfl * 1.001;
      s = step(s, dt, relaxed, &st);
      run.hyper_integral += dt * st.hyper_rate;
      ++run.steps;
      if (!healthy(s)) {
        run.aborted = true;
        return run;
      }
    }
    s.t = T;
    run.snapshots.push_back(s);
  }
  return run;
}

RemainderResult run_remainder_experiment(const DataParams& p, const RemainderOptions& opt) {
  if (opt.N != 3 && opt.N != 4) throw std::invalid_argument("remainder experiment needs N in {3, 4}");
  if (opt.outputs < 1 || opt.lom_refine < 1) throw std::invalid_argument("need outputs, lom_refine >= 1");
  if (opt.outputs * opt.lom_refine < 32)
    throw std::invalid_argument("LOM needs at least 32 snapshot intervals");
  if (opt.nbeta < 4) throw std::invalid_argument("nbeta must be >= 4");
  DataParams dp = p;
  dp.k = opt.N;
  const SizeConstants consts = size_constants(dp);
  const double a = dp.alpha;
  const double C_N1 = consts.C_k1;
  const double ts = t_star(a, C_N1);
  const double t_end = opt.t_end.value_or(ts);
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");

  const GridPtr grid = build_half_period_grid(a, opt.R_min, opt.R_max, opt.nR, 2 * (opt.nbeta - 1));
  const RadialProfile g0 = make_g0_2d(grid, dp);
  const RadialProfile eta0 = make_eta0_2d(grid, dp);
  const RadialProfile eta0R = make_eta0_2d_Rderiv(grid, dp);
  require_certified_support(g0, "g0");
  require_certified_support(eta0, "eta0");

  // LOM on the same grid
  LomTrajectory2d traj = evolve_I(g0, a, uniform_times(t_end, opt.outputs * opt.lom_refine));
  traj.eta0 = eta0;
  traj.eta0_Rderiv = eta0R;

  // full data: Omega0 = g0 sin 2b, eta = d_x(R^{1/a} eta0 cos b), xi = d_y(...)
  FullState2d s0;
  s0.alpha = a;
  s0.omega = ScalarField::separable(g0, [](double b) { return std::sin(2.0 * b); }, Parity::none());
  s0.eta = ScalarField::radial(eta0);
  s0.eta.parity = Parity::none();
  s0.xi = ScalarField(grid, Parity::none());
  for (std::size_t i = 0; i < grid->nR(); ++i) {
    for (std::size_t j = 0; j < grid->nB(); ++j) {
      const double c = std::cos(grid->beta[j]), sn = std::sin(grid->beta[j]);
      s0.eta.at(i, j) += a * eta0R.v[i] * c * c;
      s0.xi.at(i, j) = a * eta0R.v[i] * sn * c;
    }
  }

  FullSolverOptions sopt = opt.solver;
  if (sopt.dt_max <= 0.0) sopt.dt_max = t_end / static_cast<double>(8 * opt.outputs);
  const FullRun run = evolve_full(s0, uniform_times(t_end, opt.outputs), sopt, opt.dt_scale);

  RemainderResult res;
  res.aborted = run.aborted;
  auto& S = res.series;
  const double cap = opt.f_cap_multiplier * std::sqrt(a);
  for (std::size_t n = 0; n < run.snapshots.size(); ++n) {
    const FullState2d& s = run.snapshots[n];
    const std::size_t m = n * opt.lom_refine;
    const LomState2d ls = traj.state(m);
    ScalarField eta_app = eval_eta_app(ls);
    eta_app *= opt.eta_app_scale;
    const ScalarField Or = plain(s.omega - eval_omega_app(traj, m));
    const ScalarField Er = plain(s.eta - eta_app);
    const ScalarField Xr = plain(s.xi - eval_xi_app(ls, XiMode::Transported));
    S.times.push_back(s.t);
    S.omega_r.push_back(calHk_norm(Or, opt.N).value);
    S.eta_r.push_back(calHk_norm(Er, opt.N).value);
    S.xi_r.push_back(calHk_norm(Xr, opt.N).value);
    S.F.push_back(S.omega_r.back() + S.eta_r.back() + S.xi_r.back());
    S.sqrt_alpha_cap.push_back(cap);
    S.eta_linf.push_back(s.eta.max_abs());
    S.eta_app_linf.push_back(eta_app.max_abs());
  }
  S.F0 = S.F.empty() ? 0.0 : S.F.front();

  auto& rep = res.report;
  rep.experiment = "remainder2d";
  rep.check_true("no_blowup", "prop:rem", "all fields finite and below 1e12 on [0, t_end]",
                 !run.aborted, run.aborted ? "solver aborted; partial series" : "");
  rep.check_le("F0_initial_error", "data eta rem", "F(0) <= 2 alpha C_{N+1}", S.F0, 2.0 * a * C_N1);
  const double Fmax = S.F.empty() ? 0.0 : *std::max_element(S.F.begin(), S.F.end());
  rep.check_le("F_bootstrap", "bootstrap", "max_t F(t) <= 3 sqrt(alpha)", Fmax, cap);
  const double omega_r0 = S.omega_r.empty() ? 0.0 : S.omega_r.front();
  rep.check_le("F0_consistency", "def:omega-r", "|Omega_r(0)|_{calH^N} <= 1e-12 F(0)", omega_r0,
               1e-12 * std::max(S.F0, 1e-300));
  std::size_t applicable = 0, held = 0;
  for (std::size_t n = 0; n < S.F.size(); ++n) {
    if (S.F[n] <= cap && S.eta_app_linf[n] >= 2.0 * cap) {
      ++applicable;
      if (S.eta_linf[n] >= 0.5 * S.eta_app_linf[n]) ++held;
    }
  }
  rep.check_true("inflation_transfer", "thm:main",
                 "F <= 3 sqrt(a) and |eta_app|_inf >= 6 sqrt(a) imply |eta|_inf >= |eta_app|_inf / 2",
                 held == applicable,
                 std::to_string(held) + " of " + std::to_string(applicable) + " applicable times");
  rep.check_le("hyperdiffusion_budget", "bootstrap", "int_0^t max|hyperdiffusion| dt <= 0.01 * 3 sqrt(alpha)",
               run.hyper_integral, 0.01 * cap);

  rep.metrics["alpha"] = a;
  rep.metrics["delta"] = dp.delta;
  rep.metrics["N"] = opt.N;
  rep.metrics["C_N1"] = C_N1;
  rep.metrics["t_star"] = ts;
  rep.metrics["t_end"] = t_end;
  rep.metrics["F0"] = S.F0;
  rep.metrics["F0_over_alpha"] = S.F0 / a;
  {
    ScalarField e0 = ScalarField::radial(eta0);
    e0.parity = Parity::none();
    const double bound = a * calHk_norm(e0, opt.N + 1).value;
    rep.metrics["alpha_eta0_calH_N1"] = bound;
    rep.check_le("eta_r0_data_bound", "data eta rem", "|eta_r(0)|_{calH^N} <= alpha |eta0|_{calH^{N+1}}",
                 S.eta_r.empty() ? 0.0 : S.eta_r.front(), bound);
  }
  if (!S.F.empty()) {
    rep.metrics["omega_r_end"] = S.omega_r.back();
    rep.metrics["eta_r_end"] = S.eta_r.back();
    rep.metrics["xi_r_end"] = S.xi_r.back();
  }
  rep.metrics["F_max"] = Fmax;
  rep.metrics["F_end"] = S.F.empty() ? 0.0 : S.F.back();
  rep.metrics["F_end_over_sqrt_alpha"] = S.F.empty() ? 0.0 : S.F.back() / std::sqrt(a);
  rep.metrics["steps"] = run.steps;
  rep.metrics["hyper_integral"] = run.hyper_integral;
  rep.metrics["inflation_transfer_applicable"] = applicable;
  rep.metrics["eta_app_scale"] = opt.eta_app_scale;
  rep.metrics["nR"] = opt.nR;
  rep.metrics["nbeta_half_period"] = grid->nB();
  return res;
}

}  // namespace nilab
