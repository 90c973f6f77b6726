#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nilab/full2d.hpp"
#include "nilab/init_data.hpp"
#include "nilab/norms.hpp"

using namespace nilab;
using std::numbers::pi;

namespace {

GridPtr half(std::size_t nR, std::size_t nB, double alpha = 0.05) {
  return build_half_period_grid(alpha, 0.25, 8.0, nR, nB);
}

ScalarField field(GridPtr g, const std::function<double(double, double)>& f) {
  return ScalarField::from_function(g, f, Parity::none());
}

FullState2d zero_state(GridPtr g, double alpha) {
  FullState2d s;
  s.alpha = alpha;
  s.omega = ScalarField(g, Parity::none());
  s.eta = ScalarField(g, Parity::none());
  s.xi = ScalarField(g, Parity::none());
  return s;
}

// differential rotation: Psi radial gives Vs = 0 and Vb = 2 Psi + alpha R Psi_R
double rot_psi(double R) { return 0.5 + 0.2 * bump(R, 2.0, 1.0); }
double rot_speed(double R, double a) { return 2 * rot_psi(R) + a * 0.2 * R * bump_derivative(R, 2.0, 1.0); }

double rotation_error(std::size_t nB) {
  const double a = 0.05, T = 0.3;
  auto g = half(1024, nB, a);
  FullState2d s = zero_state(g, a);
  s.omega = field(g, [](double R, double b) { return bump(R, 2.0, 1.0) * std::sin(2 * b); });
  FullSolverOptions opt;
  opt.sources = false;
  opt.hyper_gamma = 0.0;
  opt.frozen_psi = field(g, [](double R, double) { return rot_psi(R); });
  const FullRun run = evolve_full(s, {T}, opt, 0.25);
  const ScalarField& w = run.snapshots.back().omega;
  double err = 0.0;
  for (std::size_t i = 0; i < g->nR(); ++i)
    for (std::size_t j = 0; j < g->nB(); ++j) {
      const double R = g->R[i];
      err = std::max(err, std::abs(w.at(i, j) - bump(R, 2.0, 1.0) * std::sin(2 * (g->beta[j] - rot_speed(R, a) * T))));
    }
  return err;
}

}  // namespace

TEST_CASE("velocity terms of a zero stream function vanish") {
  auto g = half(64, 32);
  const VelocityTerms v = velocity_terms(ScalarField(g, Parity::none()), 0.05);
  for (const ScalarField* f : {&v.Vs, &v.Vb, &v.dxu1, &v.dxu2, &v.dyu1, &v.dyu2}) CHECK(f->max_abs() == 0.0);
  CHECK(std::isinf(cfl_limit(v, 0.5)));
}

TEST_CASE("leading order of d_x u1 for a sin(2 beta) stream function") {
  // Psi = f sin(2b): d_x u1 = -2 f + O(alpha)
  auto err = [](double a) {
    auto g = half(512, 64, a);
    const ScalarField psi = field(g, [](double R, double b) { return bump(R, 2.0, 1.0) * std::sin(2 * b); });
    const VelocityTerms v = velocity_terms(psi, a);
    double e = 0.0;
    for (std::size_t i = 0; i < g->nR(); ++i)
      for (std::size_t j = 0; j < g->nB(); ++j) e = std::max(e, std::abs(v.dxu1.at(i, j) + 2 * bump(g->R[i], 2.0, 1.0)));
    return e;
  };
  const double e3 = err(1e-3), e4 = err(1e-4);
  CAPTURE(e3);
  CAPTURE(e4);
  CHECK(e4 < 2e-3);
  CHECK(e3 / e4 > 8.0);
}

TEST_CASE("velocity field is discretely divergence free") {
  auto div = [](std::size_t nR, std::size_t nB) {
    auto g = half(nR, nB);
    const ScalarField psi = field(g, [](double R, double b) {
      return bump(R, 2.0, 1.0) * (std::sin(2 * b) + 0.3 * std::cos(4 * b) + 0.5);
    });
    const VelocityTerms v = velocity_terms(psi, 0.05);
    return (v.dxu1 + v.dyu2).max_abs() / v.dxu1.max_abs();
  };
  // d_x u1 + d_y u2 = alpha (d_b d_s - d_s d_b) Psi, and both orders use the same stencils
  CHECK(div(256, 32) < 1e-12);
  CHECK(div(512, 64) < 1e-12);
}

TEST_CASE("step: zero stays zero, short time Omega follows eta") {
  const double a = 0.05;
  auto g = half(128, 32, a);
  FullSolverOptions opt;
  const FullState2d z = step(zero_state(g, a), 1e-3, opt);
  CHECK(z.omega.max_abs() == 0.0);
  CHECK(z.eta.max_abs() == 0.0);
  CHECK(z.xi.max_abs() == 0.0);
  CHECK(z.t == 1e-3);

  FullState2d s = zero_state(g, a);
  s.eta = field(g, [](double R, double) { return 0.1 * bump(R, 2.0, 1.0); });
  const double dt = 1e-4;
  const FullState2d s1 = step(s, dt, opt);
  const ScalarField expect = dt * s.eta;
  CHECK((s1.omega - expect).max_abs() <= 1e-3 * expect.max_abs());
}

TEST_CASE("pure transport does not create new extrema") {
  const double a = 0.05;
  auto g = half(128, 64, a);
  FullState2d s = zero_state(g, a);
  s.omega = field(g, [](double R, double b) { return bump(R, 2.0, 1.0) * std::sin(2 * b); });
  FullSolverOptions opt;
  opt.sources = false;
  opt.frozen_psi = field(g, [](double R, double b) { return bump(R, 2.5, 1.0) * (0.5 + 0.2 * std::cos(2 * b)); });
  const FullRun run = evolve_full(s, {0.1, 0.2}, opt);
  REQUIRE(run.snapshots.size() == 2);
  for (const auto& st : run.snapshots) CHECK(st.omega.max_abs() <= s.omega.max_abs() * (1 + 1e-3));
}

TEST_CASE("CFL violation throws") {
  const double a = 0.05;
  auto g = half(64, 32, a);
  FullState2d s = zero_state(g, a);
  FullSolverOptions opt;
  opt.frozen_psi = field(g, [](double, double) { return 10.0; });
  StepStats st;
  CHECK_NOTHROW(step(s, 1e-4, opt, &st));
  CHECK(st.dt_limit > 0.0);
  CHECK_THROWS_AS(step(s, 10 * st.dt_limit, opt), std::invalid_argument);
}

TEST_CASE("frozen velocity transport converges at second order") {
  const double e1 = rotation_error(32), e2 = rotation_error(64), e3 = rotation_error(128);
  CAPTURE(e1);
  CAPTURE(e2);
  CAPTURE(e3);
  CHECK(std::log2(e1 / e2) >= 1.8);
  CHECK(std::log2(e2 / e3) >= 1.8);
}

TEST_CASE("halving the time step changes little") {
  const double a = 0.05;
  auto g = half(128, 32, a);
  FullState2d s = zero_state(g, a);
  s.omega = field(g, [](double R, double b) { return 0.1 * bump(R, 2.0, 1.0) * std::sin(2 * b); });
  s.eta = field(g, [](double R, double) { return 0.1 * bump(R, 2.0, 1.0); });
  FullSolverOptions opt;
  const FullRun r1 = evolve_full(s, {0.05}, opt, 1.0), r2 = evolve_full(s, {0.05}, opt, 0.5);
  const ScalarField& w1 = r1.snapshots.back().omega;
  const ScalarField& w2 = r2.snapshots.back().omega;
  CHECK((w1 - w2).max_abs() <= 0.05 * w2.max_abs());
  CHECK(r2.steps > r1.steps);
}

TEST_CASE("remainder: initial error and the corrupted twin") {
  DataParams p;
  p.alpha = 0.05;
  p.delta = 0.25;
  p.k = 3;
  RemainderOptions opt;
  opt.nR = 256;
  opt.nbeta = 17;
  opt.outputs = 4;
  opt.t_end = 2e-3;
  const RemainderResult honest = run_remainder_experiment(p, opt);
  REQUIRE_FALSE(honest.aborted);
  CHECK(honest.series.F0 == honest.series.F.front());
  CHECK(honest.series.times.size() == honest.series.F.size());
  CHECK(honest.report.metrics.contains("F0_over_alpha"));

  // at t = 0 only eta differs from the model: eta - eta_app = alpha R d_R eta0 cos^2 b
  auto g = half(256, 32, p.alpha);
  const RadialProfile eR = make_eta0_2d_Rderiv(g, p);
  ScalarField e0(g, Parity::none());
  for (std::size_t i = 0; i < g->nR(); ++i)
    for (std::size_t j = 0; j < g->nB(); ++j) e0.at(i, j) = p.alpha * eR.v[i] * std::pow(std::cos(g->beta[j]), 2);
  const double F0 = honest.series.F0;
  CHECK(honest.series.eta_r.front() == doctest::Approx(calHk_norm(e0, 3).value).epsilon(1e-12));
  CHECK(honest.series.omega_r.front() <= 1e-12 * F0);
  CHECK(honest.series.xi_r.front() <= 1e-10 * F0);

  opt.eta_app_scale = 1.5;
  const RemainderResult bad = run_remainder_experiment(p, opt);
  CHECK_FALSE(bad.report.pass());
  CHECK(bad.series.eta_r.front() > honest.series.eta_r.front());
}
