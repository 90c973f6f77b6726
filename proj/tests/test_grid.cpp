#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nilab/grid.hpp"
#include "nilab/init_data.hpp"

using namespace nilab;
using std::numbers::pi;

namespace {

double max_abs_diff(const ScalarField& a, const ScalarField& b, std::size_t skip_r = 0) {
  const auto& g = *a.grid;
  double m = 0.0;
  for (std::size_t i = skip_r; i + skip_r < g.nR(); ++i)
    for (std::size_t j = 0; j < g.nB(); ++j) m = std::max(m, std::abs(a.at(i, j) - b.at(i, j)));
  return m;
}

}  // namespace

TEST_CASE("build_grid contract") {
  auto g = build_grid(0.01, 8.0, 256, 64, Spacing::UniformR);
  CHECK(g->R.front() > 0.0);
  CHECK(g->R.back() == 8.0);
  CHECK(g->beta.front() == 0.0);
  CHECK(g->beta.back() == doctest::Approx(pi / 2).epsilon(1e-15));
  for (std::size_t i = 1; i < g->nR(); ++i) CHECK(g->R[i] > g->R[i - 1]);

  CHECK_THROWS_AS(build_grid(0.3, 8.0, 256, 64, Spacing::UniformR), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0.01, -1.0, 256, 64, Spacing::UniformR), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0.01, 8.0, 4, 64, Spacing::UniformR), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0.01, 8.0, 256, 4, Spacing::UniformR), std::invalid_argument);

  auto lg = build_grid(0.01, 8.0, 256, 64, Spacing::LogR);
  const double q = lg->R[1] / lg->R[0];
  for (std::size_t i = 1; i + 1 < lg->nR(); ++i)
    CHECK(std::abs(lg->R[i + 1] / lg->R[i] - q) < 1e-12);
}

TEST_CASE("half-period grid is periodic in beta") {
  auto g = build_half_period_grid(0.05, 0.25, 8.0, 64, 16);
  CHECK(g->domain == BetaDomain::HalfPeriod);
  CHECK(g->nB() == 16);
  CHECK(g->hbeta == doctest::Approx(pi / 16));
  CHECK_THROWS(build_half_period_grid(0.05, 0.25, 8.0, 64, 15));
  CHECK_THROWS(build_half_period_grid(0.05, 0.0, 8.0, 64, 16));
}

TEST_CASE("to_scaled and from_scaled examples") {
  auto [R0, b0] = to_scaled(0.0, 1.0, 0.5);
  CHECK(R0 == doctest::Approx(1.0));
  CHECK(b0 == doctest::Approx(0.0));
  auto [R1, b1] = to_scaled(1.0, 0.0, 0.5);
  CHECK(R1 == doctest::Approx(1.0));
  CHECK(b1 == doctest::Approx(pi / 2));
  auto [R2, b2] = to_scaled(3.0, 4.0, 0.5);
  CHECK(R2 == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  CHECK(b2 == doctest::Approx(std::atan(0.75)).epsilon(1e-14));
  CHECK_THROWS_AS(to_scaled(0.0, 0.0, 0.5), std::invalid_argument);

  auto [x0, y0] = from_scaled(1.0, 0.0, 0.01);
  CHECK(std::abs(x0) < 1e-15);
  CHECK(y0 == doctest::Approx(1.0));
  auto [x1, y1] = from_scaled(1.0, pi / 2, 0.01);
  CHECK(x1 == doctest::Approx(1.0));
  CHECK(std::abs(y1) < 1e-15);
  CHECK_THROWS_AS(from_scaled(0.0, 0.1, 0.01), std::invalid_argument);

  auto [R3, b3] = to_scaled(3.0, 4.0, 0.5);
  auto [x3, y3] = from_scaled(R3, b3, 0.5);
  CHECK(x3 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(y3 == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("coordinate round trip on random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1e-3, 10.0);
  for (double a : {0.5, 0.1, 0.01}) {
    double worst = 0.0;
    for (int n = 0; n < 10000; ++n) {
      const double x = u(rng), y = u(rng);
      auto [R, b] = to_scaled(x, y, a);
      auto [x2, y2] = from_scaled(R, b, a);
      worst = std::max({worst, std::abs(x2 - x) / x, std::abs(y2 - y) / y});
    }
    CAPTURE(a);
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("cartesian derivative of y is one") {
  const double a = 0.25;
  auto g = build_grid(a, 4.0, 128, 64, Spacing::UniformR);
  PrefactoredField y{ScalarField::from_function(
                         g, [](double, double b) { return std::sin(b); }, Parity::odd_even()),
                     1};
  const PrefactoredField dy = cartesian_derivative(y, Axis::Y);
  CHECK(dy.power == 0);
  ScalarField one = ScalarField::from_function(g, [](double, double) { return 1.0; }, Parity::none());
  CHECK(max_abs_diff(dy.base, one) < 1e-6);
}

TEST_CASE("cartesian derivative of the rho datum") {
  // d_x (R^{1/a} eta0 cos b) = eta0 + a R eta0' cos^2 b
  DataParams p;
  p.alpha = 1e-2;
  p.delta = 0.1;
  double prev = 0.0;
  for (std::size_t nR : {1024u, 2048u}) {
    auto g = build_grid(p.alpha, 8.0, nR, 32, Spacing::UniformR);
    const RadialProfile e0 = make_eta0_2d(g, p);
    const RadialProfile e0R = make_eta0_2d_Rderiv(g, p);
    PrefactoredField rho{ScalarField::separable(e0, [](double b) { return std::cos(b); },
                                                Parity::even_odd()),
                         1};
    const PrefactoredField dx = cartesian_derivative(rho, Axis::X);
    ScalarField expect = ScalarField::from_function(
        g,
        [&](double R, double b) {
          const std::size_t i = static_cast<std::size_t>(std::lround(R / g->hR)) - 1;
          return e0.v[i] + p.alpha * e0R.v[i] * std::cos(b) * std::cos(b);
        },
        Parity::none());
    const double err = max_abs_diff(dx.base, expect);
    CHECK(err < 1e-4 * e0.max_abs());
    if (prev > 0.0) CHECK(prev / err > 3.5);
    prev = err;
  }
}

TEST_CASE("cartesian derivative of a constant vanishes") {
  auto g = build_grid(0.1, 4.0, 64, 16, Spacing::LogR);
  ScalarField c = ScalarField::from_function(g, [](double, double) { return 2.5; }, Parity::even_even());
  for (Axis ax : {Axis::X, Axis::Y}) {
    const PrefactoredField d = cartesian_derivative(c, ax);
    CHECK(d.base.max_abs() < 1e-12);
  }
}

TEST_CASE("cartesian derivative of a quadratic converges") {
  // xy = R^{2/a} sin b cos b, d_x (xy) = y = R^{1/a} sin b
  const double a = 0.2;
  double prev = 0.0;
  for (std::size_t nB : {9u, 17u, 33u}) {
    auto g = build_grid(a, 4.0, 32, nB, Spacing::LogR);
    PrefactoredField f{ScalarField::from_function(
                           g, [](double, double b) { return std::sin(b) * std::cos(b); },
                           Parity::odd_odd()),
                       2};
    const PrefactoredField dx = cartesian_derivative(f, Axis::X);
    CHECK(dx.power == 1);
    ScalarField y = ScalarField::from_function(g, [](double, double b) { return std::sin(b); },
                                               Parity::none());
    const double err = max_abs_diff(dx.base, y);
    if (prev > 0.0) CHECK(std::log2(prev / err) >= 2.0);
    prev = err;
  }
}

TEST_CASE("mixed cartesian derivatives commute under refinement") {
  const double a = 0.2;
  std::vector<double> errs;
  for (std::size_t n : {64u, 128u, 256u}) {
    auto g = build_grid(a, 6.0, n, n / 2 + 1, Spacing::UniformR);
    PrefactoredField f{ScalarField::from_function(
                           g,
                           [](double R, double b) { return bump(R, 2.5, 1.0) * std::sin(2.0 * b); },
                           Parity::odd_odd()),
                       2};
    const PrefactoredField xy = cartesian_derivative(cartesian_derivative(f, Axis::Y), Axis::X);
    const PrefactoredField yx = cartesian_derivative(cartesian_derivative(f, Axis::X), Axis::Y);
    CHECK(xy.power == yx.power);
    errs.push_back(max_abs_diff(xy.base, yx.base, 4));
  }
  CHECK(std::log2(errs[0] / errs[1]) >= 1.5);
  CHECK(std::log2(errs[1] / errs[2]) >= 1.5);
}

TEST_CASE("prefactor materializes and guards overflow") {
  auto g = build_grid(0.25, 4.0, 16, 8, Spacing::UniformR);
  PrefactoredField f{ScalarField::from_function(g, [](double, double) { return 1.0; }, Parity::none()), 1};
  const ScalarField m = f.materialize();
  CHECK(m.at(g->nR() - 1, 0) == doctest::Approx(std::pow(4.0, 4.0)));

  auto tiny = build_grid(0.001, 4.0, 16, 8, Spacing::UniformR);
  PrefactoredField big{ScalarField::from_function(tiny, [](double, double) { return 1.0; }, Parity::none()), 1};
  CHECK_THROWS_AS(big.materialize(), std::overflow_error);
}
