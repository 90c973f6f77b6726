#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nilab/init_data.hpp"
#include "nilab/norms.hpp"

using namespace nilab;
using std::numbers::pi;

namespace {

GridPtr quarter(std::size_t nR = 256, std::size_t nB = 33) {
  return build_grid(1e-2, 6.0, nR, nB, Spacing::UniformR);
}

ScalarField bump_mode(GridPtr g, double n, Parity p) {
  return ScalarField::from_function(
      g, [n](double R, double b) { return bump(R, 2.0, 1.0) * std::sin(n * b); }, p);
}

}  // namespace

TEST_CASE("zero field has zero norms") {
  auto g = quarter();
  ScalarField z(g, Parity::odd_odd());
  CHECK(linf_norm(z).value == 0.0);
  for (int k = 0; k <= 6; ++k) {
    CHECK(calHk_norm(z, k).value == 0.0);
    CHECK(calWk_norm(z, k).value == 0.0);
  }
  CHECK(weighted_L2_3d(z, 0.99, 1e-2).value == 0.0);
  CHECK_THROWS_AS(calHk_norm(z, 7), std::invalid_argument);
  CHECK_THROWS_AS(calWk_norm(z, 7), std::invalid_argument);
}

TEST_CASE("sup norm examples") {
  auto g = quarter(64, 33);  // contains beta = pi/4
  ScalarField s = ScalarField::from_function(g, [](double, double b) { return std::sin(2.0 * b); },
                                             Parity::odd_odd());
  CHECK(linf_norm(s).value == doctest::Approx(1.0).epsilon(1e-14));

  DataParams p;
  p.delta = 0.1;
  p.alpha = 1e-3;
  auto fine = build_grid(p.alpha, 8.0, 4096, 8, Spacing::UniformR);
  const double m = make_eta0_2d(fine, p).max_abs();
  CHECK(m >= 0.1 * (1.0 - 1e-6));
  CHECK(m <= 0.2001 * 1.0001);
}

TEST_CASE("calH^0 counts the L2 norm twice") {
  auto g = quarter();
  const ScalarField f = bump_mode(g, 2.0, Parity::odd_odd());
  CHECK(calHk_norm(f, 0).value == doctest::Approx(2.0 * l2_norm(f)).epsilon(1e-14));
}

TEST_CASE("L2 norm of a separable mode") {
  auto g = quarter();
  const RadialProfile phi = make_bump(g, 2.0, 1.0);
  const ScalarField f = ScalarField::separable(phi, [](double b) { return std::sin(2.0 * b); },
                                               Parity::odd_odd());
  const double n = l2_norm_dR(phi);
  CHECK(l2_norm(f) * l2_norm(f) == doctest::Approx(pi * n * n).epsilon(1e-12));
}

TEST_CASE("calW examples") {
  auto g = quarter(128, 65);
  const RadialProfile phi = make_bump(g, 2.0, 1.0);
  const ScalarField r = ScalarField::radial(phi);
  CHECK(calWk_norm(r, 0).value == doctest::Approx(2.0 * phi.max_abs()).epsilon(1e-14));

  ScalarField s = ScalarField::from_function(g, [](double, double b) { return std::sin(2.0 * b); },
                                             Parity::odd_odd());
  CHECK(calWk_norm(s, 1).value == doctest::Approx(6.0).epsilon(1e-5));
}

TEST_CASE("weighted 3d norm on a support away from the axes") {
  auto g = quarter(256, 65);
  ScalarField f = ScalarField::from_function(
      g,
      [](double R, double b) {
        if (R < 1.0 || b < pi / 8 || b > 3 * pi / 8) return 0.0;
        return bump(R, 2.0, 1.0) * bump(b, pi / 4, pi / 8);
      },
      Parity::odd_odd());
  for (double sigma : {0.99, 1.0 + 1e-3}) {
    const double bound = 16.0 * std::pow(std::sin(pi / 4), -sigma);
    CHECK(weighted_L2_3d(f, sigma, 1e-2).value <= std::sqrt(bound) * l2_norm(f));
  }
  // sin(2b) on R in [1, 2]: sin^{2 - sigma} is integrable
  ScalarField h = ScalarField::from_function(
      g, [](double R, double b) { return (R >= 1.0 && R <= 2.0) ? std::sin(2.0 * b) : 0.0; },
      Parity::odd_odd());
  const double v = weighted_L2_3d(h, 1.0 + 1e-3, 1e-2).value;
  CHECK(std::isfinite(v));
  CHECK(v > 0.0);
}

TEST_CASE("beta projections") {
  auto g = quarter(64, 65);
  const RadialProfile phi = make_bump(g, 2.0, 1.0);
  const ScalarField f2 = ScalarField::separable(phi, [](double b) { return std::sin(2.0 * b); },
                                                Parity::odd_odd());
  const ScalarField f4 = ScalarField::separable(phi, [](double b) { return std::sin(4.0 * b); },
                                                Parity::odd_odd());
  const RadialProfile p2 = beta_project(f2, 2);
  const RadialProfile p24 = beta_project(f4, 2);
  for (std::size_t i = 0; i < g->nR(); ++i) {
    CHECK(std::abs(p2.v[i] - phi.v[i]) < 1e-10);
    CHECK(std::abs(p24.v[i]) < 1e-10);
  }

  const ScalarField mix = ScalarField::from_function(
      g,
      [&](double R, double b) { return bump(R, 2.0, 1.0) * (0.7 * std::sin(2 * b) - 0.2 * std::sin(6 * b)); },
      Parity::odd_odd());
  const RadialProfile a2 = beta_project(mix, 2), a6 = beta_project(mix, 6);
  for (std::size_t i = 0; i < g->nR(); ++i) {
    CHECK(a2.v[i] == doctest::Approx(0.7 * phi.v[i]).epsilon(1e-10));
    CHECK(a6.v[i] == doctest::Approx(-0.2 * phi.v[i]).epsilon(1e-10));
  }
  CHECK_THROWS(beta_project(mix, 0));
}

TEST_CASE("Parseval over the circle") {
  auto g = quarter(128, 65);
  const ScalarField mix = ScalarField::from_function(
      g,
      [](double R, double b) { return bump(R, 2.0, 1.0) * (std::sin(2 * b) + 0.3 * std::sin(6 * b)); },
      Parity::odd_odd());
  double coeff = 0.0;
  for (int n : {2, 6, 10}) {
    const RadialProfile c = beta_project(mix, n);
    const double l = l2_norm_dR(c);
    coeff += pi * l * l;
  }
  const double total = l2_norm(mix);
  CHECK(total * total == doctest::Approx(coeff).epsilon(1e-10));
}

TEST_CASE("norm homogeneity, triangle inequality and monotonicity in k") {
  auto g = quarter(16, 9);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> d;
  auto random_field = [&]() {
    ScalarField f(g, Parity::odd_odd());
    for (auto& x : f.v) x = d(rng);
    return f;
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const ScalarField a = random_field(), b = random_field();
    const int k = trial % 4;
    const double na = calHk_norm(a, k).value, nb = calHk_norm(b, k).value;
    CHECK(calHk_norm(a + b, k).value <= (na + nb) * (1.0 + 1e-12));
    CHECK(linf_norm(a + b).value <= linf_norm(a).value + linf_norm(b).value);
    if (trial % 50 == 0) {
      const double c = -3.7;
      CHECK(calHk_norm(c * a, k).value == doctest::Approx(std::abs(c) * na).epsilon(1e-12));
      CHECK(calWk_norm(c * a, k).value ==
            doctest::Approx(std::abs(c) * calWk_norm(a, k).value).epsilon(1e-12));
      CHECK(calHk_norm(a, k + 1).value >= na);
    }
  }
}

TEST_CASE("circle factor follows the parity classes") {
  auto g = quarter(16, 9);
  CHECK(circle_factor(*g, Parity::even_even()) == 4.0);
  CHECK(circle_factor(*g, Parity::odd_odd()) == 0.0);
  CHECK(circle_factor(*g, Parity::odd_even()) == 0.0);
  auto h = build_half_period_grid(0.05, 0.25, 8.0, 16, 16);
  CHECK(circle_factor(*h, Parity::none(), 1) == 2.0);
  CHECK(circle_factor(*h, Parity::none(), -1) == 0.0);
}
