#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nilab/init_data.hpp"
#include "nilab/integral_ops.hpp"
#include "nilab/norms.hpp"

using namespace nilab;
using std::numbers::pi;

namespace {

// smoothed indicator of [1, 2]
double box(double R) { return plateau(R, 0.9, 1.0, 2.0, 2.1); }

// int_R^inf box(s)/s ds by composite Simpson on 2e5 panels in log s
double box_tail(double R) {
  const double a = std::log(std::max(R, 0.9)), b = std::log(2.1);
  if (a >= b) return 0.0;
  const int n = 200000;
  const double h = (b - a) / n;
  double s = box(std::exp(a)) + box(std::exp(b));
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * box(std::exp(a + i * h));
  return s * h / 3.0;
}

double max_err_vs_box(std::size_t nR) {
  auto g = build_grid(1e-2, 8.0, nR, 8, Spacing::UniformR);
  const RadialProfile G = tail_log_integral(RadialProfile::from_function(g, box));
  double err = 0.0;
  for (std::size_t i = 0; i < g->nR(); i += std::max<std::size_t>(1, nR / 256))
    err = std::max(err, std::abs(G.v[i] - box_tail(g->R[i])));
  return err;
}

GridPtr quarter(std::size_t nR = 1024, std::size_t nB = 33, double alpha = 1e-2) {
  return build_grid(alpha, 8.0, nR, nB, Spacing::UniformR);
}

}  // namespace

TEST_CASE("tail integral examples") {
  auto g = quarter();
  const RadialProfile z = tail_log_integral(RadialProfile(g));
  CHECK(z.max_abs() == 0.0);

  // trapezoid on the steep C-infinity edges: about 2.5e-5 at 2048 nodes
  CHECK(max_err_vs_box(2048) < 3e-5);
  CHECK(max_err_vs_box(4096) < 1e-5);

  const RadialProfile G = tail_log_integral(make_bump(g, 2.0, 1.0));
  for (std::size_t i = 1; i < g->nR(); ++i) CHECK(G.v[i] <= G.v[i - 1]);
  CHECK(G.v.back() == 0.0);

  // uncertified support
  CHECK_THROWS_AS(tail_log_integral(make_bump(g, 4.5, 1.0)), std::domain_error);
}

TEST_CASE("tail integral converges at second order") {
  const double e1 = max_err_vs_box(256), e2 = max_err_vs_box(512);
  CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("op_L examples") {
  auto g = quarter(1024, 33);
  const RadialProfile f = RadialProfile::from_function(g, box);
  const ScalarField w2 = ScalarField::separable(f, [](double b) { return std::sin(2 * b); }, Parity::odd_odd());
  const ScalarField w4 = ScalarField::separable(f, [](double b) { return std::sin(4 * b); }, Parity::odd_odd());
  const RadialProfile L2 = op_L(w2), L4 = op_L(w4), G = tail_log_integral(f);
  for (std::size_t i = 0; i < g->nR(); ++i) {
    CHECK(std::abs(L4.v[i]) < 1e-10);
    CHECK(L2.v[i] == doctest::Approx(G.v[i]).epsilon(1e-12));
  }
  // a radial part is even about both ends, so its sin(2 beta) moment vanishes
  const ScalarField radial = ScalarField::radial(make_bump(g, 2.0, 0.5));
  CHECK(op_L(radial).max_abs() == 0.0);
  // a sum of unknown parity is read in the sin(2 beta) class (4 x the quarter integral)
  ScalarField w2n = w2;
  w2n.parity = Parity::none();
  const RadialProfile Ln = op_L(w2n);
  for (std::size_t i = 0; i < g->nR(); ++i) CHECK(Ln.v[i] == doctest::Approx(L2.v[i]).epsilon(1e-12));
}

TEST_CASE("op_L annihilates other modes and is nonnegative on nonnegative data") {
  auto g = quarter(512, 65);
  const RadialProfile f = make_bump(g, 2.0, 1.0);
  for (int n : {1, 3, 4, 6}) {
    // sin(n beta) is odd at 0 and, about pi/2, even for odd n and odd for even n
    const Parity p{-1, n % 2 == 1 ? 1 : -1};
    const ScalarField w = ScalarField::from_function(
        g, [n](double R, double b) { return bump(R, 2.0, 1.0) * std::sin(n * b); }, p);
    CHECK(op_L(w).max_abs() < 1e-10);
  }
  const RadialProfile L = op_L(ScalarField::separable(f, [](double b) { return std::sin(2 * b); },
                                                      Parity::odd_odd()));
  for (double x : L.v) CHECK(x >= 0.0);
}

TEST_CASE("op_L12 examples") {
  auto g = quarter(1024, 65);
  const RadialProfile f = make_bump(g, 2.0, 1.0);
  const ScalarField w = ScalarField::separable(
      f, [](double b) { return std::sin(2 * b) * std::cos(b); }, Parity::odd_even());
  // c_beta by an independent midpoint rule over [0, 2 pi]
  double cb = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const double b = 2 * pi * (k + 0.5) / n;
    const double s = std::sin(2 * b) * std::cos(b);
    cb += s * s;
  }
  cb *= 2 * pi / n;
  const RadialProfile L = op_L12(w), G = tail_log_integral(f);
  for (std::size_t i = 0; i < g->nR(); ++i)
    CHECK(L.v[i] == doctest::Approx(3.0 / (8 * pi) * cb * G.v[i]).epsilon(1e-9));

  CHECK(op_L12(ScalarField::radial(f)).max_abs() < 1e-14);
  for (double x : L.v) CHECK(x >= 0.0);
}

TEST_CASE("op_Ralpha examples") {
  for (double a : {0.25, 1e-1, 1e-2}) {
    auto g = build_grid(a, 8.0, 2048, 33, Spacing::LogR, 1e-2);
    const double R0 = 2.0;
    const ScalarField w = ScalarField::from_function(
        g, [R0](double R, double b) { return R <= R0 ? 3.0 * std::sin(2 * b) : 0.0; }, Parity::odd_odd());
    const RadialProfile Rr = op_Ralpha(w, a);
    std::size_t i0 = 0;
    while (g->R[i0 + 1] <= R0) ++i0;
    CAPTURE(a);
    CHECK(Rr.v[i0] == doctest::Approx(3.0 / 16.0).epsilon(1e-3));
  }
  auto g = quarter();
  CHECK(op_Ralpha(ScalarField(g, Parity::odd_odd()), 1e-2).max_abs() == 0.0);
  CHECK_THROWS(op_Ralpha(ScalarField(g, Parity::odd_odd()), 0.3));
}

TEST_CASE("Hardy ratio of R^alpha is uniform in alpha") {
  std::vector<double> ratios;
  for (double a : {1e-1, 1e-2, 1e-3}) {
    auto g = build_grid(a, 8.0, 4096, 33, Spacing::LogR, 1e-2);
    const RadialProfile f = RadialProfile::from_function(g, box);
    const ScalarField w = ScalarField::separable(f, [](double b) { return std::sin(2 * b); }, Parity::odd_odd());
    const ScalarField Rw = ScalarField::separable(op_Ralpha(w, a), [](double b) { return std::sin(2 * b); },
                                                  Parity::odd_odd());
    ratios.push_back(l2_norm(Rw) / l2_norm(w));
  }
  const double hi = *std::max_element(ratios.begin(), ratios.end());
  const double lo = *std::min_element(ratios.begin(), ratios.end());
  CHECK(hi < 1.0);
  CHECK((hi - lo) / hi < 0.5);
}

TEST_CASE("integral operators are linear") {
  auto g = quarter(256, 17);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 20; ++t) {
    const double c1 = u(rng), c2 = u(rng);
    const ScalarField a = ScalarField::from_function(
        g, [&](double R, double b) { return bump(R, 2.0 + 0.3 * c1, 1.0) * std::sin(2 * b) * (1 + std::cos(b)); },
        Parity::none());
    const ScalarField b = ScalarField::from_function(
        g, [&](double R, double bb) { return bump(R, 1.5, 0.5 + 0.2 * c2) * std::sin(2 * bb); }, Parity::odd_odd());
    ScalarField sum = c1 * a + c2 * b;
    sum.parity = Parity::none();
    ScalarField b_none = b;
    b_none.parity = Parity::none();
    const RadialProfile l = op_L(sum), la = op_L(a), lb = op_L(b_none);
    const RadialProfile r = op_Ralpha(sum, 1e-2), ra = op_Ralpha(a, 1e-2), rb = op_Ralpha(b_none, 1e-2);
    for (std::size_t i = 0; i < g->nR(); ++i) {
      CHECK(std::abs(l.v[i] - (c1 * la.v[i] + c2 * lb.v[i])) <= 1e-10 * (1 + std::abs(l.v[i])));
      CHECK(std::abs(r.v[i] - (c1 * ra.v[i] + c2 * rb.v[i])) <= 1e-10 * (1 + std::abs(r.v[i])));
    }
  }
}
