// Scaled polar grid (R = r^alpha, beta) and fields sampled on it.
#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace nilab {

enum class Spacing { UniformR, LogR };

// Quarter: beta in [0, pi/2] with both endpoints. HalfPeriod: beta_j = j*pi/nB,
// periodic with period pi (used by the full 2d solver, whose fields are not
// confined to one symmetry class).
enum class BetaDomain { Quarter, HalfPeriod };

struct Grid {
  double alpha = 0.0;
  std::vector<double> R;
  std::vector<double> beta;
  Spacing spacing = Spacing::UniformR;
  BetaDomain domain = BetaDomain::Quarter;
  double hR = 0.0;     // dR for UniformR, d(log R) for LogR
  double hbeta = 0.0;

  std::size_t nR() const { return R.size(); }
  std::size_t nB() const { return beta.size(); }
  std::size_t size() const { return R.size() * beta.size(); }
  double R_max() const { return R.back(); }
};

using GridPtr = std::shared_ptr<const Grid>;

// R_min <= 0 selects the default first node R_max / nR.
GridPtr build_grid(double alpha, double R_max, std::size_t nR, std::size_t nB,
                   Spacing spacing, double R_min = 0.0);
GridPtr build_half_period_grid(double alpha, double R_min, double R_max,
                               std::size_t nR, std::size_t nB);

// Parity under beta -> -beta (at_zero) and beta -> pi - beta (at_half_pi).
// +1 even, -1 odd, 0 unknown.
struct Parity {
  int at_zero = 0;
  int at_half_pi = 0;

  static constexpr Parity odd_odd() { return {-1, -1}; }
  static constexpr Parity even_even() { return {1, 1}; }
  static constexpr Parity odd_even() { return {-1, 1}; }
  static constexpr Parity even_odd() { return {1, -1}; }
  static constexpr Parity none() { return {0, 0}; }

  bool known() const { return at_zero != 0 && at_half_pi != 0; }
  Parity flipped() const { return {-at_zero, -at_half_pi}; }
  Parity operator*(Parity o) const {
    return {at_zero * o.at_zero, at_half_pi * o.at_half_pi};
  }
  bool operator==(const Parity&) const = default;
};

struct RadialProfile {
  GridPtr grid;
  std::vector<double> v;

  RadialProfile() = default;
  explicit RadialProfile(GridPtr g);
  RadialProfile(GridPtr g, std::vector<double> values);
  static RadialProfile from_function(GridPtr g, const std::function<double(double)>& f);

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  std::size_t size() const { return v.size(); }
  double max_abs() const;
};

struct ScalarField {
  GridPtr grid;
  std::vector<double> v;  // row-major, v[i * nB + j] = f(R_i, beta_j)
  Parity parity;

  ScalarField() = default;
  ScalarField(GridPtr g, Parity p);
  ScalarField(GridPtr g, std::vector<double> values, Parity p);
  static ScalarField from_function(GridPtr g, const std::function<double(double, double)>& f,
                                   Parity p);
  // f(R) * w(beta)
  static ScalarField separable(const RadialProfile& f, const std::function<double(double)>& w,
                               Parity p);
  static ScalarField radial(const RadialProfile& f);

  double& at(std::size_t i, std::size_t j) { return v[i * grid->nB() + j]; }
  double at(std::size_t i, std::size_t j) const { return v[i * grid->nB() + j]; }
  std::size_t size() const { return v.size(); }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double c);
  double max_abs() const;
  bool all_finite() const;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double c, ScalarField a);
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

// Function R^{power/alpha} * base, with the power kept symbolic.
struct PrefactoredField {
  ScalarField base;
  int power = 0;

  // Multiplies out the prefactor; throws if the result leaves the double range.
  ScalarField materialize() const;
};

enum class Axis { X, Y };

std::pair<double, double> to_scaled(double x, double y, double alpha);
std::pair<double, double> from_scaled(double R, double beta, double alpha);

// Chain rule: d_x = R^{-1/alpha}(cos b * alpha R d_R - sin b * d_b),
//             d_y = R^{-1/alpha}(sin b * alpha R d_R + cos b * d_b).
// Applied to R^{m/alpha} b this gives R^{(m-1)/alpha} times a plain field.
// On half-period grids one application flips the sign under beta -> beta + pi,
// so the result must not be fed back through the periodic beta stencil.
PrefactoredField cartesian_derivative(const PrefactoredField& f, Axis which);
PrefactoredField cartesian_derivative(const ScalarField& f, Axis which);

// Finite-difference derivatives (4th order interior).
ScalarField d_dR(const ScalarField& f);
ScalarField R_dR(const ScalarField& f);   // R d/dR (= d/ds on log grids)
ScalarField d_dbeta(const ScalarField& f);
RadialProfile d_dR(const RadialProfile& f);
RadialProfile R_dR(const RadialProfile& f);

// Trapezoid weights in R (measure dR) and in beta over the stored nodes.
std::vector<double> radial_weights(const Grid& g);
std::vector<double> beta_weights(const Grid& g);

}  // namespace nilab
