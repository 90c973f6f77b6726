// Time integration of the radial closures dX/dt(R) = coef * int_R^inf g0(s)/s rate(X(s)/alpha) ds
// shared by the 2d (I, rate = h) and 3d (J, rate = K) leading order models.
#pragma once

#include <functional>
#include <vector>

#include "nilab/grid.hpp"

namespace nilab {

struct ClosureSpec {
  double coef = 1.0;
  std::function<double(double)> rate;
  double rate_max = 1.0;  // sup |rate|, sets the step bound alpha / (10 coef rate_max |G0|_inf)
  std::size_t max_substeps = 1000000;
};

struct ClosureRun {
  std::vector<double> times;
  std::vector<RadialProfile> X;
  std::size_t substeps = 0;
  double dt_max = 0.0;
};

// Right-hand side coef * tail(g0 * rate(X / alpha)).
RadialProfile closure_rhs(const RadialProfile& g0, double alpha, const RadialProfile& X,
                          const ClosureSpec& spec);

ClosureRun evolve_closure(const RadialProfile& g0, double alpha, const std::vector<double>& times,
                          const ClosureSpec& spec);

// Cumulative trapezoid in time of per-snapshot profiles.
std::vector<RadialProfile> cumulative_time_integral(const std::vector<double>& times,
                                                    const std::vector<RadialProfile>& f);

// beta0 with tan(beta0) = tan(beta) e^{-x}, same quadrant as beta.
double transported_beta(double beta, double x);

// sin(2 beta0) where tan(beta0) = tan(beta) e^{-x}; overflow-safe for any sign of x.
double transported_sin2beta(double beta, double x);

}  // namespace nilab
