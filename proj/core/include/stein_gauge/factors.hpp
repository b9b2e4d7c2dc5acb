#pragma once

#include "stein_gauge/smoothness.hpp"
#include "stein_gauge/targets.hpp"

namespace stein_gauge {

/// Scales (c1, c2, c3) of the M1, M2, M3 caps on Stein-equation solutions.
struct SteinFactors {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

/// Bounds (m1, m2, m3) on M1(h), M2(h), M3(h) of a test function.
struct TestFunctionBudget {
  double m1 = 1.0;
  double m2 = 1.0;
  double m3 = 1.0;
};

struct SolutionFactorBounds {
  double b1 = 0.0;  // bound on M1(u_h)
  double b2 = 0.0;  // bound on M2(u_h)
  double b3 = 0.0;  // bound on M3(u_h)
};

/// Derivative bounds on the Stein solution u_h for a strongly log-concave
/// target and a test function h with the given Lipschitz budget:
///   M1(u_h) <= (2/k) m1
///   M2(u_h) <= (2 L3/k^2) m1 + (1/k) m2
///   M3(u_h) <= (6 L3^2/k^3 + L4/k^2) m1 + (3 L3/k^2) m2 + (2/(3k)) m3
SolutionFactorBounds solution_factor_bounds(const SmoothnessBudget& budget, const TestFunctionBudget& h);

/// The factors for the smooth test class max(M1, M2, M3) <= 1, i.e.
/// solution_factor_bounds with h = (1, 1, 1).
SteinFactors classical_factors(const SmoothnessBudget& budget);

/// Closed form in sigma2 and the covariate norm sums; agrees with
/// classical_factors(smoothness_constants(target)).
SteinFactors logistic_factors(const LogisticTarget& target);

}  // namespace stein_gauge
