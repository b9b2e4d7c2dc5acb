#include "stein_gauge/factors.hpp"

#include <cmath>
#include <numbers>

#include "stein_gauge/errors.hpp"

namespace stein_gauge {

SolutionFactorBounds solution_factor_bounds(const SmoothnessBudget& budget, const TestFunctionBudget& h) {
  budget.validate();
  detail::require(h.m1 >= 0.0 && h.m2 >= 0.0 && h.m3 >= 0.0, "solution_factor_bounds",
                  "test function budget must be nonnegative");
  const double k = budget.k;
  const double l3 = budget.l3;
  const double l4 = budget.l4;
  SolutionFactorBounds b;
  b.b1 = (2.0 / k) * h.m1;
  b.b2 = (2.0 * l3 / (k * k)) * h.m1 + h.m2 / k;
  b.b3 = (6.0 * l3 * l3 / (k * k * k) + l4 / (k * k)) * h.m1 + (3.0 * l3 / (k * k)) * h.m2 + (2.0 / (3.0 * k)) * h.m3;
  return b;
}

SteinFactors classical_factors(const SmoothnessBudget& budget) {
  budget.validate();
  const double k = budget.k;
  const double l3 = budget.l3;
  const double l4 = budget.l4;
  return {2.0 / k, 2.0 * l3 / (k * k) + 1.0 / k,
          6.0 * l3 * l3 / (k * k * k) + (l4 + 3.0 * l3) / (k * k) + 2.0 / (3.0 * k)};
}

SteinFactors logistic_factors(const LogisticTarget& target) {
  const double s2 = target.sigma2();
  detail::require(s2 > 0.0, "logistic_factors", "sigma2 must be positive");
  const double s4 = s2 * s2;
  const double s6 = s4 * s2;
  const double n3 = target.sum_norm_cubed();
  const double n4 = target.sum_norm_fourth();
  constexpr double kSqrt3 = std::numbers::sqrt3;
  return {2.0 * s2, s4 * n3 / (3.0 * kSqrt3) + s2,
          s6 * n3 * n3 / 18.0 + s4 * n4 / 8.0 + s4 * n3 / (2.0 * kSqrt3) + 2.0 * s2 / 3.0};
}

}  // namespace stein_gauge
