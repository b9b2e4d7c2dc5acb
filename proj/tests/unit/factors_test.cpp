#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "stein_gauge/errors.hpp"
#include "stein_gauge/factors.hpp"
#include "test_support.hpp"

using namespace stein_gauge;

namespace {

void expect_factors(const SteinFactors& f, double c1, double c2, double c3, double tol = 1e-12) {
  EXPECT_NEAR(f.c1, c1, tol);
  EXPECT_NEAR(f.c2, c2, tol);
  EXPECT_NEAR(f.c3, c3, tol);
}

LogisticTarget unit_datapoints(double sigma2, Eigen::Index count, double norm) {
  Matrix v = Matrix::Zero(count, 2);
  v.col(0).setConstant(norm);
  return LogisticTarget(sigma2, v, Vector::Ones(count));
}

}  // namespace

TEST(SolutionFactorBounds, Examples) {
  auto b = solution_factor_bounds({1.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  EXPECT_DOUBLE_EQ(b.b1, 2.0);
  EXPECT_DOUBLE_EQ(b.b2, 1.0);
  EXPECT_DOUBLE_EQ(b.b3, 2.0 / 3.0);
  b = solution_factor_bounds({2.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  EXPECT_DOUBLE_EQ(b.b1, 1.0);
  EXPECT_DOUBLE_EQ(b.b2, 0.5);
  EXPECT_DOUBLE_EQ(b.b3, 1.0 / 3.0);
  b = solution_factor_bounds({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
  EXPECT_DOUBLE_EQ(b.b1, 2.0);
  EXPECT_DOUBLE_EQ(b.b2, 3.0);
  EXPECT_NEAR(b.b3, 10.666667, 1e-6);
}

TEST(SolutionFactorBounds, SeparateTestFunctionBudgets) {
  const SmoothnessBudget s{0.5, 0.3, 0.7};
  const auto b = solution_factor_bounds(s, {2.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(b.b1, 8.0);
  EXPECT_DOUBLE_EQ(b.b2, 2.0 * 0.3 / 0.25 * 2.0);
  EXPECT_NEAR(b.b3, (6.0 * 0.09 / 0.125 + 0.7 / 0.25) * 2.0, 1e-12);
  const auto only3 = solution_factor_bounds(s, {0.0, 0.0, 3.0});
  EXPECT_EQ(only3.b1, 0.0);
  EXPECT_EQ(only3.b2, 0.0);
  EXPECT_DOUBLE_EQ(only3.b3, 2.0 / 1.5 * 3.0);
}

TEST(SolutionFactorBounds, RejectsBadBudget) {
  EXPECT_THROW(solution_factor_bounds({0.0, 0.0, 0.0}, {}), InputError);
  EXPECT_THROW(solution_factor_bounds({-1.0, 0.0, 0.0}, {}), InputError);
  EXPECT_THROW(solution_factor_bounds({1.0, -0.1, 0.0}, {}), InputError);
  EXPECT_THROW(solution_factor_bounds({1.0, 0.0, 0.0}, {-1.0, 1.0, 1.0}), InputError);
  EXPECT_THROW(classical_factors({0.0, 0.0, 0.0}), InputError);
}

TEST(ClassicalFactors, Examples) {
  expect_factors(classical_factors({1.0, 0.0, 0.0}), 2.0, 1.0, 2.0 / 3.0);
  expect_factors(classical_factors({1.0, 1.0, 1.0}), 2.0, 3.0, 6.0 + 4.0 + 2.0 / 3.0);
  expect_factors(classical_factors({0.5, 0.0, 0.0}), 4.0, 2.0, 4.0 / 3.0);
}

TEST(ClassicalFactors, EqualsSolutionBoundsForUnitBudget) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.05, 5.0);
  for (int i = 0; i < 100; ++i) {
    const SmoothnessBudget s{u(rng), u(rng), u(rng)};
    const auto c = classical_factors(s);
    const auto b = solution_factor_bounds(s, {1.0, 1.0, 1.0});
    EXPECT_NEAR(c.c1, b.b1, 1e-14 * c.c1);
    EXPECT_NEAR(c.c2, b.b2, 1e-14 * c.c2);
    EXPECT_NEAR(c.c3, b.b3, 1e-14 * c.c3);
  }
}

TEST(ClassicalFactors, Monotone) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.05, 5.0);
  for (int i = 0; i < 200; ++i) {
    const SmoothnessBudget s{u(rng), u(rng), u(rng)};
    const auto base = classical_factors(s);
    const auto more_k = classical_factors({s.k + u(rng), s.l3, s.l4});
    const auto more_l3 = classical_factors({s.k, s.l3 + u(rng), s.l4});
    const auto more_l4 = classical_factors({s.k, s.l3, s.l4 + u(rng)});
    EXPECT_LE(more_k.c1, base.c1);
    EXPECT_LE(more_k.c2, base.c2);
    EXPECT_LE(more_k.c3, base.c3);
    EXPECT_GE(more_l3.c2, base.c2);
    EXPECT_GE(more_l3.c3, base.c3);
    EXPECT_EQ(more_l3.c1, base.c1);
    EXPECT_GE(more_l4.c3, base.c3);
    EXPECT_EQ(more_l4.c2, base.c2);
  }
}

TEST(LogisticFactors, Examples) {
  const auto f1 = logistic_factors(unit_datapoints(1.0, 1, 1.0));
  expect_factors(f1, 2.0, 1.0 / (3.0 * std::numbers::sqrt3) + 1.0,
                 1.0 / 18.0 + 1.0 / 8.0 + 1.0 / (2.0 * std::numbers::sqrt3) + 2.0 / 3.0);
  EXPECT_NEAR(f1.c2, 1.192450, 1e-6);
  EXPECT_NEAR(f1.c3, 1.1358974, 1e-6);

  expect_factors(logistic_factors(LogisticTarget::prior_only(2, 1.0)), 2.0, 1.0, 2.0 / 3.0);

  const auto f2 = logistic_factors(unit_datapoints(2.0, 1, 1.0));
  EXPECT_NEAR(f2.c1, 4.0, 1e-12);
  EXPECT_NEAR(f2.c2, 2.769800, 1e-6);
  EXPECT_NEAR(f2.c3, 3.4324783, 1e-6);
}

TEST(LogisticFactors, AgreeWithClassicalFactors) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  std::uniform_int_distribution<int> count(0, 8), dim(1, 4);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index d = dim(rng), n = count(rng);
    Matrix v(n, d);
    Vector y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      v.row(r) = stein_gauge::testing::random_vector(rng, d, u(rng)).transpose();
      y(r) = coin(rng) ? 1.0 : 0.0;
    }
    const LogisticTarget t(u(rng), v, y);
    const auto a = logistic_factors(t);
    const auto b = classical_factors(smoothness_constants(t));
    EXPECT_NEAR(a.c1, b.c1, 1e-12 * b.c1);
    EXPECT_NEAR(a.c2, b.c2, 1e-12 * b.c2);
    EXPECT_NEAR(a.c3, b.c3, 1e-12 * b.c3);
  }
}
