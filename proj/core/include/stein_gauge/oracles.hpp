#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "stein_gauge/functions.hpp"
#include "stein_gauge/types.hpp"

namespace stein_gauge {

struct GapResult {
  double lhs = 0.0;
  double rhs = 0.0;

  double ratio() const { return rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0); }
  /// lhs <= rhs up to rounding: rel * rhs + abs.
  bool holds(double rel = 1e-9, double abs = 1e-12) const { return lhs <= rhs * (1.0 + rel) + abs; }
};

/// Both sides of the weighted second-order difference inequality
///   |l(h(x)-h(y)) - l'(h(x')-h(y')) - <grad h(y), l(x-y) - l'(x'-y')>|
///     <= m2/2 (2 l' |y-y'||x'-y'| + l |x-y|^2 + l' |x'-y'|^2).
/// Uses h.gradient and h.m2.
GapResult second_order_gap(const SmoothFunction& h, double lambda, double lambda_prime, ConstVectorRef x,
                           ConstVectorRef y, ConstVectorRef x_prime, ConstVectorRef y_prime);

struct EightPoints {
  Vector x, y, z, w;
  Vector x_prime, y_prime, z_prime, w_prime;
};

/// Both sides of the weighted third-order difference inequality; the rhs is
/// m2 times its M2 group plus m3 times its M3 group.
GapResult third_order_gap(const SmoothFunction& h, double lambda, double lambda_prime, const EightPoints& p);

/// max over pairs of |D^(k-1) f(x) - D^(k-1) f(y)|_op / |x - y|, with
/// derivatives by central differences (step 1e-4 for orders 1-2, 1e-3 for
/// order 3). A lower estimate of M_k(f). Pairs with x = y are skipped.
double estimate_lipschitz_constant(const std::function<double(ConstVectorRef)>& f, int order,
                                   const std::vector<std::pair<Vector, Vector>>& pairs);

/// c + <a, x> + x'Bx/2 + sum_j gamma_j <u_j, x>^3 / 6 with unit u_j.
/// M3 = sum |gamma_j|; M2 has no global bound once a cubic term is present,
/// but on the ball of radius R it is at most |B|_op + R sum |gamma_j|.
struct CubicPolynomial {
  double c = 0.0;
  Vector a;
  Matrix b;
  std::vector<double> gamma;
  std::vector<Vector> u;

  int degree() const;
  double value(ConstVectorRef x) const;
  Vector gradient(ConstVectorRef x) const;
  double m2_on_ball(double radius) const;
  double m3() const;
  /// SmoothFunction view with m2 valid on the ball of the given radius.
  SmoothFunction as_function(double radius) const;
};

/// Random polynomial of the given degree (1, 2 or 3) with N(0, 1)
/// coefficients; the draws come from counter stream (seed, stream).
CubicPolynomial random_polynomial(Eigen::Index d, int degree, std::uint64_t seed, std::uint64_t stream);

struct Lemma2SuiteConfig {
  std::size_t instances = 1000;
  std::uint64_t seed = 0;
  std::vector<Eigen::Index> dims{1, 2, 3};
  double point_scale = 2.0;  // points ~ N(0, point_scale^2 I)
  double log_weight_min = -2.302585092994046;  // log 0.1
  double log_weight_max = 2.302585092994046;   // log 10
  std::size_t equality_instances = 100;
};

struct Lemma2SuiteReport {
  std::size_t instances = 0;
  std::size_t second_violations = 0;
  std::size_t third_violations = 0;
  double worst_second_ratio = 0.0;
  double worst_third_ratio = 0.0;
  std::size_t equality_instances = 0;
  double equality_worst_rel_gap = 0.0;  // max |lhs - rhs| / rhs over quadratic equality cases
  bool passed = false;
};

/// Random-instance property suite for both difference inequalities, plus
/// the quadratic equality cases of the second-order bound.
Lemma2SuiteReport run_lemma2_suite(const Lemma2SuiteConfig& config);

}  // namespace stein_gauge
