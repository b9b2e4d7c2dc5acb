#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stein_gauge/functions.hpp"
#include "stein_gauge/quadrature.hpp"
#include "stein_gauge/types.hpp"

namespace stein_gauge {

/// E||G||_2 for G ~ N(0, I_d): sqrt(2) Gamma((d+1)/2) / Gamma(d/2).
double expected_gaussian_norm(Eigen::Index d);

/// Upper bound on W1 from a bound S on the smooth-function distance:
/// 3 max(S, (S sqrt(2) (E||G||)^2)^(1/3)).
double wasserstein_upper(double d_smooth, Eigen::Index d);

struct LowerBoundCheck {
  bool passed = true;
  std::vector<std::string> violations;
};

/// Checks max(d_bl, d_smooth) <= w1 for metrics of one pair of measures.
LowerBoundCheck lower_bounds(double d_smooth, double d_bl, double w1);

/// W1 between equal-weight empirical measures with the same number of
/// atoms: mean |a_(i) - b_(i)| over sorted order. Inputs need not be sorted.
double wasserstein_1d_exact(std::span<const double> a, std::span<const double> b);

struct MetricReport {
  double d_smooth_upper = 0.0;
  double w1_upper = 0.0;
  double bl_upper = 0.0;  // min(w1_upper, 2): test functions are bounded by 1
  Eigen::Index dim = 0;
  double e_norm_g = 0.0;
};

MetricReport metric_report(double d_smooth_upper, Eigen::Index d);

struct SmoothedValue {
  double value = 0.0;
  double std_error = 0.0;  // 0 for deterministic rules
};

/// Default rule for h_t: dense trapezoid for d = 1, tensor Gauss-Hermite
/// (48 points per axis) for d = 2, Monte Carlo beyond.
QuadratureRule default_smoothing_rule(Eigen::Index d, std::size_t mc_draws = 20000, std::uint64_t seed = 0);

/// h_t(x) = E h(x + t G). With an anchor a the nodes are placed at a + t z
/// and reweighted by the density ratio, so the estimate is a smooth function
/// of x even for kinked h (needed for finite differences near a).
SmoothedValue smoothed_function(const SmoothFunction& h, double t, ConstVectorRef x, const QuadratureRule& rule,
                                std::optional<Vector> anchor = std::nullopt);

struct SmoothingOrderCheck {
  double estimate = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

struct SmoothingReport {
  double t = 0.0;
  double step = 0.0;
  std::size_t probes = 0;
  SmoothingOrderCheck m1, m2, m3;
  bool passed = true;
};

/// Estimates M1, M2, M3 of h_t by central differences of smoothed_function
/// along unit directions at each probe and compares them with
/// 1, sqrt(2/pi)/t and sqrt(2)/t^2. Requires M1(h) <= 1.
SmoothingReport verify_smoothing_derivative_bounds(const SmoothFunction& h, double t, const std::vector<Vector>& probes,
                                                   const QuadratureRule& rule,
                                                   const std::vector<Vector>& directions = {});

}  // namespace stein_gauge
