#include "stein_gauge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "stein_gauge/errors.hpp"

namespace stein_gauge {

double expected_gaussian_norm(Eigen::Index d) {
  detail::require(d >= 1, "expected_gaussian_norm", "dimension must be positive");
  const double h = static_cast<double>(d);
  return std::numbers::sqrt2 * std::exp(std::lgamma(0.5 * (h + 1.0)) - std::lgamma(0.5 * h));
}

double wasserstein_upper(double d_smooth, Eigen::Index d) {
  detail::require(std::isfinite(d_smooth) && d_smooth >= 0.0, "wasserstein_upper",
                  "smooth distance must be finite and nonnegative");
  const double e = expected_gaussian_norm(d);
  return 3.0 * std::max(d_smooth, std::cbrt(d_smooth * std::numbers::sqrt2 * e * e));
}

LowerBoundCheck lower_bounds(double d_smooth, double d_bl, double w1) {
  LowerBoundCheck out;
  auto flag = [&](const char* name, double v) {
    if (v > w1) {
      std::ostringstream msg;
      msg << name << " = " << v << " exceeds w1 = " << w1;
      out.violations.push_back(msg.str());
    }
  };
  flag("d_smooth", d_smooth);
  flag("d_bl", d_bl);
  out.passed = out.violations.empty();
  return out;
}

double wasserstein_1d_exact(std::span<const double> a, std::span<const double> b) {
  detail::require(a.size() == b.size(), "wasserstein_1d_exact", "sample counts differ");
  detail::require(!a.empty(), "wasserstein_1d_exact", "empty samples");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double total = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) total += std::abs(sa[i] - sb[i]);
  return total / static_cast<double>(sa.size());
}

MetricReport metric_report(double d_smooth_upper, Eigen::Index d) {
  MetricReport r;
  r.d_smooth_upper = d_smooth_upper;
  r.dim = d;
  r.e_norm_g = expected_gaussian_norm(d);
  r.w1_upper = wasserstein_upper(d_smooth_upper, d);
  r.bl_upper = std::min(r.w1_upper, 2.0);
  return r;
}

QuadratureRule default_smoothing_rule(Eigen::Index d, std::size_t mc_draws, std::uint64_t seed) {
  if (d == 1) return normal_trapezoid(12.0, 1e-3);
  if (d == 2) return tensor_gauss_hermite(2, 48);
  return monte_carlo_normal(d, mc_draws, seed);
}

SmoothedValue smoothed_function(const SmoothFunction& h, double t, ConstVectorRef x, const QuadratureRule& rule,
                                std::optional<Vector> anchor) {
  detail::require(std::isfinite(t) && t > 0.0, "smoothed_function", "t must be positive");
  detail::require(x.size() == rule.dim(), "smoothed_function", "rule dimension does not match x");
  detail::require(x.allFinite(), "smoothed_function", "x must be finite");
  const Vector a = anchor ? *anchor : Vector(x);
  detail::require(a.size() == x.size(), "smoothed_function", "anchor dimension does not match x");
  const Vector shift = (a - x) / t;
  const double shift_sq = shift.squaredNorm();
  const bool reweight = shift_sq > 0.0;

  double sum = 0.0, sum_sq = 0.0;
  Vector y(x.size());
  for (Eigen::Index m = 0; m < rule.size(); ++m) {
    const auto z = rule.nodes.col(m);
    y = a + t * z;
    const double v = h(y);
    if (!std::isfinite(v)) detail::throw_numeric("smoothed_function", "non-finite value of " + h.name);
    // phi(z + shift) / phi(z)
    const double ratio = reweight ? std::exp(-z.dot(shift) - 0.5 * shift_sq) : 1.0;
    const double term = v * ratio;
    sum += rule.weights(m) * term;
    sum_sq += rule.weights(m) * term * term;
  }
  SmoothedValue out;
  out.value = sum;
  if (rule.random) {
    const double n = static_cast<double>(rule.size());
    out.std_error = std::sqrt(std::max(0.0, sum_sq - sum * sum) / (n - 1.0));
  }
  return out;
}

namespace {

std::vector<Vector> default_directions(Eigen::Index d) {
  std::vector<Vector> dirs;
  for (Eigen::Index i = 0; i < d; ++i) dirs.push_back(Vector::Unit(d, i));
  if (d > 1) {
    dirs.push_back(Vector::Ones(d).normalized());
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
      Vector v = Vector::Zero(d);
      v(i) = 1.0;
      v(i + 1) = -1.0;
      dirs.push_back(v.normalized());
    }
  }
  return dirs;
}

}  // namespace

SmoothingReport verify_smoothing_derivative_bounds(const SmoothFunction& h, double t, const std::vector<Vector>& probes,
                                                   const QuadratureRule& rule, const std::vector<Vector>& directions) {
  detail::require(std::isfinite(t) && t > 0.0, "verify_smoothing_derivative_bounds", "t must be positive");
  detail::require(h.m1 <= 1.0, "verify_smoothing_derivative_bounds", "test function must satisfy M1(h) <= 1");
  const Eigen::Index d = rule.dim();
  const std::vector<Vector> dirs = directions.empty() ? default_directions(d) : directions;

  SmoothingReport r;
  r.t = t;
  r.step = std::max(1e-4, t * 1e-3);
  r.probes = probes.size();
  r.m1.bound = 1.0;
  r.m2.bound = std::sqrt(2.0 / std::numbers::pi) / t;
  r.m3.bound = std::numbers::sqrt2 / (t * t);

  const double e = r.step;
  double scale = 0.0;
  for (const auto& x : probes) {
    detail::require(x.size() == d, "verify_smoothing_derivative_bounds", "probe dimension mismatch");
    for (const auto& v0 : dirs) {
      const Vector v = v0.normalized();
      auto f = [&](double s) {
        const SmoothedValue sv = smoothed_function(h, t, x + s * v, rule, x);
        scale = std::max(scale, std::abs(sv.value));
        return sv.value;
      };
      const double f0 = f(0.0), p1 = f(e), m1 = f(-e), p2 = f(2 * e), m2 = f(-2 * e);
      r.m1.estimate = std::max(r.m1.estimate, std::abs(p1 - m1) / (2 * e));
      r.m2.estimate = std::max(r.m2.estimate, std::abs(p1 - 2 * f0 + m1) / (e * e));
      r.m3.estimate = std::max(r.m3.estimate, std::abs(p2 - 2 * p1 + 2 * m1 - m2) / (2 * e * e * e));
    }
  }
  // Relative slack for truncation and quadrature error plus the rounding
  // floor of each stencil. Monte Carlo rules reuse the same draws at every
  // stencil point, so their noise enters through the anchor reweighting only.
  const double eps = 64.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);
  const double rel = rule.random ? 2e-2 : 1e-3;
  r.m1.tolerance = rel * r.m1.bound + eps / e;
  r.m2.tolerance = rel * r.m2.bound + 4.0 * eps / (e * e);
  r.m3.tolerance = rel * r.m3.bound + 6.0 * eps / (e * e * e);
  for (auto* c : {&r.m1, &r.m2, &r.m3}) c->passed = c->estimate <= c->bound + c->tolerance;
  r.passed = r.m1.passed && r.m2.passed && r.m3.passed;
  return r;
}

}  // namespace stein_gauge
