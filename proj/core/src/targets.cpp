#include "stein_gauge/targets.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "stein_gauge/errors.hpp"

namespace stein_gauge {

void SmoothnessBudget::validate() const {
  detail::require(std::isfinite(k) && k > 0.0, "SmoothnessBudget", "k must be positive and finite");
  detail::require(std::isfinite(l3) && l3 >= 0.0, "SmoothnessBudget", "l3 must be nonnegative and finite");
  detail::require(std::isfinite(l4) && l4 >= 0.0, "SmoothnessBudget", "l4 must be nonnegative and finite");
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

// ---------------------------------------------------------------------------

void Target::check_point(ConstVectorRef x, const char* where) const {
  if (x.size() != dim()) {
    detail::throw_input(where, "point has dimension " + std::to_string(x.size()) + ", target has " +
                                   std::to_string(dim()));
  }
  if (!x.allFinite()) detail::throw_numeric(where, "point has non-finite components");
}

Vector Target::grad_log_p(ConstVectorRef x) const {
  check_point(x, "grad_log_p");
  Vector out(dim());
  grad_into(x, out);
  return out;
}

void Target::grad_log_p_batch(ConstMatrixRef points, MatrixRef out) const {
  for (Eigen::Index j = 0; j < points.cols(); ++j) grad_into(points.col(j), out.col(j));
}

Vector grad_log_p(const Target& target, ConstVectorRef x) { return target.grad_log_p(x); }

SmoothnessBudget smoothness_constants(const Target& target) {
  SmoothnessBudget b = target.smoothness();
  b.validate();
  return b;
}

// ---------------------------------------------------------------------------

GaussianTarget::GaussianTarget(Vector mean, Matrix precision)
    : mean_(std::move(mean)), precision_(std::move(precision)) {
  detail::require(mean_.size() >= 1, "GaussianTarget", "dimension must be positive");
  detail::require(precision_.rows() == mean_.size() && precision_.cols() == mean_.size(), "GaussianTarget",
                  "precision must be d x d");
  detail::require(mean_.allFinite() && precision_.allFinite(), "GaussianTarget", "parameters must be finite");
  const double scale = std::max(1.0, precision_.cwiseAbs().maxCoeff());
  detail::require((precision_ - precision_.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, "GaussianTarget",
                  "precision must be symmetric");
  precision_ = 0.5 * (precision_ + precision_.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(precision_, Eigen::EigenvaluesOnly);
  min_eigenvalue_ = eig.eigenvalues().minCoeff();
  detail::require(min_eigenvalue_ > 0.0, "GaussianTarget", "precision must be positive definite");
}

GaussianTarget GaussianTarget::standard(Eigen::Index dim) { return isotropic(dim, 1.0); }

GaussianTarget GaussianTarget::isotropic(Eigen::Index dim, double precision) {
  detail::require(dim >= 1, "GaussianTarget::isotropic", "dimension must be positive");
  return GaussianTarget(Vector::Zero(dim), precision * Matrix::Identity(dim, dim));
}

void GaussianTarget::grad_into(ConstVectorRef x, Eigen::Ref<Vector> out) const {
  out.noalias() = -precision_ * (x - mean_);
}

// Batch gradients use fixed-order scalar loops so that every column is
// computed by the same instruction sequence: identical starts stay
// bit-identical under synchronous coupling.
void GaussianTarget::grad_log_p_batch(ConstMatrixRef points, MatrixRef out) const {
  const Eigen::Index d = dim();
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) acc += precision_(i, k) * (points(k, j) - mean_(k));
      out(i, j) = -acc;
    }
  }
}

Vector GaussianTarget::hess_log_p_action(ConstVectorRef x, ConstVectorRef v) const {
  check_point(x, "GaussianTarget::hess_log_p_action");
  detail::require(v.size() == dim(), "GaussianTarget::hess_log_p_action", "direction dimension mismatch");
  return -precision_ * v;
}

double GaussianTarget::log_density_unnormalized(ConstVectorRef x) const {
  check_point(x, "GaussianTarget::log_density_unnormalized");
  const Vector r = x - mean_;
  return -0.5 * r.dot(precision_ * r);
}

// ---------------------------------------------------------------------------

LogisticTarget::LogisticTarget(double sigma2, Matrix covariates, Vector labels)
    : sigma2_(sigma2), dim_(covariates.cols()), covariates_(std::move(covariates)), labels_(std::move(labels)) {
  detail::require(std::isfinite(sigma2_) && sigma2_ > 0.0, "LogisticTarget", "sigma2 must be positive");
  detail::require(dim_ >= 1, "LogisticTarget", "dimension must be positive");
  detail::require(labels_.size() == covariates_.rows(), "LogisticTarget", "one label per covariate row required");
  detail::require(covariates_.allFinite(), "LogisticTarget", "covariates must be finite");
  for (Eigen::Index l = 0; l < labels_.size(); ++l) {
    detail::require(labels_(l) == 0.0 || labels_(l) == 1.0, "LogisticTarget",
                    "labels must be 0 or 1 (row " + std::to_string(l) + ")");
  }
  for (Eigen::Index l = 0; l < covariates_.rows(); ++l) {
    const double n2 = covariates_.row(l).squaredNorm();
    sum_norm3_ += n2 * std::sqrt(n2);
    sum_norm4_ += n2 * n2;
  }
}

LogisticTarget LogisticTarget::prior_only(Eigen::Index dim, double sigma2) {
  return LogisticTarget(sigma2, Matrix(0, dim), Vector(0));
}

SmoothnessBudget LogisticTarget::smoothness() const {
  return {1.0 / sigma2_, sum_norm3_ / (6.0 * std::numbers::sqrt3), sum_norm4_ / 8.0};
}

void LogisticTarget::grad_into(ConstVectorRef x, Eigen::Ref<Vector> out) const {
  out = -x / sigma2_;
  for (Eigen::Index l = 0; l < covariates_.rows(); ++l) {
    const double t = covariates_.row(l).dot(x);
    out += (labels_(l) - sigmoid(t)) * covariates_.row(l).transpose();
  }
}

void LogisticTarget::grad_log_p_batch(ConstMatrixRef points, MatrixRef out) const {
  const Eigen::Index d = dim_;
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    for (Eigen::Index i = 0; i < d; ++i) out(i, j) = -points(i, j) / sigma2_;
    for (Eigen::Index l = 0; l < covariates_.rows(); ++l) {
      double t = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) t += covariates_(l, i) * points(i, j);
      const double residual = labels_(l) - sigmoid(t);
      for (Eigen::Index i = 0; i < d; ++i) out(i, j) += residual * covariates_(l, i);
    }
  }
}

Vector LogisticTarget::hess_log_p_action(ConstVectorRef x, ConstVectorRef v) const {
  check_point(x, "LogisticTarget::hess_log_p_action");
  detail::require(v.size() == dim(), "LogisticTarget::hess_log_p_action", "direction dimension mismatch");
  Vector out = -v / sigma2_;
  for (Eigen::Index l = 0; l < covariates_.rows(); ++l) {
    const double s = sigmoid(covariates_.row(l).dot(x));
    out -= s * (1.0 - s) * covariates_.row(l).dot(v) * covariates_.row(l).transpose();
  }
  return out;
}

double LogisticTarget::log_density_unnormalized(ConstVectorRef x) const {
  check_point(x, "LogisticTarget::log_density_unnormalized");
  double value = -x.squaredNorm() / (2.0 * sigma2_);
  for (Eigen::Index l = 0; l < covariates_.rows(); ++l) {
    const double t = covariates_.row(l).dot(x);
    value += labels_(l) * t - softplus(t);
  }
  return value;
}

// ---------------------------------------------------------------------------

double third_derivative_kernel(double s) { return s * (1.0 - s) * (1.0 - 2.0 * s); }

double fourth_derivative_kernel(double s) { return s * (1.0 - s) * (1.0 - 6.0 * s + 6.0 * s * s); }

std::vector<double> default_kernel_grid() {
  constexpr int kSteps = 40000;
  std::vector<double> grid(kSteps + 1);
  for (int i = 0; i <= kSteps; ++i) grid[i] = -20.0 + 40.0 * i / kSteps;
  return grid;
}

DerivativeKernelReport verify_derivative_bounds(const std::vector<double>& grid) {
  DerivativeKernelReport r;
  r.third_bound = 1.0 / (6.0 * std::numbers::sqrt3);
  r.fourth_bound = 0.125;
  r.third_max = -1.0;
  r.fourth_max = -1.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double max_gap = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    lo = std::min(lo, t);
    hi = std::max(hi, t);
    if (i > 0) max_gap = std::max(max_gap, std::abs(t - grid[i - 1]));
    const double s = sigmoid(t);
    const double k3 = third_derivative_kernel(s);
    const double k4 = fourth_derivative_kernel(s);
    if (std::abs(k3) > r.third_max) {
      r.third_max = std::abs(k3);
      r.third_argmax = t;
      r.third_at_argmax = k3;
    }
    if (std::abs(k4) > r.fourth_max) {
      r.fourth_max = std::abs(k4);
      r.fourth_argmax = t;
      r.fourth_at_argmax = k4;
    }
  }
  if (grid.empty()) {
    r.third_max = r.fourth_max = 0.0;
    return r;
  }
  r.covers_reference_range = lo <= -20.0 && hi >= 20.0 && max_gap <= 1e-3 * (1.0 + 1e-9);
  r.confirmed = r.covers_reference_range && std::abs(r.third_max - r.third_bound) <= 1e-6 &&
                std::abs(r.fourth_max - r.fourth_bound) <= 1e-6;
  return r;
}

DerivativeKernelReport verify_derivative_bounds(const LogisticTarget& target, const std::vector<double>& grid) {
  DerivativeKernelReport r = verify_derivative_bounds(grid);
  const SmoothnessBudget b = target.smoothness();
  const double l3 = r.third_max * target.sum_norm_cubed();
  const double l4 = r.fourth_max * target.sum_norm_fourth();
  const auto close = [](double a, double e) { return std::abs(a - e) <= 1e-6 * std::max(1.0, std::abs(e)); };
  r.confirmed = r.confirmed && close(l3, b.l3) && close(l4, b.l4);
  return r;
}

}  // namespace stein_gauge
