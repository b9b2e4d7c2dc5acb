#pragma once

#include <memory>
#include <string>
#include <vector>

#include "stein_gauge/smoothness.hpp"
#include "stein_gauge/types.hpp"

namespace stein_gauge {

/// A strongly log-concave target known through its log-density derivatives.
/// The normalizing constant never enters; implementations are immutable
/// after construction and safe for concurrent reads.
class Target {
 public:
  virtual ~Target() = default;

  virtual Eigen::Index dim() const = 0;
  virtual std::string kind() const = 0;
  virtual SmoothnessBudget smoothness() const = 0;

  /// Checked gradient of log p: throws InputError on a dimension mismatch
  /// and NumericError on non-finite input.
  Vector grad_log_p(ConstVectorRef x) const;

  /// Gradients of log p for every column of `points`, written to `out`
  /// (same shape). Unchecked; hot path of the diffusion simulator.
  virtual void grad_log_p_batch(ConstMatrixRef points, MatrixRef out) const;

  /// Hessian of log p at x applied to v.
  virtual Vector hess_log_p_action(ConstVectorRef x, ConstVectorRef v) const = 0;

  /// log p(x) up to an additive constant.
  virtual double log_density_unnormalized(ConstVectorRef x) const = 0;

 protected:
  virtual void grad_into(ConstVectorRef x, Eigen::Ref<Vector> out) const = 0;
  void check_point(ConstVectorRef x, const char* where) const;
};

class GaussianTarget final : public Target {
 public:
  /// `precision` must be symmetric positive definite.
  GaussianTarget(Vector mean, Matrix precision);

  static GaussianTarget standard(Eigen::Index dim);
  static GaussianTarget isotropic(Eigen::Index dim, double precision);

  Eigen::Index dim() const override { return mean_.size(); }
  std::string kind() const override { return "gaussian"; }
  SmoothnessBudget smoothness() const override { return {min_eigenvalue_, 0.0, 0.0}; }

  void grad_log_p_batch(ConstMatrixRef points, MatrixRef out) const override;
  Vector hess_log_p_action(ConstVectorRef x, ConstVectorRef v) const override;
  double log_density_unnormalized(ConstVectorRef x) const override;

  const Vector& mean() const { return mean_; }
  const Matrix& precision() const { return precision_; }

 protected:
  void grad_into(ConstVectorRef x, Eigen::Ref<Vector> out) const override;

 private:
  Vector mean_;
  Matrix precision_;
  double min_eigenvalue_ = 0.0;
};

/// Bayesian logistic regression posterior with N(0, sigma2 I) prior.
/// Rows of `covariates` are the v_l, `labels` the y_l in {0, 1}.
class LogisticTarget final : public Target {
 public:
  LogisticTarget(double sigma2, Matrix covariates, Vector labels);

  /// Prior only (no data).
  static LogisticTarget prior_only(Eigen::Index dim, double sigma2);

  Eigen::Index dim() const override { return dim_; }
  std::string kind() const override { return "logistic"; }
  SmoothnessBudget smoothness() const override;

  void grad_log_p_batch(ConstMatrixRef points, MatrixRef out) const override;
  Vector hess_log_p_action(ConstVectorRef x, ConstVectorRef v) const override;
  double log_density_unnormalized(ConstVectorRef x) const override;

  double sigma2() const { return sigma2_; }
  const Matrix& covariates() const { return covariates_; }
  const Vector& labels() const { return labels_; }
  Eigen::Index num_datapoints() const { return covariates_.rows(); }
  /// sum_l ||v_l||^3 and sum_l ||v_l||^4
  double sum_norm_cubed() const { return sum_norm3_; }
  double sum_norm_fourth() const { return sum_norm4_; }

 protected:
  void grad_into(ConstVectorRef x, Eigen::Ref<Vector> out) const override;

 private:
  double sigma2_;
  Eigen::Index dim_;
  Matrix covariates_;
  Vector labels_;
  double sum_norm3_ = 0.0;
  double sum_norm4_ = 0.0;
};

/// Overflow-free logistic function.
double sigmoid(double t);
/// log(1 + e^t) without overflow.
double softplus(double t);

Vector grad_log_p(const Target& target, ConstVectorRef x);
SmoothnessBudget smoothness_constants(const Target& target);

/// Scalar kernels of the third and fourth log-likelihood derivatives of one
/// logistic datapoint, as functions of s = sigmoid(<beta, v>).
double third_derivative_kernel(double s);
double fourth_derivative_kernel(double s);

struct DerivativeKernelReport {
  double third_max = 0.0;   // max |s(1-s)(1-2s)|
  double fourth_max = 0.0;  // max |s(1-s)(1-6s+6s^2)|
  double third_argmax = 0.0;   // grid point attaining third_max
  double fourth_argmax = 0.0;
  double third_at_argmax = 0.0;   // signed kernel value there
  double fourth_at_argmax = 0.0;
  double third_bound = 0.0;   // 1 / (6 sqrt 3)
  double fourth_bound = 0.0;  // 1 / 8
  bool covers_reference_range = false;  // grid spans [-20, 20] with spacing <= 1e-3
  bool confirmed = false;  // covers range and both maxima match bounds within 1e-6
};

/// [-20, 20] with spacing 1e-3.
std::vector<double> default_kernel_grid();

/// Grid search over t in `grid` (s = sigmoid(t)) for the kernel maxima that
/// give the logistic L3 and L4 constants.
DerivativeKernelReport verify_derivative_bounds(const std::vector<double>& grid = default_kernel_grid());

/// Same grid search, additionally requiring target.smoothness() to equal the
/// confirmed kernel maxima times sum ||v_l||^3 and sum ||v_l||^4.
DerivativeKernelReport verify_derivative_bounds(const LogisticTarget& target,
                                                const std::vector<double>& grid = default_kernel_grid());

}  // namespace stein_gauge
