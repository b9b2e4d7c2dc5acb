#include "stein_gauge/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "stein_gauge/errors.hpp"
#include "stein_gauge/random.hpp"

namespace stein_gauge {

QuadratureRule gauss_hermite(int n) {
  detail::require(n >= 1 && n <= 400, "gauss_hermite", "node count must be in [1, 400]");
  // Jacobi matrix of the probabilists' Hermite polynomials: off-diagonal sqrt(i).
  Matrix jacobi = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    jacobi(i, i - 1) = std::sqrt(static_cast<double>(i));
    jacobi(i - 1, i) = jacobi(i, i - 1);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  QuadratureRule rule;
  rule.nodes = eig.eigenvalues().transpose();
  rule.weights = eig.eigenvectors().row(0).transpose().array().square();
  rule.weights /= rule.weights.sum();
  return rule;
}

QuadratureRule tensor_gauss_hermite(Eigen::Index d, int n) {
  detail::require(d >= 1, "tensor_gauss_hermite", "dimension must be positive");
  const QuadratureRule base = gauss_hermite(n);
  Eigen::Index total = 1;
  for (Eigen::Index k = 0; k < d; ++k) {
    detail::require(total <= 10'000'000 / n, "tensor_gauss_hermite", "too many nodes");
    total *= n;
  }
  QuadratureRule rule;
  rule.nodes.resize(d, total);
  rule.weights.resize(total);
  for (Eigen::Index m = 0; m < total; ++m) {
    Eigen::Index rest = m;
    double w = 1.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const Eigen::Index i = rest % n;
      rest /= n;
      rule.nodes(k, m) = base.nodes(0, i);
      w *= base.weights(i);
    }
    rule.weights(m) = w;
  }
  return rule;
}

QuadratureRule normal_trapezoid(double half_width, double step) {
  detail::require(half_width > 0.0 && step > 0.0 && step < half_width, "normal_trapezoid",
                  "need 0 < step < half_width");
  const auto intervals = static_cast<Eigen::Index>(std::ceil(2.0 * half_width / step));
  const double h = 2.0 * half_width / static_cast<double>(intervals);
  QuadratureRule rule;
  rule.nodes.resize(1, intervals + 1);
  rule.weights.resize(intervals + 1);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (Eigen::Index i = 0; i <= intervals; ++i) {
    const double z = -half_width + h * static_cast<double>(i);
    rule.nodes(0, i) = z;
    const double end = (i == 0 || i == intervals) ? 0.5 : 1.0;
    rule.weights(i) = end * h * norm * std::exp(-0.5 * z * z);
  }
  rule.weights /= rule.weights.sum();
  return rule;
}

QuadratureRule monte_carlo_normal(Eigen::Index d, std::size_t draws, std::uint64_t seed) {
  detail::require(d >= 1 && draws >= 2, "monte_carlo_normal", "need d >= 1 and at least two draws");
  QuadratureRule rule;
  rule.random = true;
  rule.nodes.resize(d, static_cast<Eigen::Index>(draws));
  GaussianStream gauss(seed, 0);
  gauss.fill(rule.nodes);
  rule.weights = Vector::Constant(static_cast<Eigen::Index>(draws), 1.0 / static_cast<double>(draws));
  return rule;
}

}  // namespace stein_gauge
