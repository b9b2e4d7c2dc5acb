#pragma once

#include <cstddef>
#include <cstdint>

#include "stein_gauge/types.hpp"

namespace stein_gauge {

/// Weighted nodes approximating E f(G) for G ~ N(0, I_d).
/// Columns of `nodes` are points; weights sum to 1.
struct QuadratureRule {
  Matrix nodes;
  Vector weights;
  bool random = false;  // Monte Carlo draws (equal weights)

  Eigen::Index dim() const { return nodes.rows(); }
  Eigen::Index size() const { return nodes.cols(); }
};

/// n-point Gauss-Hermite rule for the standard normal (Golub-Welsch);
/// exact for polynomials of degree <= 2n - 1.
QuadratureRule gauss_hermite(int n);

/// Tensor product of the 1-d Gauss-Hermite rule, n^d nodes.
QuadratureRule tensor_gauss_hermite(Eigen::Index d, int n);

/// Composite trapezoid rule on [-half_width, half_width] with the normal
/// density folded into the weights (d = 1). Converges at O(step^2) for
/// integrands with kinks, where Gauss-Hermite converges slowly.
QuadratureRule normal_trapezoid(double half_width, double step);

/// `draws` standard normal vectors from the counter stream (seed, 0).
QuadratureRule monte_carlo_normal(Eigen::Index d, std::size_t draws, std::uint64_t seed);

}  // namespace stein_gauge
