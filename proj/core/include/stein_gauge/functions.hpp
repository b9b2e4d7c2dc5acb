#pragma once

#include <functional>
#include <limits>
#include <string>

#include "stein_gauge/types.hpp"

namespace stein_gauge {

/// A scalar test function together with known bounds on its Lipschitz
/// constants M1, M2, M3 (infinity when the bound does not exist).
/// `gradient` may be empty for functions that are only Lipschitz.
struct SmoothFunction {
  std::string name;
  std::function<double(ConstVectorRef)> value;
  std::function<Vector(ConstVectorRef)> gradient;
  double m1 = std::numeric_limits<double>::infinity();
  double m2 = std::numeric_limits<double>::infinity();
  double m3 = std::numeric_limits<double>::infinity();

  double operator()(ConstVectorRef x) const { return value(x); }
  bool has_gradient() const { return static_cast<bool>(gradient); }
};

namespace functions {

/// <a, x> + offset
SmoothFunction linear(Vector a, double offset = 0.0);
/// 0.5 x'Bx + <a, x> + offset with B symmetric; m2 = ||B||_op, m3 = 0.
SmoothFunction quadratic(Matrix b, Vector a, double offset = 0.0);
/// sin(x_i)
SmoothFunction sin_coordinate(Eigen::Index i);
/// |x_i|; Lipschitz only.
SmoothFunction abs_coordinate(Eigen::Index i);
/// ||x||_2; Lipschitz only.
SmoothFunction euclidean_norm();
/// x_i^2; m1 is unbounded, m2 = 2.
SmoothFunction square_coordinate(Eigen::Index i);

}  // namespace functions
}  // namespace stein_gauge
