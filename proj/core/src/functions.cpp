#include "stein_gauge/functions.hpp"

#include <cmath>
#include <utility>

#include <Eigen/Eigenvalues>

#include "stein_gauge/errors.hpp"

namespace stein_gauge::functions {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

SmoothFunction linear(Vector a, double offset) {
  SmoothFunction f;
  f.name = "linear";
  f.m1 = a.norm();
  f.m2 = 0.0;
  f.m3 = 0.0;
  f.value = [a, offset](ConstVectorRef x) { return a.dot(x) + offset; };
  f.gradient = [a](ConstVectorRef) { return a; };
  return f;
}

SmoothFunction quadratic(Matrix b, Vector a, double offset) {
  detail::require(b.rows() == b.cols() && b.rows() == a.size(), "functions::quadratic",
                  "B must be square and match a");
  Matrix sym = 0.5 * (b + b.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  SmoothFunction f;
  f.name = "quadratic";
  f.m1 = sym.isZero(0.0) ? a.norm() : kInf;
  f.m2 = eig.eigenvalues().cwiseAbs().maxCoeff();
  f.m3 = 0.0;
  f.value = [sym, a, offset](ConstVectorRef x) { return 0.5 * x.dot(sym * x) + a.dot(x) + offset; };
  f.gradient = [sym, a](ConstVectorRef x) { return Vector(sym * x + a); };
  return f;
}

SmoothFunction sin_coordinate(Eigen::Index i) {
  SmoothFunction f;
  f.name = "sin_coordinate";
  f.m1 = f.m2 = f.m3 = 1.0;
  f.value = [i](ConstVectorRef x) { return std::sin(x(i)); };
  f.gradient = [i](ConstVectorRef x) {
    Vector g = Vector::Zero(x.size());
    g(i) = std::cos(x(i));
    return g;
  };
  return f;
}

SmoothFunction abs_coordinate(Eigen::Index i) {
  SmoothFunction f;
  f.name = "abs_coordinate";
  f.m1 = 1.0;
  f.value = [i](ConstVectorRef x) { return std::abs(x(i)); };
  return f;
}

SmoothFunction euclidean_norm() {
  SmoothFunction f;
  f.name = "euclidean_norm";
  f.m1 = 1.0;
  f.value = [](ConstVectorRef x) { return x.norm(); };
  return f;
}

SmoothFunction square_coordinate(Eigen::Index i) {
  SmoothFunction f;
  f.name = "square_coordinate";
  f.m2 = 2.0;
  f.m3 = 0.0;
  f.value = [i](ConstVectorRef x) { return x(i) * x(i); };
  f.gradient = [i](ConstVectorRef x) {
    Vector g = Vector::Zero(x.size());
    g(i) = 2.0 * x(i);
    return g;
  };
  return f;
}

}  // namespace stein_gauge::functions
