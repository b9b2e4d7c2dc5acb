#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "stein_gauge/types.hpp"

namespace stein_gauge::testing {

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index d, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = n(rng);
  return v;
}

inline Vector random_unit(std::mt19937_64& rng, Eigen::Index d) {
  Vector v;
  do {
    v = random_vector(rng, d);
  } while (v.norm() < 1e-6);
  return v.normalized();
}

inline Matrix random_points(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d, double mean = 0.0) {
  std::normal_distribution<double> g(mean, 1.0);
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = g(rng);
  return m;
}

/// Brute-force maximum of a linear objective over the polytope
/// { x : a_k . x <= b_k }, by enumerating every vertex (all subsets of
/// `dim` tight halfspaces). Only for tiny programs.
struct Halfspace {
  Vector a;
  double b = 0.0;
};

struct VertexEnumerationResult {
  double value = 0.0;
  Vector argmax;
  std::size_t vertices = 0;
};

VertexEnumerationResult maximize_by_vertex_enumeration(const Vector& objective, const std::vector<Halfspace>& halfspaces,
                                                       double feas_tol = 1e-9);

/// Independent construction of the one-dimensional discrepancy program
/// (variables g_1..g_n, J_1..J_n, complete graph) as halfspaces, then
/// max |objective| by vertex enumeration.
double brute_force_discrepancy_1d(const std::vector<double>& points, const std::vector<double>& weights,
                                  const std::vector<double>& grad_log_p, double c1, double c2, double c3);

}  // namespace stein_gauge::testing
