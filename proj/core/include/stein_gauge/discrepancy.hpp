#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "stein_gauge/factors.hpp"
#include "stein_gauge/simplex.hpp"
#include "stein_gauge/targets.hpp"

namespace stein_gauge {

/// Q = sum_i q_i delta_{x_i}; rows of `points` are the x_i.
struct SampleMeasure {
  Matrix points;
  Vector weights;

  static SampleMeasure uniform(Matrix points);

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
  /// Throws InputError unless n >= 1, points finite, weights nonnegative
  /// and summing to 1 within 1e-12.
  void validate() const;
};

struct GraphSpec {
  enum class Kind { kAuto, kComplete, kKnn };
  Kind kind = Kind::kAuto;
  std::size_t neighbors = 5;

  static GraphSpec automatic() { return {}; }
  static GraphSpec complete() { return {Kind::kComplete, 0}; }
  static GraphSpec knn(std::size_t m) { return {Kind::kKnn, m}; }
  /// "auto", "complete" or "knn:<m>".
  static GraphSpec parse(const std::string& text);

  /// Complete graph up to 500 points, symmetric 5-nearest-neighbor beyond.
  GraphSpec resolve(Eigen::Index n) const;
  std::string to_string() const;
};

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected edges (i < j). For knn(m), j is kept if it is among the m
/// nearest neighbors of i or vice versa; distance ties go to the lower index.
std::vector<Edge> build_edges(const Matrix& points, const GraphSpec& graph);

/// How the l2 / operator-norm caps of the Stein set are mapped onto the
/// linear program's max-norm caps.
enum class NormRelaxation {
  kSqrtDim,  // multiply (c1, c2, c3) by sqrt(d) before building the program
  kNone,
};

struct ProgramOptions {
  NormRelaxation relaxation = NormRelaxation::kSqrtDim;
};

/// Variables per point i: gradient surrogate g_i (d entries) followed by the
/// upper triangle of the symmetric Hessian surrogate J_i. Objective
/// sum_i q_i (<g_i, grad log p(x_i)> + tr J_i) / 2. Constraints:
///   |g_i|_inf <= c1,  |J_i|_max <= c2                          (bounds)
///   |g_i - g_j|_inf <= c2 r_ij,  |J_i - J_j|_max <= c3 r_ij     (edges)
///   |g_i - g_j - J_j (x_i - x_j)|_inf <= (c3/2) r_ij^2          (edges, both orientations)
struct DiscrepancyProgram {
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  SteinFactors factors;  // as supplied
  SteinFactors scaled;   // after relaxation inflation
  double inflation = 1.0;
  GraphSpec graph;
  std::vector<Edge> edges;
  LpProblem lp;  // maximizes +objective

  Eigen::Index vars_per_point() const { return d + d * (d + 1) / 2; }
  Eigen::Index g_index(Eigen::Index i, Eigen::Index a) const { return i * vars_per_point() + a; }
  Eigen::Index j_index(Eigen::Index i, Eigen::Index a, Eigen::Index b) const;
};

DiscrepancyProgram build_program(const Target& target, const SampleMeasure& q, const SteinFactors& factors,
                                 const GraphSpec& graph = GraphSpec::automatic(), const ProgramOptions& options = {});

struct DiscrepancySolution {
  double value = 0.0;  // max over the two signed objectives, >= 0
  LpStatus status = LpStatus::kNumericFailure;
  Vector argmax;
  int sign = 1;  // which signed objective attained the value
  LpSolution plus;
  LpSolution minus;
};

/// Solves the program for +objective and -objective; never throws on
/// numeric trouble, which is reported in `status`.
DiscrepancySolution solve_program(const DiscrepancyProgram& program, const LpSolver& solver);
DiscrepancySolution solve_program(const DiscrepancyProgram& program);

struct DiscrepancyReport {
  double value = 0.0;
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  SteinFactors factors;
  SteinFactors scaled;
  double inflation = 1.0;
  std::string graph;
  std::size_t edges = 0;
  LpStatus status = LpStatus::kNumericFailure;
  std::size_t iterations = 0;
};

/// classical_factors -> build_program -> solve_program.
DiscrepancyReport stein_discrepancy(const Target& target, const SampleMeasure& q,
                                    const GraphSpec& graph = GraphSpec::automatic(),
                                    const ProgramOptions& options = {});
DiscrepancyReport stein_discrepancy(const Target& target, const SampleMeasure& q, const GraphSpec& graph,
                                    const ProgramOptions& options, const LpSolver& solver);

}  // namespace stein_gauge
