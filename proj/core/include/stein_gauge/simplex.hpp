#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "stein_gauge/types.hpp"

namespace stein_gauge {

/// lower <= sum_k coeff[k] * x[index[k]] <= upper
struct LpRow {
  std::vector<Eigen::Index> index;
  std::vector<double> coeff;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  double activity(const Vector& x) const;
  /// Amount by which x violates the row (0 when satisfied).
  double violation(const Vector& x) const;
};

/// maximize objective . x  subject to  rows,  lower <= x <= upper.
/// Variable bounds must be finite; row bounds may be one-sided.
struct LpProblem {
  Vector objective;
  Vector lower;
  Vector upper;
  std::vector<LpRow> rows;
  /// Rows activated before the first solve when the solver works lazily.
  std::vector<std::size_t> initial_rows;

  Eigen::Index num_vars() const { return objective.size(); }
  /// Throws InputError on inconsistent sizes or non-finite variable bounds.
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kNumericFailure };

std::string to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kNumericFailure;
  double value = 0.0;
  Vector x;
  std::size_t iterations = 0;
  std::size_t rounds = 0;       // row-activation rounds
  std::size_t active_rows = 0;  // rows in the final working set
  double max_violation = 0.0;   // over all rows and bounds, at x
  std::vector<std::size_t> working_set;  // rows active at termination
  std::string message;
};

/// Interchangeable LP backend. Implementations report failures through
/// LpSolution::status rather than throwing.
class LpSolver {
 public:
  virtual ~LpSolver() = default;
  virtual std::string name() const = 0;
  virtual LpSolution solve(const LpProblem& problem) const = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;   // internal primal tolerance
  double acceptance_tol = 1e-8;    // final check of every row and bound
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-10;
  /// Pivot limit per solve; 0 picks 20000 + 200 * (number of variables).
  std::size_t max_iterations = 0;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t bland_after = 50;
  /// Start from `initial_rows` and add violated rows in rounds; otherwise
  /// every row is active from the start.
  bool lazy_rows = true;
  /// Relative size of the outward bound shifts used against degenerate
  /// cycling; removed again before the final clean-up pass. 0 disables.
  double perturbation = 1e-7;
  /// Rows added per round; 0 picks max(64, number of variables).
  std::size_t rows_per_round = 0;
};

/// Dense-tableau simplex for bounded variables. A primal phase optimizes
/// from a feasible point; a dual phase restores feasibility after rows are
/// added (and serves as phase one when the starting point is infeasible).
/// Dantzig pricing, falling back to Bland's rule while pivots stall.
class DenseSimplexSolver final : public LpSolver {
 public:
  explicit DenseSimplexSolver(SimplexOptions options = {}) : options_(options) {}
  std::string name() const override { return "dense-simplex"; }
  LpSolution solve(const LpProblem& problem) const override;
  const SimplexOptions& options() const { return options_; }

 private:
  SimplexOptions options_;
};

}  // namespace stein_gauge
