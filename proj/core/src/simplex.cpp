#include "stein_gauge/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include <Eigen/LU>

#include "stein_gauge/errors.hpp"
#include "stein_gauge/random.hpp"

namespace stein_gauge {

double LpRow::activity(const Vector& x) const {
  double a = 0.0;
  for (std::size_t k = 0; k < index.size(); ++k) a += coeff[k] * x(index[k]);
  return a;
}

double LpRow::violation(const Vector& x) const {
  const double a = activity(x);
  return std::max({0.0, lower - a, a - upper});
}

void LpProblem::validate() const {
  const Eigen::Index n = num_vars();
  detail::require(n >= 1, "LpProblem", "no variables");
  detail::require(lower.size() == n && upper.size() == n, "LpProblem", "bound vectors must match objective");
  detail::require(objective.allFinite(), "LpProblem", "objective must be finite");
  detail::require(lower.allFinite() && upper.allFinite(), "LpProblem", "variable bounds must be finite");
  for (const auto& row : rows) {
    detail::require(row.index.size() == row.coeff.size(), "LpProblem", "row index/coeff size mismatch");
    detail::require(!(row.lower > row.upper), "LpProblem", "row with lower > upper");
    for (auto i : row.index) detail::require(i >= 0 && i < n, "LpProblem", "row references unknown variable");
  }
  for (auto r : initial_rows) detail::require(r < rows.size(), "LpProblem", "initial row out of range");
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kNumericFailure:
      return "numeric-failure";
  }
  return "unknown";
}

namespace {

struct SolverFailure : std::runtime_error {
  LpStatus status;
  SolverFailure(LpStatus s, const std::string& what) : std::runtime_error(what), status(s) {}
};

// Dictionary form x_B = T x_N over structural variables 0..N-1 and one slack
// per active row (s_i = a_i . x). Every variable has bounds; nonbasic
// variables sit at a bound or, initially, anywhere inside their range.
constexpr std::size_t kPerturbAfter = 500;

class Tableau {
 public:
  Tableau(const LpProblem& problem, const SimplexOptions& options)
      : problem_(problem), opt_(options), n_(problem.num_vars()) {
    lower_.assign(problem.lower.data(), problem.lower.data() + n_);
    upper_.assign(problem.upper.data(), problem.upper.data() + n_);
    limit_ = opt_.max_iterations ? opt_.max_iterations : 20000 + 200 * static_cast<std::size_t>(n_);
    true_lower_ = lower_;
    true_upper_ = upper_;

    cost_.assign(problem.objective.data(), problem.objective.data() + n_);
    value_.resize(n_);
    for (Eigen::Index j = 0; j < n_; ++j) value_[j] = std::clamp(0.0, lower_[j], upper_[j]);
    nonbasic_.resize(n_);
    std::iota(nonbasic_.begin(), nonbasic_.end(), 0);
    is_basic_.assign(n_, 0);
    position_.resize(n_);
    std::iota(position_.begin(), position_.end(), 0);
    t_.resize(0, n_);
    reduced_ = Vector::Map(cost_.data(), n_);
  }

  Eigen::Index rows() const { return t_.rows(); }
  std::size_t iterations() const { return iterations_; }

  void add_rows(const std::vector<std::size_t>& ids) {
    if (ids.empty()) return;
    const Eigen::Index m0 = t_.rows();
    const Eigen::Index m1 = m0 + static_cast<Eigen::Index>(ids.size());
    t_.conservativeResize(m1, n_);
    for (std::size_t q = 0; q < ids.size(); ++q) {
      const LpRow& row = problem_.rows[ids[q]];
      const Eigen::Index i = m0 + static_cast<Eigen::Index>(q);
      t_.row(i).setZero();
      double activity = 0.0;
      for (std::size_t k = 0; k < row.index.size(); ++k) {
        const Eigen::Index v = row.index[k];
        activity += row.coeff[k] * value_[v];
        if (is_basic_[v]) {
          t_.row(i) += row.coeff[k] * t_.row(position_[v]);
        } else {
          t_(i, position_[v]) += row.coeff[k];
        }
      }
      const Eigen::Index var = static_cast<Eigen::Index>(lower_.size());
      double lo = row.lower, hi = row.upper;
      true_lower_.push_back(lo);
      true_upper_.push_back(hi);
      if (perturbed_) widen(lo, hi, (1ULL << 40) + ids[q]);
      lower_.push_back(lo);
      upper_.push_back(hi);
      cost_.push_back(0.0);
      value_.push_back(activity);
      is_basic_.push_back(1);
      position_.push_back(i);
      basic_.push_back(var);
      row_of_slack_.push_back(ids[q]);
    }
  }

  // Primal simplex from a primal-feasible point.
  void primal() {
    std::size_t degenerate = 0;
    while (true) {
      guard();
      if (degenerate >= kPerturbAfter && !perturbed_ && opt_.perturbation > 0.0) {
        perturb();
        degenerate = 0;
      }
      const bool bland = degenerate >= opt_.bland_after;
      Eigen::Index p = -1;
      double best = 0.0;
      for (Eigen::Index c = 0; c < n_; ++c) {
        const Eigen::Index v = nonbasic_[c];
        const double d = reduced_(c);
        const bool up = d > opt_.optimality_tol && value_[v] < upper_[v] - opt_.feasibility_tol;
        const bool down = d < -opt_.optimality_tol && value_[v] > lower_[v] + opt_.feasibility_tol;
        if (!up && !down) continue;
        if (bland) {
          if (p < 0 || v < nonbasic_[p]) p = c;
        } else if (std::abs(d) > best) {
          best = std::abs(d);
          p = c;
        }
      }
      if (p < 0) return;

      const Eigen::Index entering = nonbasic_[p];
      const double sigma = reduced_(p) > 0.0 ? 1.0 : -1.0;
      const double own = sigma > 0.0 ? upper_[entering] - value_[entering] : value_[entering] - lower_[entering];
      // Harris ratio test: bound the step with relaxed rooms, then take the
      // largest pivot among the rows that block within that bound.
      const double tol = opt_.feasibility_tol;
      double relaxed = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < t_.rows(); ++i) {
        const double rate = sigma * t_(i, p);
        if (std::abs(rate) <= opt_.pivot_tol) continue;
        const Eigen::Index b = basic_[i];
        const double room = rate > 0.0 ? upper_[b] - value_[b] : value_[b] - lower_[b];
        relaxed = std::min(relaxed, (std::max(room, 0.0) + tol) / std::abs(rate));
      }
      double theta = own;
      Eigen::Index leave = -1;
      if (own > relaxed) {
        double leave_pivot = 0.0;
        for (Eigen::Index i = 0; i < t_.rows(); ++i) {
          const double rate = sigma * t_(i, p);
          if (std::abs(rate) <= opt_.pivot_tol) continue;
          const Eigen::Index b = basic_[i];
          const double room = rate > 0.0 ? upper_[b] - value_[b] : value_[b] - lower_[b];
          const double step = std::max(room, 0.0) / std::abs(rate);
          if (step > relaxed) continue;
          const bool take = leave < 0 || (bland ? b < basic_[leave] : std::abs(rate) > leave_pivot);
          if (take) {
            leave = i;
            leave_pivot = std::abs(rate);
            theta = step;
          }
        }
      }
      if (!std::isfinite(theta)) throw SolverFailure(LpStatus::kNumericFailure, "unbounded direction");

      move_nonbasic(p, sigma * theta);
      if (leave >= 0) {
        const Eigen::Index b = basic_[leave];
        value_[b] = sigma * t_(leave, p) > 0.0 ? upper_[b] : lower_[b];
        pivot(leave, p);
      }
      degenerate = theta <= 1e-12 ? degenerate + 1 : 0;
    }
  }

  // Dual simplex: restores primal feasibility of the basic variables while
  // keeping reduced costs dual feasible. Returns false if infeasible.
  bool dual() {
    std::size_t degenerate = 0;
    while (true) {
      guard();
      const bool bland = degenerate >= opt_.bland_after;
      Eigen::Index row = -1;
      double worst = opt_.feasibility_tol;
      for (Eigen::Index i = 0; i < t_.rows(); ++i) {
        const Eigen::Index b = basic_[i];
        const double infeas = std::max(lower_[b] - value_[b], value_[b] - upper_[b]);
        if (infeas <= opt_.feasibility_tol) continue;
        if (bland) {
          if (row < 0 || b < basic_[row]) row = i;
        } else if (infeas > worst) {
          worst = infeas;
          row = i;
        }
      }
      if (row < 0) return true;

      const Eigen::Index b = basic_[row];
      const bool below = value_[b] < lower_[b];
      const double target = below ? lower_[b] : upper_[b];
      const double delta = target - value_[b];

      const auto eligible = [&](Eigen::Index c, double& ratio) {
        const double a = t_(row, c);
        if (std::abs(a) <= opt_.pivot_tol) return false;
        const Eigen::Index v = nonbasic_[c];
        const bool increase = (delta / a) > 0.0;
        if (increase && value_[v] >= upper_[v] - opt_.feasibility_tol) return false;
        if (!increase && value_[v] <= lower_[v] + opt_.feasibility_tol) return false;
        // Increasing a variable keeps dual feasibility only with d <= 0, decreasing with d >= 0.
        const double d = reduced_(c);
        ratio = (increase ? std::max(-d, 0.0) : std::max(d, 0.0)) / std::abs(a);
        return true;
      };
      double relaxed = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < n_; ++c) {
        double ratio = 0.0;
        if (eligible(c, ratio)) relaxed = std::min(relaxed, ratio + opt_.optimality_tol / std::abs(t_(row, c)));
      }
      Eigen::Index p = -1;
      double best_ratio = 0.0, best_pivot = 0.0;
      for (Eigen::Index c = 0; c < n_; ++c) {
        double ratio = 0.0;
        if (!eligible(c, ratio) || ratio > relaxed) continue;
        const bool take = p < 0 || (bland ? nonbasic_[c] < nonbasic_[p] : std::abs(t_(row, c)) > best_pivot);
        if (take) {
          p = c;
          best_pivot = std::abs(t_(row, c));
          best_ratio = ratio;
        }
      }
      if (p < 0) return false;

      move_nonbasic(p, delta / t_(row, p));
      value_[b] = target;
      pivot(row, p);
      degenerate = best_ratio <= 1e-12 ? degenerate + 1 : 0;
    }
  }

  // Replaces reduced costs with zeros (phase one) or the true objective.
  void use_zero_costs() { reduced_.setZero(); }
  void use_true_costs() {
    for (Eigen::Index c = 0; c < n_; ++c) reduced_(c) = cost_[nonbasic_[c]];
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      const double cb = cost_[basic_[i]];
      if (cb != 0.0) reduced_ += cb * t_.row(i).transpose();
    }
  }

  // Largest |a_i . x - s_i| over active rows.
  double drift() const {
    double worst = 0.0;
    for (std::size_t q = 0; q < row_of_slack_.size(); ++q) {
      const LpRow& row = problem_.rows[row_of_slack_[q]];
      double a = 0.0;
      for (std::size_t k = 0; k < row.index.size(); ++k) a += row.coeff[k] * value_[row.index[k]];
      worst = std::max(worst, std::abs(a - value_[n_ + static_cast<Eigen::Index>(q)]));
    }
    return worst;
  }

  // Rebuilds T from the current basis and recomputes basic values from the
  // nonbasic ones.
  void refactor() {
    const Eigen::Index m = t_.rows();
    if (m == 0) return;
    Matrix kb = Matrix::Zero(m, m);
    Matrix kn = Matrix::Zero(m, n_);
    const auto column_of = [&](Eigen::Index var, Eigen::Index i) -> double {
      if (var >= n_) return var - n_ == i ? -1.0 : 0.0;
      const LpRow& row = problem_.rows[row_of_slack_[i]];
      double a = 0.0;
      for (std::size_t k = 0; k < row.index.size(); ++k) {
        if (row.index[k] == var) a += row.coeff[k];
      }
      return a;
    };
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index r = 0; r < m; ++r) kb(i, r) = column_of(basic_[r], i);
      for (Eigen::Index c = 0; c < n_; ++c) kn(i, c) = column_of(nonbasic_[c], i);
    }
    Eigen::PartialPivLU<Matrix> lu(kb);
    t_ = -lu.solve(kn);
    if (!t_.allFinite()) throw SolverFailure(LpStatus::kNumericFailure, "singular basis during refactorization");
    Vector xn(n_);
    for (Eigen::Index c = 0; c < n_; ++c) xn(c) = value_[nonbasic_[c]];
    const Vector xb = t_ * xn;
    for (Eigen::Index i = 0; i < m; ++i) value_[basic_[i]] = xb(i);
    use_true_costs();
  }

  bool perturbed() const { return perturbed_; }

  // Widens every bound outward; basic variables sitting on a bound move
  // strictly inside, which breaks the degenerate ties.
  void perturb() {
    if (perturbed_ || !(opt_.perturbation > 0.0)) return;
    perturbed_ = true;
    for (std::size_t v = 0; v < lower_.size(); ++v) {
      const std::uint64_t key = static_cast<Eigen::Index>(v) < n_ ? v : (1ULL << 40) + row_of_slack_[v - n_];
      widen(lower_[v], upper_[v], key);
    }
  }

  // Restores the exact bounds. Nonbasic variables outside them move back
  // onto the nearest bound; basic variables may become infeasible and are
  // left to the dual simplex.
  void remove_perturbation() {
    if (!perturbed_) return;
    perturbed_ = false;
    lower_ = true_lower_;
    upper_ = true_upper_;
    for (Eigen::Index c = 0; c < n_; ++c) {
      const Eigen::Index v = nonbasic_[c];
      const double target = std::clamp(value_[v], lower_[v], upper_[v]);
      move_nonbasic(c, target - value_[v]);
      value_[v] = target;
    }
  }

  // Drops rows whose slack is basic and strictly inside its range. At an
  // optimum of the active rows such rows carry no dual weight, so the vertex
  // stays optimal. Returns the problem rows that were released.
  std::vector<std::size_t> drop_slack_rows(double margin) {
    const Eigen::Index m = t_.rows();
    std::vector<char> keep(static_cast<std::size_t>(m), 1);
    std::vector<std::size_t> released;
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index b = basic_[i];
      if (b < n_) continue;
      if (value_[b] > true_lower_[b] + margin && value_[b] < true_upper_[b] - margin) {
        keep[i] = 0;
        released.push_back(row_of_slack_[b - n_]);
      }
    }
    if (released.empty()) return released;

    // Renumber the surviving slacks; slack q always belongs to row_of_slack_[q].
    const Eigen::Index total = static_cast<Eigen::Index>(lower_.size());
    std::vector<char> live(static_cast<std::size_t>(total), 1);
    for (Eigen::Index i = 0; i < m; ++i)
      if (!keep[i]) live[basic_[i]] = 0;
    std::vector<Eigen::Index> remap(static_cast<std::size_t>(total), -1);
    Eigen::Index next = 0;
    for (Eigen::Index v = 0; v < total; ++v)
      if (live[v]) remap[v] = next++;

    auto compact = [&](auto& vec) {
      std::size_t w = 0;
      for (Eigen::Index v = 0; v < total; ++v)
        if (live[v]) vec[w++] = vec[v];
      vec.resize(w);
    };
    std::vector<std::size_t> rows_of(static_cast<std::size_t>(total - n_));
    for (Eigen::Index v = n_; v < total; ++v) rows_of[v - n_] = row_of_slack_[v - n_];
    compact(lower_);
    compact(upper_);
    compact(true_lower_);
    compact(true_upper_);
    compact(cost_);
    compact(value_);
    compact(is_basic_);
    row_of_slack_.clear();
    for (Eigen::Index v = n_; v < total; ++v)
      if (live[v]) row_of_slack_.push_back(rows_of[v - n_]);

    Matrix t(m - static_cast<Eigen::Index>(released.size()), n_);
    std::vector<Eigen::Index> basic;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!keep[i]) continue;
      t.row(static_cast<Eigen::Index>(basic.size())) = t_.row(i);
      basic.push_back(remap[basic_[i]]);
    }
    t_ = std::move(t);
    basic_ = std::move(basic);
    for (auto& v : nonbasic_) v = remap[v];
    position_.assign(lower_.size(), 0);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(basic_.size()); ++i) position_[basic_[i]] = i;
    for (Eigen::Index c = 0; c < n_; ++c) position_[nonbasic_[c]] = c;
    return released;
  }

  const std::vector<std::size_t>& working_set() const { return row_of_slack_; }

  Vector structural() const { return Vector::Map(value_.data(), n_); }

 private:
  void guard() {
    if (++iterations_ > limit_) {
      throw SolverFailure(LpStatus::kNumericFailure, "iteration limit reached");
    }
  }

  void move_nonbasic(Eigen::Index c, double step) {
    if (step == 0.0) return;
    value_[nonbasic_[c]] += step;
    for (Eigen::Index i = 0; i < t_.rows(); ++i) value_[basic_[i]] += step * t_(i, c);
  }

  void pivot(Eigen::Index i, Eigen::Index p) {
    const double piv = t_(i, p);
    if (!std::isfinite(piv) || std::abs(piv) <= opt_.pivot_tol) {
      throw SolverFailure(LpStatus::kNumericFailure, "vanishing pivot");
    }
    Eigen::RowVectorXd row = -t_.row(i) / piv;
    row(p) = 1.0 / piv;
    Vector col = t_.col(p);
    col(i) = 0.0;
    t_.col(p).setZero();
    t_.noalias() += col * row;
    t_.row(i) = row;
    const double dp = reduced_(p);
    reduced_(p) = 0.0;
    reduced_ += dp * row.transpose();

    const Eigen::Index entering = nonbasic_[p];
    const Eigen::Index leaving = basic_[i];
    basic_[i] = entering;
    nonbasic_[p] = leaving;
    is_basic_[entering] = 1;
    is_basic_[leaving] = 0;
    position_[entering] = i;
    position_[leaving] = p;
  }

  // Deterministic outward shift in [1, 2) * perturbation * (1 + |bound|).
  void widen(double& lo, double& hi, std::uint64_t key) const {
    const double eps = opt_.perturbation;
    const auto u = [&](std::uint64_t k) { return 1.0 + static_cast<double>(CounterRng::mix(k) >> 11) * 0x1.0p-53; };
    if (std::isfinite(lo)) lo -= eps * u(2 * key) * (1.0 + std::abs(lo));
    if (std::isfinite(hi)) hi += eps * u(2 * key + 1) * (1.0 + std::abs(hi));
  }

  const LpProblem& problem_;
  const SimplexOptions& opt_;
  Eigen::Index n_;
  std::vector<double> lower_, upper_, cost_, value_;
  std::vector<double> true_lower_, true_upper_;
  bool perturbed_ = false;
  std::vector<Eigen::Index> basic_, nonbasic_, position_;
  std::vector<char> is_basic_;
  std::vector<std::size_t> row_of_slack_;
  Matrix t_;
  Vector reduced_;
  std::size_t iterations_ = 0;
  std::size_t limit_ = 0;
};

constexpr std::size_t kDropRounds = 200;
constexpr double kDropMargin = 1e-7;

double bound_violation(const LpProblem& problem, const Vector& x) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    worst = std::max({worst, problem.lower(j) - x(j), x(j) - problem.upper(j)});
  }
  return worst;
}

}  // namespace

namespace {

// One pass from the clamped origin. `reached` receives the working set, also
// when the pass fails.
LpSolution attempt(const LpProblem& problem, const SimplexOptions& options_, const std::vector<std::size_t>& seed_rows,
                   bool perturb_first, std::vector<std::size_t>& reached) {
  LpSolution sol;
  Tableau tab(problem, options_);
  if (perturb_first) tab.perturb();
  try {
    std::vector<char> active(problem.rows.size(), 0);
    std::vector<std::size_t> seed;
    if (options_.lazy_rows) {
      for (auto r : seed_rows) {
        if (!active[r]) {
          active[r] = 1;
          seed.push_back(r);
        }
      }
    } else {
      seed.resize(problem.rows.size());
      std::iota(seed.begin(), seed.end(), 0);
      std::fill(active.begin(), active.end(), 1);
    }
    tab.add_rows(seed);

    // Phase one if the clamped origin violates an active row.
    // A failed dual pass may come from a drifted tableau; rebuild it once
    // before trusting the verdict.
    const auto restore = [&](bool phase_one) {
      if (tab.dual()) return true;
      tab.refactor();
      if (phase_one) tab.use_zero_costs();
      return tab.dual();
    };
    tab.use_zero_costs();
    if (!restore(true)) {
      sol.status = LpStatus::kInfeasible;
      sol.message = "active rows are infeasible";
      sol.iterations = tab.iterations();
      reached = tab.working_set();
      return sol;
    }
    tab.use_true_costs();

    const std::size_t per_round =
        options_.rows_per_round ? options_.rows_per_round
                                : std::max<std::size_t>(64, static_cast<std::size_t>(problem.num_vars()));
    bool refactored_last = false;
    while (true) {
      ++sol.rounds;
      tab.primal();
      if (tab.drift() > options_.feasibility_tol) {
        if (refactored_last) throw SolverFailure(LpStatus::kNumericFailure, "tableau drift persists after refactor");
        tab.refactor();
        refactored_last = true;
        if (!tab.dual()) throw SolverFailure(LpStatus::kNumericFailure, "lost feasibility after refactor");
        continue;
      }
      refactored_last = false;

      const Vector x = tab.structural();
      if (sol.rounds <= kDropRounds) {
        for (auto r : tab.drop_slack_rows(kDropMargin)) active[r] = 0;
      }
      std::vector<std::pair<double, std::size_t>> violated;
      for (std::size_t r = 0; r < problem.rows.size(); ++r) {
        if (active[r]) continue;
        const double v = problem.rows[r].violation(x);
        if (v > options_.feasibility_tol) violated.emplace_back(v, r);
      }
      if (violated.empty()) {
        if (!tab.perturbed()) break;
        tab.remove_perturbation();
        if (!restore(false)) throw SolverFailure(LpStatus::kNumericFailure, "clean-up after perturbation failed");
        continue;
      }
      const std::size_t take = std::min(per_round, violated.size());
      std::partial_sort(violated.begin(), violated.begin() + static_cast<std::ptrdiff_t>(take), violated.end(),
                        [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
      std::vector<std::size_t> batch;
      batch.reserve(take);
      for (std::size_t q = 0; q < take; ++q) {
        batch.push_back(violated[q].second);
        active[violated[q].second] = 1;
      }
      tab.add_rows(batch);
      if (!restore(false)) {
        sol.status = LpStatus::kInfeasible;
        sol.message = "rows are infeasible";
        sol.iterations = tab.iterations();
        reached = tab.working_set();
        return sol;
      }
    }

    sol.x = tab.structural();
    sol.iterations = tab.iterations();
    sol.active_rows = static_cast<std::size_t>(tab.rows());
    sol.working_set = tab.working_set();
    sol.value = problem.objective.dot(sol.x);
    sol.max_violation = bound_violation(problem, sol.x);
    for (const auto& row : problem.rows) sol.max_violation = std::max(sol.max_violation, row.violation(sol.x));
    if (!std::isfinite(sol.value) || !sol.x.allFinite()) {
      sol.status = LpStatus::kNumericFailure;
      sol.message = "non-finite solution";
    } else if (sol.max_violation > options_.acceptance_tol) {
      sol.status = LpStatus::kNumericFailure;
      sol.message = "solution violates constraints by " + std::to_string(sol.max_violation);
    } else {
      sol.status = LpStatus::kOptimal;
    }
  } catch (const SolverFailure& f) {
    sol.status = f.status;
    sol.message = f.what();
    sol.iterations = tab.iterations();
  }
  reached = tab.working_set();
  return sol;
}

}  // namespace

LpSolution DenseSimplexSolver::solve(const LpProblem& problem) const {
  problem.validate();
  std::vector<std::size_t> reached;
  LpSolution first = attempt(problem, options_, problem.initial_rows, false, reached);
  if (first.status == LpStatus::kOptimal || !options_.lazy_rows) return first;

  // Ill-conditioned pivots can wreck a long run. Start again from a fresh
  // basis holding every row reached so far, perturbed from the outset.
  std::vector<std::size_t> seed = problem.initial_rows;
  seed.insert(seed.end(), reached.begin(), reached.end());
  std::sort(seed.begin(), seed.end());
  seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
  LpSolution second = attempt(problem, options_, seed, true, reached);
  second.iterations += first.iterations;
  return second;
}

}  // namespace stein_gauge
