#include "stein_gauge/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "stein_gauge/errors.hpp"

namespace stein_gauge {

SampleMeasure SampleMeasure::uniform(Matrix points) {
  SampleMeasure q;
  const Eigen::Index n = points.rows();
  q.points = std::move(points);
  q.weights = n > 0 ? Vector::Constant(n, 1.0 / static_cast<double>(n)) : Vector();
  return q;
}

void SampleMeasure::validate() const {
  detail::require(points.rows() >= 1, "SampleMeasure", "need at least one point");
  detail::require(points.cols() >= 1, "SampleMeasure", "points must have at least one column");
  detail::require(weights.size() == points.rows(), "SampleMeasure", "one weight per point required");
  detail::require(points.allFinite(), "SampleMeasure", "points must be finite");
  detail::require(weights.allFinite() && (weights.array() >= 0.0).all(), "SampleMeasure",
                  "weights must be finite and nonnegative");
  detail::require(std::abs(weights.sum() - 1.0) <= 1e-12, "SampleMeasure", "weights must sum to 1");
}

GraphSpec GraphSpec::parse(const std::string& text) {
  if (text == "auto") return automatic();
  if (text == "complete") return complete();
  if (text.rfind("knn:", 0) == 0) {
    const std::string num = text.substr(4);
    detail::require(!num.empty() && std::all_of(num.begin(), num.end(), [](char c) { return c >= '0' && c <= '9'; }),
                    "GraphSpec", "expected knn:<m>, got '" + text + "'");
    return knn(static_cast<std::size_t>(std::stoull(num)));
  }
  detail::throw_input("GraphSpec", "unknown graph '" + text + "' (auto, complete, knn:<m>)");
}

GraphSpec GraphSpec::resolve(Eigen::Index n) const {
  if (kind != Kind::kAuto) return *this;
  return n <= 500 ? complete() : knn(5);
}

std::string GraphSpec::to_string() const {
  switch (kind) {
    case Kind::kAuto:
      return "auto";
    case Kind::kComplete:
      return "complete";
    case Kind::kKnn:
      return "knn:" + std::to_string(neighbors);
  }
  return "auto";
}

std::vector<Edge> build_edges(const Matrix& points, const GraphSpec& graph) {
  const auto n = static_cast<std::size_t>(points.rows());
  const GraphSpec g = graph.resolve(points.rows());
  std::vector<Edge> edges;
  if (g.kind == GraphSpec::Kind::kComplete || (g.kind == GraphSpec::Kind::kKnn && g.neighbors + 1 >= n)) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return edges;
  }
  std::set<Edge> chosen;
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < n; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dist.emplace_back((points.row(i) - points.row(j)).squaredNorm(), j);
    }
    const std::size_t m = std::min(g.neighbors, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(m), dist.end());
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t j = dist[r].second;
      chosen.emplace(std::min(i, j), std::max(i, j));
    }
  }
  edges.assign(chosen.begin(), chosen.end());
  return edges;
}

Eigen::Index DiscrepancyProgram::j_index(Eigen::Index i, Eigen::Index a, Eigen::Index b) const {
  if (a > b) std::swap(a, b);
  // row-major upper triangle: offset of row a is a*d - a*(a-1)/2
  return i * vars_per_point() + d + a * d - a * (a - 1) / 2 + (b - a);
}

namespace {

LpRow make_row(std::vector<Eigen::Index> index, std::vector<double> coeff, double bound) {
  LpRow row;
  row.index = std::move(index);
  row.coeff = std::move(coeff);
  row.lower = -bound;
  row.upper = bound;
  return row;
}

}  // namespace

DiscrepancyProgram build_program(const Target& target, const SampleMeasure& q, const SteinFactors& factors,
                                 const GraphSpec& graph, const ProgramOptions& options) {
  q.validate();
  detail::require(q.dim() == target.dim(), "build_program", "sample dimension does not match target");
  detail::require(std::isfinite(factors.c1) && std::isfinite(factors.c2) && std::isfinite(factors.c3) &&
                      factors.c1 >= 0.0 && factors.c2 >= 0.0 && factors.c3 >= 0.0,
                  "build_program", "factors must be finite and nonnegative");
  const GraphSpec resolved = graph.resolve(q.size());
  if (resolved.kind == GraphSpec::Kind::kKnn && resolved.neighbors == 0 && q.size() > 1)
    detail::throw_input("build_program", "knn:0 gives an empty edge set for more than one point");

  DiscrepancyProgram p;
  p.n = q.size();
  p.d = q.dim();
  p.factors = factors;
  p.inflation = options.relaxation == NormRelaxation::kSqrtDim ? std::sqrt(static_cast<double>(p.d)) : 1.0;
  p.scaled = {factors.c1 * p.inflation, factors.c2 * p.inflation, factors.c3 * p.inflation};
  p.graph = resolved;
  p.edges = build_edges(q.points, resolved);

  const Eigen::Index n = p.n, d = p.d, nv = n * p.vars_per_point();
  const SteinFactors& c = p.scaled;
  LpProblem& lp = p.lp;
  lp.objective = Vector::Zero(nv);
  lp.lower.resize(nv);
  lp.upper.resize(nv);

  Matrix grads(d, n);
  target.grad_log_p_batch(q.points.transpose(), grads);
  if (!grads.allFinite()) detail::throw_numeric("build_program", "non-finite grad log p at a sample point");

  for (Eigen::Index i = 0; i < n; ++i) {
    const double qi = q.weights(i);
    for (Eigen::Index a = 0; a < d; ++a) {
      const auto g = p.g_index(i, a);
      lp.objective(g) = 0.5 * qi * grads(a, i);
      lp.lower(g) = -c.c1;
      lp.upper(g) = c.c1;
      for (Eigen::Index b = a; b < d; ++b) {
        const auto jv = p.j_index(i, a, b);
        lp.objective(jv) = a == b ? 0.5 * qi : 0.0;
        lp.lower(jv) = -c.c2;
        lp.upper(jv) = c.c2;
      }
    }
  }

  // Rows are laid out edge by edge so a subset of edges maps to row ranges.
  const Eigen::Index per_edge = d + d * (d + 1) / 2 + 2 * d;
  lp.rows.reserve(p.edges.size() * static_cast<std::size_t>(per_edge));
  for (const auto& [iu, ju] : p.edges) {
    const auto i = static_cast<Eigen::Index>(iu), j = static_cast<Eigen::Index>(ju);
    const Vector delta = (q.points.row(i) - q.points.row(j)).transpose();
    const double r = delta.norm();
    for (Eigen::Index a = 0; a < d; ++a)
      lp.rows.push_back(make_row({p.g_index(i, a), p.g_index(j, a)}, {1.0, -1.0}, c.c2 * r));
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = a; b < d; ++b)
        lp.rows.push_back(make_row({p.j_index(i, a, b), p.j_index(j, a, b)}, {1.0, -1.0}, c.c3 * r));
    // g_i - g_j - J_j (x_i - x_j), then g_j - g_i - J_i (x_j - x_i)
    for (int orient = 0; orient < 2; ++orient) {
      const Eigen::Index from = orient == 0 ? i : j, to = orient == 0 ? j : i;
      const double s = orient == 0 ? 1.0 : -1.0;
      for (Eigen::Index a = 0; a < d; ++a) {
        std::vector<Eigen::Index> idx{p.g_index(from, a), p.g_index(to, a)};
        std::vector<double> coef{1.0, -1.0};
        for (Eigen::Index b = 0; b < d; ++b) {
          if (delta(b) == 0.0) continue;
          idx.push_back(p.j_index(to, a, b));
          coef.push_back(-s * delta(b));
        }
        lp.rows.push_back(make_row(std::move(idx), std::move(coef), 0.5 * c.c3 * r * r));
      }
    }
  }

  // Seed the working set with the rows of a sparse neighbor graph.
  std::map<Edge, std::size_t> position;
  for (std::size_t e = 0; e < p.edges.size(); ++e) position.emplace(p.edges[e], e);
  const std::vector<Edge> seed_edges = build_edges(q.points, GraphSpec::knn(3));
  for (const auto& e : seed_edges) {
    auto it = position.find(e);
    if (it == position.end()) continue;
    const std::size_t first = it->second * static_cast<std::size_t>(per_edge);
    for (Eigen::Index k = 0; k < per_edge; ++k) lp.initial_rows.push_back(first + static_cast<std::size_t>(k));
  }
  std::sort(lp.initial_rows.begin(), lp.initial_rows.end());
  return p;
}

DiscrepancySolution solve_program(const DiscrepancyProgram& program, const LpSolver& solver) {
  DiscrepancySolution out;
  out.plus = solver.solve(program.lp);

  LpProblem negated = program.lp;
  negated.objective = -negated.objective;
  if (out.plus.status == LpStatus::kOptimal) {
    std::vector<std::size_t> rows = negated.initial_rows;
    rows.insert(rows.end(), out.plus.working_set.begin(), out.plus.working_set.end());
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    negated.initial_rows = std::move(rows);
  }
  out.minus = solver.solve(negated);

  if (out.plus.status != LpStatus::kOptimal) {
    out.status = out.plus.status;
  } else {
    out.status = out.minus.status;
  }
  const bool plus_ok = out.plus.status == LpStatus::kOptimal;
  const bool minus_ok = out.minus.status == LpStatus::kOptimal;
  if (plus_ok && (!minus_ok || out.plus.value >= out.minus.value)) {
    out.value = std::max(0.0, out.plus.value);
    out.argmax = out.plus.x;
    out.sign = 1;
  } else if (minus_ok) {
    out.value = std::max(0.0, out.minus.value);
    out.argmax = out.minus.x;
    out.sign = -1;
  }
  return out;
}

DiscrepancySolution solve_program(const DiscrepancyProgram& program) {
  return solve_program(program, DenseSimplexSolver());
}

DiscrepancyReport stein_discrepancy(const Target& target, const SampleMeasure& q, const GraphSpec& graph,
                                    const ProgramOptions& options, const LpSolver& solver) {
  const SteinFactors factors = classical_factors(smoothness_constants(target));
  const DiscrepancyProgram program = build_program(target, q, factors, graph, options);
  const DiscrepancySolution sol = solve_program(program, solver);
  DiscrepancyReport r;
  r.value = sol.value;
  r.n = program.n;
  r.d = program.d;
  r.factors = program.factors;
  r.scaled = program.scaled;
  r.inflation = program.inflation;
  r.graph = program.graph.to_string();
  r.edges = program.edges.size();
  r.status = sol.status;
  r.iterations = sol.plus.iterations + sol.minus.iterations;
  return r;
}

DiscrepancyReport stein_discrepancy(const Target& target, const SampleMeasure& q, const GraphSpec& graph,
                                    const ProgramOptions& options) {
  return stein_discrepancy(target, q, graph, options, DenseSimplexSolver());
}

}  // namespace stein_gauge
