#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "stein_gauge/discrepancy.hpp"
#include "stein_gauge/errors.hpp"
#include "stein_gauge/factors.hpp"
#include "test_support.hpp"

using namespace stein_gauge;
using stein_gauge::testing::brute_force_discrepancy_1d;
using stein_gauge::testing::random_points;
using stein_gauge::testing::vec;

namespace {

SampleMeasure one_d(std::vector<double> pts, std::vector<double> w = {}) {
  Matrix m(static_cast<Eigen::Index>(pts.size()), 1);
  for (std::size_t i = 0; i < pts.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = pts[i];
  if (w.empty()) return SampleMeasure::uniform(m);
  SampleMeasure q;
  q.points = m;
  q.weights = Vector(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) q.weights(static_cast<Eigen::Index>(i)) = w[i];
  return q;
}

double solve_value(const Target& t, const SampleMeasure& q, const SteinFactors& f, const GraphSpec& g) {
  const auto s = solve_program(build_program(t, q, f, g));
  EXPECT_EQ(s.status, LpStatus::kOptimal);
  return s.value;
}

}  // namespace

TEST(SampleMeasure, Validation) {
  EXPECT_NO_THROW(one_d({0.0, 1.0}).validate());
  EXPECT_THROW(one_d({0.0, 1.0}, {0.5, 0.4}).validate(), InputError);
  EXPECT_THROW(one_d({0.0, 1.0}, {1.5, -0.5}).validate(), InputError);
  EXPECT_THROW(one_d({0.0, NAN}).validate(), InputError);
  EXPECT_THROW(SampleMeasure::uniform(Matrix(0, 1)).validate(), InputError);
  const auto q = SampleMeasure::uniform(Matrix::Zero(4, 2));
  EXPECT_DOUBLE_EQ(q.weights.sum(), 1.0);
  EXPECT_EQ(q.dim(), 2);
}

TEST(GraphSpec, ParseResolvePrint) {
  EXPECT_EQ(GraphSpec::parse("complete").kind, GraphSpec::Kind::kComplete);
  EXPECT_EQ(GraphSpec::parse("knn:7").neighbors, 7u);
  EXPECT_EQ(GraphSpec::parse("auto").kind, GraphSpec::Kind::kAuto);
  EXPECT_THROW(GraphSpec::parse("knn:"), InputError);
  EXPECT_THROW(GraphSpec::parse("knn:-1"), InputError);
  EXPECT_THROW(GraphSpec::parse("star"), InputError);
  EXPECT_EQ(GraphSpec::automatic().resolve(500).to_string(), "complete");
  EXPECT_EQ(GraphSpec::automatic().resolve(501).to_string(), "knn:5");
  EXPECT_EQ(GraphSpec::knn(2).resolve(10).to_string(), "knn:2");
}

TEST(BuildEdges, CompleteAndNearestNeighbors) {
  Matrix pts(4, 1);
  pts << 0.0, 1.0, 2.0, 10.0;
  EXPECT_EQ(build_edges(pts, GraphSpec::complete()).size(), 6u);
  // 1 is equidistant from 0 and 2: the lower index wins.
  const auto e = build_edges(pts, GraphSpec::knn(1));
  EXPECT_EQ(e, (std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}}));
  EXPECT_EQ(build_edges(pts, GraphSpec::knn(3)).size(), 6u);
}

TEST(BuildProgram, Errors) {
  const auto g = GaussianTarget::standard(1);
  EXPECT_THROW(build_program(g, one_d({0.0, 1.0}), {2, 1, 1}, GraphSpec::knn(0)), InputError);
  EXPECT_NO_THROW(build_program(g, one_d({0.0}), {2, 1, 1}, GraphSpec::knn(0)));
  EXPECT_THROW(build_program(g, SampleMeasure::uniform(Matrix::Zero(2, 2)), {2, 1, 1}), InputError);
  EXPECT_THROW(build_program(g, one_d({0.0}), {-1, 1, 1}), InputError);
}

TEST(BuildProgram, LayoutAndInflation) {
  const auto g = GaussianTarget::standard(2);
  const auto p = build_program(g, SampleMeasure::uniform(Matrix::Zero(3, 2)), {2, 1, 0.5});
  EXPECT_EQ(p.vars_per_point(), 5);
  EXPECT_EQ(p.lp.num_vars(), 15);
  EXPECT_NEAR(p.inflation, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(p.scaled.c2, std::sqrt(2.0), 1e-15);
  EXPECT_EQ(p.edges.size(), 3u);
  EXPECT_EQ(p.g_index(1, 1), 6);
  EXPECT_EQ(p.j_index(1, 0, 1), p.j_index(1, 1, 0));
  ProgramOptions none;
  none.relaxation = NormRelaxation::kNone;
  EXPECT_EQ(build_program(g, SampleMeasure::uniform(Matrix::Zero(1, 2)), {2, 1, 0.5}, GraphSpec::automatic(), none)
                .inflation,
            1.0);
}

TEST(SteinDiscrepancy, SinglePointAtMode) {
  const auto r = stein_discrepancy(GaussianTarget::standard(1), one_d({0.0}));
  EXPECT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.value, 0.5, 1e-12);
  EXPECT_EQ(r.graph, "complete");
  EXPECT_NEAR(r.factors.c1, 2.0, 1e-15);
}

TEST(SteinDiscrepancy, ZeroFactorsGiveZero) {
  std::mt19937_64 rng(1);
  const auto q = SampleMeasure::uniform(random_points(rng, 8, 2));
  EXPECT_EQ(solve_value(GaussianTarget::standard(2), q, {0.0, 0.0, 0.0}, GraphSpec::complete()), 0.0);
}

TEST(SteinDiscrepancy, FarPointMassHasLargeValue) {
  const auto r = stein_discrepancy(GaussianTarget::standard(1), one_d({10.0}));
  EXPECT_GE(r.value, 9.5);
}

TEST(SteinDiscrepancy, SymmetricPairMatchesOracle) {
  const auto g = GaussianTarget::standard(1);
  const auto f = classical_factors(g.smoothness());
  for (double a : {0.1, 0.5, 1.0, 2.0}) {
    const double v = solve_value(g, one_d({-a, a}), f, GraphSpec::complete());
    EXPECT_NEAR(v, brute_force_discrepancy_1d({-a, a}, {0.5, 0.5}, {a, -a}, f.c1, f.c2, f.c3), 1e-6) << a;
  }
}

TEST(SteinDiscrepancy, SmallInstancesMatchBruteForce) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n01(0.0, 1.5);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Matrix v(2, 1);
  v << 1.0, -0.5;
  const LogisticTarget logistic(1.0, v, vec({1.0, 0.0}));
  const GaussianTarget gaussian = GaussianTarget::standard(1);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n = 1 + trial % 3;
    std::vector<double> pts, w, grads;
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back(n01(rng));
      w.push_back(u(rng));
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;
    const Target& t = trial % 2 ? static_cast<const Target&>(logistic) : static_cast<const Target&>(gaussian);
    for (double x : pts) grads.push_back(t.grad_log_p(vec({x}))(0));
    const auto f = classical_factors(t.smoothness());
    const double lp = solve_value(t, one_d(pts, w), f, GraphSpec::complete());
    EXPECT_NEAR(lp, brute_force_discrepancy_1d(pts, w, grads, f.c1, f.c2, f.c3), 1e-6) << "trial " << trial;
  }
}

TEST(SteinDiscrepancy, PermutationInvariance) {
  std::mt19937_64 rng(5);
  const auto target = GaussianTarget::standard(2);
  const auto f = classical_factors(target.smoothness());
  for (int trial = 0; trial < 3; ++trial) {
    const Matrix pts = random_points(rng, 12, 2, 0.3);
    std::vector<Eigen::Index> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix shuffled(12, 2);
    for (Eigen::Index i = 0; i < 12; ++i) shuffled.row(i) = pts.row(perm[static_cast<std::size_t>(i)]);
    const double a = solve_value(target, SampleMeasure::uniform(pts), f, GraphSpec::complete());
    const double b = solve_value(target, SampleMeasure::uniform(shuffled), f, GraphSpec::complete());
    EXPECT_NEAR(a, b, 1e-10);
  }
}

TEST(SteinDiscrepancy, SparserGraphNeverSmaller) {
  std::mt19937_64 rng(21);
  const auto target = GaussianTarget::standard(1);
  const auto f = classical_factors(target.smoothness());
  for (int trial = 0; trial < 10; ++trial) {
    const auto q = SampleMeasure::uniform(random_points(rng, 25, 1));
    const double complete = solve_value(target, q, f, GraphSpec::complete());
    const double sparse = solve_value(target, q, f, GraphSpec::knn(2));
    EXPECT_GE(sparse, complete - 1e-9);
  }
}

TEST(SteinDiscrepancy, DuplicatePointInvariance) {
  std::mt19937_64 rng(8);
  const auto target = GaussianTarget::standard(1);
  const auto f = classical_factors(target.smoothness());
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(stein_gauge::testing::random_vector(rng, 1)(0));
    std::vector<double> w(10, 0.1);
    const double base = solve_value(target, one_d(pts, w), f, GraphSpec::complete());
    auto pts2 = pts;
    auto w2 = w;
    pts2.push_back(pts[3]);
    w2[3] = 0.03;
    w2.push_back(0.07);
    const double dup = solve_value(target, one_d(pts2, w2), f, GraphSpec::complete());
    EXPECT_NEAR(base, dup, 1e-8);
  }
}

TEST(SteinDiscrepancy, ArgmaxIsFeasible) {
  std::mt19937_64 rng(13);
  const auto target = GaussianTarget::standard(2);
  const auto p = build_program(target, SampleMeasure::uniform(random_points(rng, 15, 2)),
                               classical_factors(target.smoothness()));
  const auto s = solve_program(p);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_GE(s.value, 0.0);
  for (const auto& row : p.lp.rows) EXPECT_LE(row.violation(s.argmax), 1e-8);
  EXPECT_NEAR(s.sign * p.lp.objective.dot(s.argmax), s.value, 1e-9);
}

TEST(SteinDiscrepancy, MoreTargetDrawsLowerValue) {
  const auto target = GaussianTarget::standard(1);
  std::vector<double> small, large;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    small.push_back(stein_discrepancy(target, SampleMeasure::uniform(random_points(rng, 10, 1))).value);
    large.push_back(stein_discrepancy(target, SampleMeasure::uniform(random_points(rng, 100, 1))).value);
  }
  std::sort(small.begin(), small.end());
  std::sort(large.begin(), large.end());
  EXPECT_LT(large[2], small[2]);
}
