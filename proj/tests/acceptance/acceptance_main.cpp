// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stein_gauge/discrepancy.hpp"
#include "stein_gauge/factors.hpp"
#include "stein_gauge/langevin.hpp"
#include "stein_gauge/metrics.hpp"
#include "stein_gauge/oracles.hpp"
#include "stein_gauge/targets.hpp"
#include "test_support.hpp"

using namespace stein_gauge;
using stein_gauge::testing::vec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LogisticTarget one_unit_datapoint() {
  Matrix v(1, 2);
  v << 1.0, 0.0;
  return LogisticTarget(1.0, v, Vector::Ones(1));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SampleMeasure draws(std::mt19937_64& rng, std::size_t n, double mean) {
  std::normal_distribution<double> g(mean, 1.0);
  Matrix m(static_cast<Eigen::Index>(n), 1);
  for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, 0) = g(rng);
  return SampleMeasure::uniform(m);
}

// 1. u_h(1) - u_h(0) = -2 for h(x) = x under N(0, 1).
Outcome theorem1_tightness() {
  const auto target = GaussianTarget::standard(1);
  DiffusionConfig c;
  c.dt = 1e-3;
  c.horizon = 20.0;
  c.replicas = 10000;
  c.seed = 1;
  const auto est = estimate_u_h(target, functions::linear(vec({1.0})), vec({1.0}), vec({0.0}), c);
  const double bound = solution_factor_bounds(target.smoothness(), {1.0, 0.0, 0.0}).b1;
  const double rel = std::abs(est.value + 2.0) / 2.0;
  const double tightness = std::abs(est.value) / bound;
  return {rel <= 0.05 && std::abs(tightness - 1.0) <= 0.05,
          fmt("estimate %.6f (oracle -2, rel err %.2e), |estimate|/((2/k) M1(h)) = %.6f, se %.1e, tail %.1e",
              est.value, rel, tightness, est.std_error, est.truncation_bound)};
}

// 2. Gaussian contract1 and the exact recursion |dZ_n| = eps (1 - k dt / 2)^n.
Outcome gaussian_contract1() {
  bool ok = true;
  double worst_ratio = 0.0, worst_recursion = 0.0;
  std::size_t points = 0;
  for (double k : {0.5, 1.0, 2.0}) {
    for (double eps : {0.01, 0.1}) {
      const auto target = GaussianTarget::isotropic(1, k);
      CouplingGeometry g;
      g.x = vec({0.0});
      g.x_prime = vec({0.5});
      g.v = g.v_prime = vec({1.0});
      g.eps = g.eps_prime = g.eps_dprime = eps;
      DiffusionConfig c;
      c.dt = 1e-3;
      c.horizon = 10.0;
      for (std::size_t replica = 0; replica < 5; ++replica) {
        c.seed = 100 + replica;
        const auto run = run_coupled(target, c, g, replica, TimeGridKind::kEveryStep);
        const auto rep = check_contract(Contract::kFirst, run.ensemble, run.diffs, target.smoothness(), g);
        worst_ratio = std::max(worst_ratio, rep.max_ratio);
        ok = ok && rep.max_ratio <= 1.0;
        const double rho = 1.0 - k * c.dt / 2.0;
        for (std::size_t i = 0; i < run.ensemble.grid_steps.size(); ++i) {
          const double exact = eps * std::pow(rho, static_cast<double>(run.ensemble.grid_steps[i]));
          worst_recursion = std::max(worst_recursion, std::abs(run.diffs.dz_series[i].norm() - exact));
          ++points;
        }
      }
    }
  }
  ok = ok && worst_recursion <= 1e-12;
  return {ok, fmt("max ratio %.15f over 30 runs, max |dZ - eps(1-k dt/2)^n| = %.2e at %zu grid points", worst_ratio,
                  worst_recursion, points)};
}

// 3. Logistic contract2 / contract3 in >= 99% of 1000 replicas.
Outcome logistic_contracts() {
  const auto target = one_unit_datapoint();
  CouplingGeometry g;
  g.x = vec({0.0, 0.0});
  g.x_prime = vec({0.5, -0.25});
  g.v = vec({1.0, 0.0});
  g.v_prime = vec({0.6, 0.8});
  g.eps = 0.1;
  g.eps_prime = 0.1;
  g.eps_dprime = 0.2;
  DiffusionConfig c;
  c.dt = 1e-3;
  c.horizon = 10.0;
  c.replicas = 1000;
  c.seed = 2024;
  const double k = target.smoothness().k;
  const double slack = 5.0 * c.dt * k;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = verify_coupling(target, c, g, slack, 0.99);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& c2 = rep.contracts.at(1);
  const auto& c3 = rep.contracts.at(2);
  const bool ok = c2.name == "contract2" && c3.name == "contract3" && c2.pass_fraction() >= 0.99 &&
                  c3.pass_fraction() >= 0.99;
  return {ok, fmt("contract2 %zu/%zu (worst %.4f), contract3 %zu/%zu (worst %.4f), limit 1+%.3g, %.1f s", c2.passed,
                  c2.total, c2.worst_ratio, c3.passed, c3.total, c3.worst_ratio, slack, secs)};
}

// 4. Logistic constants, factors and kernel maxima.
Outcome logistic_constants() {
  const auto target = one_unit_datapoint();
  const auto b = smoothness_constants(target);
  const auto f = logistic_factors(target);
  const auto kernels = verify_derivative_bounds();
  const double sqrt3 = std::numbers::sqrt3;
  // Closed form of the logistic factor display at sigma2 = 1, ||v|| = 1.
  const double c3 = 1.0 / 18.0 + 1.0 / 8.0 + 1.0 / (2.0 * sqrt3) + 2.0 / 3.0;
  const bool ok = std::abs(b.k - 1.0) <= 1e-6 && std::abs(b.l3 - 0.0962250) <= 1e-6 && std::abs(b.l4 - 0.125) <= 1e-6 &&
                  std::abs(f.c1 - 2.0) <= 1e-6 && std::abs(f.c2 - 1.1924500) <= 1e-6 && std::abs(f.c3 - c3) <= 1e-6 &&
                  std::abs(kernels.third_max - 1.0 / (6.0 * sqrt3)) <= 1e-6 &&
                  std::abs(kernels.fourth_max - 0.125) <= 1e-6 && kernels.confirmed;
  return {ok, fmt("(k,L3,L4) = (%.7f, %.7f, %.7f), (c1,c2,c3) = (%.7f, %.7f, %.7f), kernel maxima %.7f, %.7f",
                  b.k, b.l3, b.l4, f.c1, f.c2, f.c3, kernels.third_max, kernels.fourth_max)};
}

// 5. Weighted difference inequalities on random polynomials.
Outcome lemma2_suite() {
  Lemma2SuiteConfig c;
  c.instances = 1000;
  c.equality_instances = 100;
  c.seed = 5;
  const auto r = run_lemma2_suite(c);
  const bool ok = r.instances == 1000 && r.second_violations == 0 && r.third_violations == 0 &&
                  r.equality_worst_rel_gap <= 1e-9;
  return {ok, fmt("%zu instances, violations %zu/%zu, worst ratios %.4f/%.4f, equality |lhs/rhs-1| <= %.1e", r.instances,
                  r.second_violations, r.third_violations, r.worst_second_ratio, r.worst_third_ratio,
                  r.equality_worst_rel_gap)};
}

// 6. Smoothing derivative bounds for |x| within 2%.
Outcome smoothing_bounds() {
  const auto rule = default_smoothing_rule(1);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  bool ok = true;
  std::string detail;
  for (double t : {0.1, 1.0, 10.0}) {
    std::vector<Vector> probes{vec({0.0})};
    for (int i = 0; i < 100; ++i) probes.push_back(vec({2.0 * t * g(rng)}));
    const auto r = verify_smoothing_derivative_bounds(functions::abs_coordinate(0), t, probes, rule);
    const double b2 = std::sqrt(2.0 / std::numbers::pi) / t, b3 = std::sqrt(2.0) / (t * t);
    ok = ok && r.m1.estimate <= 1.02 && r.m2.estimate <= 1.02 * b2 && r.m3.estimate <= 1.02 * b3;
    detail += fmt("t=%g: M1 %.4f/1, M2 %.4g/%.4g, M3 %.4g/%.4g; ", t, r.m1.estimate, r.m2.estimate, b2,
                  r.m3.estimate, b3);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

// 7. W1(Q, P) <= wasserstein_upper(discrepancy) for Q = 200 draws of N(0.5, 1).
Outcome sandwich() {
  const auto target = GaussianTarget::standard(1);
  constexpr std::size_t kRef = 100000, kN = 200;
  std::mt19937_64 ref_rng(777);
  std::normal_distribution<double> g;
  std::vector<double> reference(kRef);
  for (auto& x : reference) x = g(ref_rng);
  // Sampling error of the reference: W1(reference, N(0,1)) = int |F_n - Phi|.
  std::vector<double> sorted = reference;
  std::sort(sorted.begin(), sorted.end());
  double ref_err = 0.0;
  constexpr double kStep = 1e-3;
  for (double x = -8.0; x < 8.0; x += kStep) {
    const double mid = x + kStep / 2;
    const double fn = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), mid) - sorted.begin()) / kRef;
    ref_err += std::abs(fn - 0.5 * std::erfc(-mid / std::numbers::sqrt2)) * kStep;
  }

  std::size_t held = 0;
  double min_gap = std::numeric_limits<double>::infinity(), max_w1 = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const auto q = draws(rng, kN, 0.5);
    std::vector<double> expanded;
    expanded.reserve(kRef);
    for (Eigen::Index i = 0; i < q.size(); ++i)
      for (std::size_t r = 0; r < kRef / kN; ++r) expanded.push_back(q.points(i, 0));
    const double w1 = wasserstein_1d_exact(expanded, reference);
    const auto rep = stein_discrepancy(target, q);
    const double upper = wasserstein_upper(rep.value, 1);
    if (rep.status == LpStatus::kOptimal && w1 <= upper) ++held;
    min_gap = std::min(min_gap, upper - w1);
    max_w1 = std::max(max_w1, w1);
  }
  return {held == 20, fmt("%zu/20 trials hold, max W1 %.4f, min (bound - W1) %.4f, reference sampling error %.4f", held,
                          max_w1, min_gap, ref_err)};
}

// 8. Discrepancy sanity checks.
Outcome discrepancy_sanity() {
  const auto target = GaussianTarget::standard(1);
  const auto f = classical_factors(target.smoothness());
  bool ok = true;

  Matrix mode(1, 1);
  mode << 0.0;
  const auto at_mode = stein_discrepancy(target, SampleMeasure::uniform(mode));
  const bool mode_ok = at_mode.status == LpStatus::kOptimal && std::abs(at_mode.value - 0.5) <= 1e-12;
  ok = ok && mode_ok;

  std::vector<double> small, large;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(5000 + seed);
    const auto r30 = stein_discrepancy(target, draws(rng, 30, 0.0));
    const auto r300 = stein_discrepancy(target, draws(rng, 300, 0.0));
    ok = ok && r30.status == LpStatus::kOptimal && r300.status == LpStatus::kOptimal;
    small.push_back(r30.value);
    large.push_back(r300.value);
  }
  const double med30 = median(small), med300 = median(large);
  ok = ok && med300 < med30;

  double dup_gap = 0.0;
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    auto q = draws(rng, 12, 0.0);
    SampleMeasure d;
    d.points.resize(13, 1);
    d.points.topRows(12) = q.points;
    d.points(12, 0) = q.points(trial, 0);
    d.weights.resize(13);
    d.weights.head(12) = q.weights;
    d.weights(trial) = 0.25 / 12.0;
    d.weights(12) = 0.75 / 12.0;
    const auto a = solve_program(build_program(target, q, f, GraphSpec::complete()));
    const auto b = solve_program(build_program(target, d, f, GraphSpec::complete()));
    dup_gap = std::max(dup_gap, std::abs(a.value - b.value));
  }
  ok = ok && dup_gap <= 1e-8;

  double oracle_gap = 0.0;
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::normal_distribution<double> pts(0.0, 1.5);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t n = 1 + trial % 3;
    std::vector<double> x, w, grad;
    for (std::size_t i = 0; i < n; ++i) {
      x.push_back(pts(rng));
      w.push_back(u(rng));
    }
    double total = 0.0;
    for (double wi : w) total += wi;
    SampleMeasure q;
    q.points.resize(static_cast<Eigen::Index>(n), 1);
    q.weights.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      w[i] /= total;
      q.points(static_cast<Eigen::Index>(i), 0) = x[i];
      q.weights(static_cast<Eigen::Index>(i)) = w[i];
      grad.push_back(-x[i]);
    }
    const auto lp = solve_program(build_program(target, q, f, GraphSpec::complete()));
    const double brute = stein_gauge::testing::brute_force_discrepancy_1d(x, w, grad, f.c1, f.c2, f.c3);
    oracle_gap = std::max(oracle_gap, std::abs(lp.value - brute));
  }
  ok = ok && oracle_gap <= 1e-6;

  return {ok, fmt("mode value %.15f, median n=300 %.4f < n=30 %.4f, duplicate gap %.1e, brute-force gap %.1e",
                  at_mode.value, med300, med30, dup_gap, oracle_gap)};
}

// 9. E||G|| against Monte Carlo.
Outcome gaussian_norm() {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  bool ok = true;
  std::string detail;
  for (Eigen::Index d : {1, 2, 3, 10}) {
    constexpr int kDraws = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < kDraws; ++i) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        const double z = g(rng);
        s += z * z;
      }
      const double n = std::sqrt(s);
      sum += n;
      sum2 += n * n;
    }
    const double mean = sum / kDraws;
    const double se = std::sqrt((sum2 / kDraws - mean * mean) / (kDraws - 1));
    const double exact = expected_gaussian_norm(d);
    const double z = std::abs(exact - mean) / se;
    ok = ok && z <= 3.0;
    detail += fmt("d=%ld %.6f vs MC %.6f (%.2f se); ", static_cast<long>(d), exact, mean, z);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"u_h tightness for N(0,1), h(x)=x", theorem1_tightness},
      {"Gaussian contract1 and exact recursion", gaussian_contract1},
      {"logistic contract2/contract3 over 1000 replicas", logistic_contracts},
      {"logistic smoothness constants and factors", logistic_constants},
      {"weighted difference inequalities, 1000 instances", lemma2_suite},
      {"smoothing derivative bounds for |x|", smoothing_bounds},
      {"W1 sandwich, 20 seeds", sandwich},
      {"discrepancy sanity", discrepancy_sanity},
      {"E||G|| against Monte Carlo", gaussian_norm},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
              << fmt(" (%.1f s)", secs) << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " acceptance criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
