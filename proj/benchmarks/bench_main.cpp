#include <benchmark/benchmark.h>

#include <random>

#include "stein_gauge/discrepancy.hpp"
#include "stein_gauge/functions.hpp"
#include "stein_gauge/langevin.hpp"
#include "stein_gauge/metrics.hpp"
#include "stein_gauge/targets.hpp"

using namespace stein_gauge;

namespace {

LogisticTarget make_logistic(Eigen::Index n, Eigen::Index d) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  Matrix x(n, d);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index a = 0; a < d; ++a) x(i, a) = g(rng);
    y(i) = g(rng) > 0.0 ? 1.0 : 0.0;
  }
  return LogisticTarget(1.0, x, y);
}

SampleMeasure gaussian_sample(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) m(i, 0) = g(rng);
  return SampleMeasure::uniform(m);
}

void BM_EmStep(benchmark::State& state) {
  const auto target = make_logistic(100, state.range(0));
  Vector x = Vector::Zero(state.range(0));
  const Vector noise = Vector::Constant(state.range(0), 0.01);
  for (auto _ : state) {
    x = em_step(target, x, 1e-3, noise);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_EmStep)->Arg(2)->Arg(10);

void BM_RunCoupled(benchmark::State& state) {
  const auto target = make_logistic(100, 2);
  DiffusionConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 1.0;
  CouplingGeometry geo;
  geo.x = Vector::Zero(2);
  geo.x_prime = Vector::Constant(2, 0.5);
  geo.v = Vector::Unit(2, 0);
  geo.v_prime = Vector::Unit(2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(run_coupled(target, cfg, geo));
}
BENCHMARK(BM_RunCoupled)->Unit(benchmark::kMillisecond);

void BM_Discrepancy(benchmark::State& state) {
  const auto target = GaussianTarget::standard(1);
  const auto q = gaussian_sample(state.range(0), 3);
  const auto program = build_program(target, q, {2.0, 1.0, 2.0 / 3.0}, GraphSpec::complete());
  for (auto _ : state) benchmark::DoNotOptimize(solve_program(program).value);
}
BENCHMARK(BM_Discrepancy)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SmoothedFunction(benchmark::State& state) {
  const auto d = state.range(0);
  const auto rule = default_smoothing_rule(d);
  const auto h = functions::euclidean_norm();
  const Vector x = Vector::Constant(d, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(smoothed_function(h, 0.5, x, rule).value);
}
BENCHMARK(BM_SmoothedFunction)->Arg(1)->Arg(2)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
