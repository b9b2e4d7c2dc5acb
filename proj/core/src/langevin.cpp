#include "stein_gauge/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stein_gauge/errors.hpp"
#include "stein_gauge/parallel.hpp"
#include "stein_gauge/random.hpp"

namespace stein_gauge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// a * b with 0 * inf = 0: an envelope term whose coefficient vanishes does
// not need the corresponding Lipschitz bound.
double times(double a, double b) { return (a == 0.0 || b == 0.0) ? 0.0 : a * b; }

// R replicas x S starts advanced in lockstep. Column r * S + s holds start s
// of replica r; all S starts of a replica receive the same increment, drawn
// from stream (seed, first_replica + r).
class SynchronousBlock {
 public:
  SynchronousBlock(const Target& target, const Matrix& initial, std::uint64_t seed, std::size_t first_replica,
                   std::size_t replicas, double dt)
      : target_(target),
        starts_per_replica_(static_cast<Eigen::Index>(initial.cols())),
        dt_(dt),
        sqrt_dt_(std::sqrt(dt)),
        states_(initial.rows(), initial.cols() * static_cast<Eigen::Index>(replicas)),
        drift_(states_.rows(), states_.cols()),
        noise_(initial.rows(), static_cast<Eigen::Index>(replicas)) {
    streams_.reserve(replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
      streams_.emplace_back(seed, first_replica + r);
      states_.middleCols(static_cast<Eigen::Index>(r) * starts_per_replica_, starts_per_replica_) = initial;
    }
  }

  void step() {
    target_.grad_log_p_batch(states_, drift_);
    for (std::size_t r = 0; r < streams_.size(); ++r) {
      auto col = noise_.col(static_cast<Eigen::Index>(r));
      streams_[r].fill(col, sqrt_dt_);
    }
    states_.noalias() += (0.5 * dt_) * drift_;
    for (Eigen::Index r = 0; r < noise_.cols(); ++r) {
      states_.middleCols(r * starts_per_replica_, starts_per_replica_).colwise() += noise_.col(r);
    }
  }

  void check_finite(std::size_t step, std::size_t first_replica) const {
    if (states_.allFinite()) return;
    for (Eigen::Index j = 0; j < states_.cols(); ++j) {
      if (!states_.col(j).allFinite()) {
        detail::throw_numeric("langevin", "non-finite state at step " + std::to_string(step) + " (replica " +
                                              std::to_string(first_replica + j / starts_per_replica_) +
                                              ", start " + std::to_string(j % starts_per_replica_) + ")");
      }
    }
  }

  const Matrix& states() const { return states_; }
  auto replica_states(std::size_t r) const {
    return states_.middleCols(static_cast<Eigen::Index>(r) * starts_per_replica_, starts_per_replica_);
  }

 private:
  const Target& target_;
  Eigen::Index starts_per_replica_;
  double dt_;
  double sqrt_dt_;
  Matrix states_;
  Matrix drift_;
  Matrix noise_;
  std::vector<GaussianStream> streams_;
};

Matrix start_matrix(const std::array<Vector, 8>& starts) {
  Matrix m(starts[0].size(), 8);
  for (std::size_t s = 0; s < 8; ++s) m.col(static_cast<Eigen::Index>(s)) = starts[s];
  return m;
}

// Runs `replicas` coupled ensembles starting at stream first_replica.
std::vector<CoupledEnsemble> run_block(const Target& target, const DiffusionConfig& config,
                                       const CouplingGeometry& geometry, std::size_t first_replica,
                                       std::size_t replicas, TimeGridKind grid) {
  const auto starts = geometry.starts();
  const std::size_t steps = config.steps();
  const auto grid_steps = time_grid_steps(steps, grid);

  std::vector<CoupledEnsemble> out(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    auto& e = out[r];
    e.starts = starts;
    e.grid_steps = grid_steps;
    e.seed = config.seed;
    e.replica = first_replica + r;
    e.dt = config.dt;
    e.times.reserve(grid_steps.size());
    e.snapshots.reserve(grid_steps.size());
    for (std::size_t n : grid_steps) e.times.push_back(static_cast<double>(n) * config.dt);
  }

  SynchronousBlock block(target, start_matrix(starts), config.seed, first_replica, replicas, config.dt);
  std::size_t next = 0;
  for (std::size_t n = 0; n <= steps; ++n) {
    if (n > 0) block.step();
    if (next < grid_steps.size() && grid_steps[next] == n) {
      block.check_finite(n, first_replica);
      for (std::size_t r = 0; r < replicas; ++r) out[r].snapshots.emplace_back(block.replica_states(r));
      ++next;
    }
  }
  return out;
}

ContractReport finish_report(std::string name, std::vector<ContractPoint> series, double slack) {
  ContractReport rep;
  rep.name = std::move(name);
  rep.slack = slack;
  for (const auto& p : series) {
    rep.max_ratio = std::max(rep.max_ratio, p.ratio);
    if (p.envelope == 0.0 && p.measured > kZeroEnvelopeFloor) rep.zero_envelope_violation = true;
  }
  rep.series = std::move(series);
  rep.passed = !rep.zero_envelope_violation && rep.max_ratio <= 1.0 + slack;
  return rep;
}

ContractPoint make_point(double t, double measured, double envelope) {
  ContractPoint p{t, measured, envelope, 0.0};
  if (envelope > 0.0) {
    p.ratio = measured / envelope;
  } else {
    p.ratio = measured <= kZeroEnvelopeFloor ? 0.0 : kInf;
  }
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------

DiffusionConfig DiffusionConfig::defaults_for(const SmoothnessBudget& budget) {
  budget.validate();
  DiffusionConfig c;
  c.dt = 1e-3 / budget.k;
  c.horizon = 20.0 / budget.k;
  return c;
}

void DiffusionConfig::validate(const SmoothnessBudget& budget) const {
  if (!(std::isfinite(dt) && dt > 0.0)) throw ConfigError("DiffusionConfig: dt must be positive");
  if (!(std::isfinite(horizon) && horizon > 0.0)) throw ConfigError("DiffusionConfig: horizon must be positive");
  if (dt > horizon) throw ConfigError("DiffusionConfig: dt must not exceed the horizon");
  if (replicas < 1) throw ConfigError("DiffusionConfig: replicas must be positive");
  if (dt * budget.k >= 2.0) {
    throw ConfigError("DiffusionConfig: unstable step, dt * k = " + std::to_string(dt * budget.k) + " >= 2");
  }
}

std::size_t DiffusionConfig::steps() const { return static_cast<std::size_t>(std::llround(horizon / dt)); }

std::vector<std::size_t> time_grid_steps(std::size_t steps, TimeGridKind kind) {
  std::vector<std::size_t> grid{0};
  if (kind == TimeGridKind::kEveryStep) {
    for (std::size_t n = 1; n <= steps; ++n) grid.push_back(n);
    return grid;
  }
  for (std::size_t n = 1; n < steps; n *= 2) grid.push_back(n);
  if (steps > 0) grid.push_back(steps);
  return grid;
}

Vector em_step(const Target& target, ConstVectorRef x, double dt, ConstVectorRef noise) {
  detail::require(x.size() == target.dim() && noise.size() == target.dim(), "em_step", "dimension mismatch");
  detail::require(std::isfinite(dt) && dt >= 0.0, "em_step", "dt must be nonnegative");
  const Vector drift = target.grad_log_p(x);
  if (!drift.allFinite()) {
    Eigen::Index i = 0;
    while (i < drift.size() && std::isfinite(drift(i))) ++i;
    detail::throw_numeric("em_step", "non-finite drift component " + std::to_string(i));
  }
  return x + (0.5 * dt) * drift + noise;
}

// ---------------------------------------------------------------------------

GrowthFactors compute_growth_factors(double separation, double eps, double eps_prime, double eps_dprime) {
  detail::require(eps > 0.0 && eps_prime > 0.0 && eps_dprime > 0.0, "compute_growth_factors",
                  "weights must be positive");
  detail::require(separation >= 0.0, "compute_growth_factors", "separation must be nonnegative");
  const double shared = 3.0 + eps / eps_dprime + eps / eps_prime;
  GrowthFactors g;
  g.f1 = separation + 0.5 * (eps_dprime + eps_prime) + eps * (shared + separation / eps_prime) / 3.0;
  g.f2 = separation + 1.5 * (eps_dprime + eps_prime) + eps * shared / 3.0;
  return g;
}

GrowthFactors compute_growth_factors(ConstVectorRef x, ConstVectorRef x_prime, double eps, double eps_prime,
                                     double eps_dprime) {
  detail::require(x.size() == x_prime.size(), "compute_growth_factors", "dimension mismatch");
  return compute_growth_factors((x - x_prime).norm(), eps, eps_prime, eps_dprime);
}

void CouplingGeometry::validate(Eigen::Index dim) const {
  detail::require(x.size() == dim && x_prime.size() == dim && v.size() == dim && v_prime.size() == dim,
                  "CouplingGeometry", "dimension mismatch");
  detail::require(std::abs(v.norm() - 1.0) <= 1e-12 && std::abs(v_prime.norm() - 1.0) <= 1e-12,
                  "CouplingGeometry", "directions v, v' must be unit vectors");
  detail::require(eps > 0.0 && eps_prime > 0.0 && eps_dprime > 0.0, "CouplingGeometry",
                  "weights must be positive");
}

GrowthFactors CouplingGeometry::growth() const {
  return compute_growth_factors(separation(), eps, eps_prime, eps_dprime);
}

std::array<Vector, 8> CouplingGeometry::starts() const {
  std::array<Vector, 8> s;
  for (bool at_x_prime : {false, true}) {
    const Vector& base = at_x_prime ? x_prime : x;
    const double bump = at_x_prime ? eps_dprime : eps_prime;
    for (bool primed : {false, true}) {
      for (bool eps_bump : {false, true}) {
        Vector p = base;
        if (primed) p += bump * v_prime;
        if (eps_bump) p += eps * v;
        s[start_index(at_x_prime, primed, eps_bump)] = std::move(p);
      }
    }
  }
  return s;
}

DifferenceProcesses difference_processes(const CoupledEnsemble& ensemble, const CouplingGeometry& g) {
  constexpr auto idx = [](bool xp, bool pr, bool ep) { return static_cast<Eigen::Index>(CouplingGeometry::start_index(xp, pr, ep)); };
  DifferenceProcesses d;
  d.dz_series.reserve(ensemble.snapshots.size());
  d.v_series.reserve(ensemble.snapshots.size());
  d.u_series.reserve(ensemble.snapshots.size());
  for (const Matrix& z : ensemble.snapshots) {
    d.dz_series.emplace_back(z.col(idx(false, false, true)) - z.col(idx(false, false, false)));
    d.v_series.emplace_back((z.col(idx(true, true, false)) - z.col(idx(true, false, false))) / g.eps_dprime -
                            (z.col(idx(false, true, false)) - z.col(idx(false, false, false))) / g.eps_prime);
    const Vector second_prime = z.col(idx(true, true, true)) - z.col(idx(true, true, false)) -
                                (z.col(idx(true, false, true)) - z.col(idx(true, false, false)));
    const Vector second = z.col(idx(false, true, true)) - z.col(idx(false, true, false)) -
                          (z.col(idx(false, false, true)) - z.col(idx(false, false, false)));
    d.u_series.emplace_back(second_prime / (g.eps * g.eps_dprime) - second / (g.eps * g.eps_prime));
  }
  return d;
}

CoupledRun run_coupled(const Target& target, const DiffusionConfig& config, const CouplingGeometry& geometry,
                       std::size_t replica, TimeGridKind grid) {
  const SmoothnessBudget budget = smoothness_constants(target);
  config.validate(budget);
  geometry.validate(target.dim());
  CoupledRun run;
  run.ensemble = std::move(run_block(target, config, geometry, replica, 1, grid).front());
  run.diffs = difference_processes(run.ensemble, geometry);
  return run;
}

// ---------------------------------------------------------------------------

double discretization_slack(double dt, double k) { return 5.0 * dt * k; }

ContractReport check_contract(Contract contract, const CoupledEnsemble& ensemble, const DifferenceProcesses& diffs,
                              const SmoothnessBudget& budget, const CouplingGeometry& geometry, double slack) {
  budget.validate();
  detail::require(diffs.dz_series.size() == ensemble.times.size() && diffs.v_series.size() == ensemble.times.size() &&
                      diffs.u_series.size() == ensemble.times.size(),
                  "check_contract", "difference processes do not match the ensemble grid");
  const double k = budget.k;
  double scale = 0.0;
  const std::vector<Vector>* series = nullptr;
  std::string name;
  switch (contract) {
    case Contract::kFirst:
      name = "contract1";
      scale = geometry.eps;
      series = &diffs.dz_series;
      break;
    case Contract::kSecond:
      name = "contract2";
      scale = times(budget.l3 / k, geometry.separation() + 0.5 * (geometry.eps_dprime + geometry.eps_prime));
      series = &diffs.v_series;
      break;
    case Contract::kThird: {
      name = "contract3";
      const GrowthFactors g = geometry.growth();
      scale = times(3.0 * budget.l3 * budget.l3 / (k * k), g.f1) + times(budget.l4 / (2.0 * k), g.f2);
      series = &diffs.u_series;
      break;
    }
  }
  std::vector<ContractPoint> points;
  points.reserve(ensemble.times.size());
  for (std::size_t i = 0; i < ensemble.times.size(); ++i) {
    const double t = ensemble.times[i];
    points.push_back(make_point(t, (*series)[i].norm(), scale * std::exp(-0.5 * k * t)));
  }
  return finish_report(std::move(name), std::move(points), slack);
}

ContractReport check_function_contract(int order, const SmoothFunction& h, const CoupledEnsemble& ensemble,
                                       const SmoothnessBudget& budget, const CouplingGeometry& g, double slack) {
  budget.validate();
  detail::require(order == 2 || order == 3, "check_function_contract", "order must be 2 or 3");
  detail::require(static_cast<bool>(h.value), "check_function_contract", "test function has no value oracle");
  const double k = budget.k;
  const double l3 = budget.l3;
  const double l4 = budget.l4;
  const auto idx = [](bool xp, bool pr, bool ep) {
    return static_cast<Eigen::Index>(CouplingGeometry::start_index(xp, pr, ep));
  };
  const double reach = g.separation() + 0.5 * (g.eps_dprime + g.eps_prime);
  const GrowthFactors gf = g.growth();

  std::vector<ContractPoint> points;
  points.reserve(ensemble.times.size());
  for (std::size_t i = 0; i < ensemble.times.size(); ++i) {
    const double t = ensemble.times[i];
    const Matrix& z = ensemble.snapshots[i];
    const auto hv = [&](bool xp, bool pr, bool ep) { return h.value(z.col(idx(xp, pr, ep))); };
    const double decay = std::exp(-0.5 * k * t);
    double lhs = 0.0;
    double env = 0.0;
    if (order == 2) {
      lhs = (hv(true, true, false) - hv(true, false, false)) / g.eps_dprime -
            (hv(false, true, false) - hv(false, false, false)) / g.eps_prime;
      env = (times(h.m1, l3 / k * decay) + times(h.m2, decay * decay)) * reach;
    } else {
      const double primed = hv(true, true, true) - hv(true, true, false) - (hv(true, false, true) - hv(true, false, false));
      const double plain =
          hv(false, true, true) - hv(false, true, false) - (hv(false, false, true) - hv(false, false, false));
      lhs = primed / (g.eps * g.eps_dprime) - plain / (g.eps * g.eps_prime);
      env = times(times(h.m1, 3.0 * l3 * l3 / (k * k) * decay) + times(h.m2, 3.0 * l3 / k * decay * decay), gf.f1) +
            times(times(h.m1, l4 / (2.0 * k) * decay) + times(h.m3, decay * decay * decay), gf.f2);
    }
    points.push_back(make_point(t, std::abs(lhs), env));
  }
  return finish_report(order == 2 ? "function_contract2" : "function_contract3", std::move(points), slack);
}

// ---------------------------------------------------------------------------

CouplingVerification verify_coupling(const Target& target, const DiffusionConfig& config,
                                     const CouplingGeometry& geometry, double slack, double required_fraction,
                                     const std::vector<SmoothFunction>& order2_functions,
                                     const std::vector<SmoothFunction>& order3_functions) {
  const SmoothnessBudget budget = smoothness_constants(target);
  config.validate(budget);
  geometry.validate(target.dim());

  const std::size_t checks = 3 + order2_functions.size() + order3_functions.size();
  // ratios[c][r]: worst grid ratio of check c in replica r; passed[c][r].
  std::vector<std::vector<double>> ratios(checks, std::vector<double>(config.replicas));
  std::vector<std::vector<char>> passed(checks, std::vector<char>(config.replicas));
  std::vector<std::string> names(checks);

  constexpr std::size_t kBlock = 32;
  const std::size_t blocks = (config.replicas + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t first = b * kBlock;
    const std::size_t count = std::min(kBlock, config.replicas - first);
    auto ensembles = run_block(target, config, geometry, first, count, TimeGridKind::kGeometric);
    for (std::size_t r = 0; r < count; ++r) {
      const DifferenceProcesses diffs = difference_processes(ensembles[r], geometry);
      std::vector<ContractReport> reps;
      reps.push_back(check_contract(Contract::kFirst, ensembles[r], diffs, budget, geometry, slack));
      reps.push_back(check_contract(Contract::kSecond, ensembles[r], diffs, budget, geometry, slack));
      reps.push_back(check_contract(Contract::kThird, ensembles[r], diffs, budget, geometry, slack));
      for (const auto& h : order2_functions) {
        reps.push_back(check_function_contract(2, h, ensembles[r], budget, geometry, slack));
        reps.back().name += ":" + h.name;
      }
      for (const auto& h : order3_functions) {
        reps.push_back(check_function_contract(3, h, ensembles[r], budget, geometry, slack));
        reps.back().name += ":" + h.name;
      }
      for (std::size_t c = 0; c < checks; ++c) {
        ratios[c][first + r] = reps[c].max_ratio;
        passed[c][first + r] = reps[c].passed ? 1 : 0;
        if (first + r == 0) names[c] = reps[c].name;
      }
    }
  });

  CouplingVerification out;
  out.seed = config.seed;
  out.dt = config.dt;
  out.horizon = config.horizon;
  out.slack = slack;
  out.required_fraction = required_fraction;
  out.replicas = config.replicas;
  out.passed = true;
  for (std::size_t c = 0; c < checks; ++c) {
    ContractTally tally;
    tally.name = names[c];
    tally.total = config.replicas;
    for (std::size_t r = 0; r < config.replicas; ++r) tally.passed += passed[c][r];
    std::vector<double> sorted = ratios[c];
    std::sort(sorted.begin(), sorted.end());
    tally.worst_ratio = sorted.back();
    tally.median_ratio = sorted[sorted.size() / 2];
    out.passed = out.passed && tally.pass_fraction() >= required_fraction;
    out.contracts.push_back(std::move(tally));
  }
  return out;
}

// ---------------------------------------------------------------------------

SteinSolutionEstimate estimate_u_h(const Target& target, const SmoothFunction& h, ConstVectorRef x,
                                   ConstVectorRef y, const DiffusionConfig& config, std::optional<double> tolerance) {
  const SmoothnessBudget budget = smoothness_constants(target);
  config.validate(budget);
  detail::require(x.size() == target.dim() && y.size() == target.dim(), "estimate_u_h", "dimension mismatch");
  detail::require(static_cast<bool>(h.value), "estimate_u_h", "test function has no value oracle");

  SteinSolutionEstimate est;
  est.horizon = static_cast<double>(config.steps()) * config.dt;
  est.replicas = config.replicas;
  const double separation = (x - y).norm();
  est.truncation_bound =
      times(times(2.0 / budget.k, h.m1), separation) * std::exp(-0.5 * budget.k * est.horizon);
  if (tolerance && !(est.truncation_bound <= *tolerance)) {
    throw ConfigError("estimate_u_h: horizon too short, truncation bound " + std::to_string(est.truncation_bound) +
                      " exceeds tolerance " + std::to_string(*tolerance));
  }

  Matrix initial(target.dim(), 2);
  initial.col(0) = x;
  initial.col(1) = y;
  const std::size_t steps = config.steps();
  const double dt = config.dt;

  std::vector<double> integrals(config.replicas, 0.0);
  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (config.replicas + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t first = b * kBlock;
    const std::size_t count = std::min(kBlock, config.replicas - first);
    SynchronousBlock block(target, initial, config.seed, first, count, dt);
    std::vector<double> previous(count);
    const auto integrand = [&](std::size_t r) {
      const auto z = block.replica_states(r);
      return h.value(z.col(1)) - h.value(z.col(0));
    };
    for (std::size_t r = 0; r < count; ++r) previous[r] = integrand(r);
    for (std::size_t n = 1; n <= steps; ++n) {
      block.step();
      if ((n & 1023) == 0 || n == steps) block.check_finite(n, first);
      for (std::size_t r = 0; r < count; ++r) {
        const double current = integrand(r);
        integrals[first + r] += 0.5 * dt * (previous[r] + current);
        previous[r] = current;
      }
    }
  });

  double mean = 0.0;
  for (double v : integrals) mean += v;
  mean /= static_cast<double>(integrals.size());
  double ss = 0.0;
  for (double v : integrals) ss += (v - mean) * (v - mean);
  est.value = mean;
  est.std_error = integrals.size() > 1 ? std::sqrt(ss / (integrals.size() - 1) / integrals.size()) : 0.0;
  if (!std::isfinite(est.value)) detail::throw_numeric("estimate_u_h", "non-finite estimate");
  return est;
}

}  // namespace stein_gauge
