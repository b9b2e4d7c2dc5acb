#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stein_gauge/functions.hpp"
#include "stein_gauge/smoothness.hpp"
#include "stein_gauge/targets.hpp"
#include "stein_gauge/types.hpp"

namespace stein_gauge {

/// Euler-Maruyama discretization of dZ = (1/2) grad log p(Z) dt + dW.
struct DiffusionConfig {
  double dt = 1e-3;
  double horizon = 20.0;
  std::uint64_t seed = 0;
  std::size_t replicas = 1;

  /// dt = 1e-3 / k, horizon = 20 / k.
  static DiffusionConfig defaults_for(const SmoothnessBudget& budget);

  /// Throws ConfigError unless 0 < dt <= horizon, dt * k < 2, replicas >= 1.
  void validate(const SmoothnessBudget& budget) const;
  std::size_t steps() const;
};

enum class TimeGridKind { kGeometric, kEveryStep };

/// Step indices at which ensembles are recorded: {0, 1, 2, 4, ..., steps}
/// for kGeometric, {0, 1, ..., steps} for kEveryStep.
std::vector<std::size_t> time_grid_steps(std::size_t steps, TimeGridKind kind);

/// x + (dt/2) grad log p(x) + noise, with noise ~ N(0, dt I) supplied by the
/// caller so coupling stays under the caller's control.
Vector em_step(const Target& target, ConstVectorRef x, double dt, ConstVectorRef noise);

struct GrowthFactors {
  double f1 = 0.0;
  double f2 = 0.0;
};

GrowthFactors compute_growth_factors(ConstVectorRef x, ConstVectorRef x_prime, double eps, double eps_prime,
                                     double eps_dprime);
GrowthFactors compute_growth_factors(double separation, double eps, double eps_prime, double eps_dprime);

/// Base points, unit directions and step weights of the eight coupled starts
/// z + b' v' + b v, z in {x, x'}, b in {0, eps}, with b' in {0, eps'} at x
/// and b' in {0, eps''} at x'.
struct CouplingGeometry {
  Vector x;
  Vector x_prime;
  Vector v;
  Vector v_prime;
  double eps = 0.1;
  double eps_prime = 0.1;
  double eps_dprime = 0.1;

  /// Throws InputError on dimension mismatch, non-unit directions
  /// (tolerance 1e-12) or non-positive weights.
  void validate(Eigen::Index dim) const;
  double separation() const { return (x - x_prime).norm(); }
  GrowthFactors growth() const;

  /// Column index of a start: base in {x, x'}, primed bump, eps bump.
  static constexpr std::size_t start_index(bool at_x_prime, bool primed_bump, bool eps_bump) {
    return (at_x_prime ? 4u : 0u) + (primed_bump ? 2u : 0u) + (eps_bump ? 1u : 0u);
  }
  std::array<Vector, 8> starts() const;
};

/// One replica of the eight synchronously coupled diffusions, recorded on a
/// time grid. Every start consumed the same Gaussian increment stream,
/// identified by (seed, replica).
struct CoupledEnsemble {
  std::array<Vector, 8> starts;
  std::vector<std::size_t> grid_steps;
  std::vector<double> times;
  std::vector<Matrix> snapshots;  // d x 8 per grid time, column = start_index
  std::uint64_t seed = 0;
  std::size_t replica = 0;
  double dt = 0.0;
};

/// First-, second- and third-order differenced processes on the grid:
///   dz_t = Z^{x+eps v} - Z^x
///   V_t  = (Z^{x'+eps'' v'} - Z^{x'})/eps'' - (Z^{x+eps' v'} - Z^x)/eps'
///   U_t  = [Z^{x'+eps''v'+eps v} - Z^{x'+eps''v'} - (Z^{x'+eps v} - Z^{x'})]/(eps eps'')
///        - [Z^{x+eps'v'+eps v} - Z^{x+eps'v'} - (Z^{x+eps v} - Z^x)]/(eps eps')
struct DifferenceProcesses {
  std::vector<Vector> dz_series;
  std::vector<Vector> v_series;
  std::vector<Vector> u_series;
};

struct CoupledRun {
  CoupledEnsemble ensemble;
  DifferenceProcesses diffs;
};

CoupledRun run_coupled(const Target& target, const DiffusionConfig& config, const CouplingGeometry& geometry,
                       std::size_t replica = 0, TimeGridKind grid = TimeGridKind::kGeometric);

DifferenceProcesses difference_processes(const CoupledEnsemble& ensemble, const CouplingGeometry& geometry);

enum class Contract { kFirst = 1, kSecond = 2, kThird = 3 };

struct ContractPoint {
  double t = 0.0;
  double measured = 0.0;
  double envelope = 0.0;
  double ratio = 0.0;
};

/// Measurements at or below this absolute level count as zero when the
/// envelope itself is zero (rounding in differenced trajectories).
inline constexpr double kZeroEnvelopeFloor = 1e-9;

struct ContractReport {
  std::string name;
  std::vector<ContractPoint> series;
  double max_ratio = 0.0;
  double slack = 0.0;
  bool zero_envelope_violation = false;
  bool passed = false;  // max_ratio <= 1 + slack and no zero-envelope violation
};

/// Envelope at time t (before multiplying by e^{-kt/2}):
///   first:  ||dz_t|| <= eps e^{-kt/2}
///   second: ||V_t||  <= (L3/k)(||x-x'|| + (eps''+eps')/2) e^{-kt/2}
///   third:  ||U_t||  <= ((3 L3^2/k^2) f1 + (L4/(2k)) f2) e^{-kt/2}
ContractReport check_contract(Contract contract, const CoupledEnsemble& ensemble, const DifferenceProcesses& diffs,
                              const SmoothnessBudget& budget, const CouplingGeometry& geometry, double slack = 0.0);

/// Differenced-function bounds for h with known m1, m2 (order 2) or
/// m1, m2, m3 (order 3), compared in absolute value along the ensemble.
ContractReport check_function_contract(int order, const SmoothFunction& h, const CoupledEnsemble& ensemble,
                                       const SmoothnessBudget& budget, const CouplingGeometry& geometry,
                                       double slack = 0.0);

/// Slack 1 + 5 dt k applied to envelope ratios of the discretized diffusion.
double discretization_slack(double dt, double k);

struct ContractTally {
  std::string name;
  std::size_t passed = 0;
  std::size_t total = 0;
  double worst_ratio = 0.0;
  double median_ratio = 0.0;
  double pass_fraction() const { return total ? static_cast<double>(passed) / total : 0.0; }
};

struct CouplingVerification {
  std::uint64_t seed = 0;
  double dt = 0.0;
  double horizon = 0.0;
  double slack = 0.0;
  double required_fraction = 0.99;
  std::size_t replicas = 0;
  std::vector<ContractTally> contracts;
  bool passed = false;
};

/// Runs config.replicas independent replicas (stream = replica index) and
/// tallies, per check, the fraction whose worst grid ratio is <= 1 + slack.
/// Always checks the three coupling contracts; each function in
/// `order2_functions` / `order3_functions` adds a differenced-function check.
CouplingVerification verify_coupling(const Target& target, const DiffusionConfig& config,
                                     const CouplingGeometry& geometry, double slack,
                                     double required_fraction = 0.99,
                                     const std::vector<SmoothFunction>& order2_functions = {},
                                     const std::vector<SmoothFunction>& order3_functions = {});

struct SteinSolutionEstimate {
  double value = 0.0;       // estimate of u_h(x) - u_h(y)
  double std_error = 0.0;   // Monte Carlo standard error over replicas
  double truncation_bound = 0.0;  // (2/k) M1(h) ||x - y|| e^{-kT/2}
  double horizon = 0.0;
  std::size_t replicas = 0;
};

/// u_h(x) - u_h(y) = int_0^T E[h(Z^y_t) - h(Z^x_t)] dt under synchronous
/// coupling (trapezoid rule on the Euler-Maruyama grid). Throws ConfigError
/// when `tolerance` is given and the truncation bound exceeds it.
SteinSolutionEstimate estimate_u_h(const Target& target, const SmoothFunction& h, ConstVectorRef x,
                                   ConstVectorRef y, const DiffusionConfig& config,
                                   std::optional<double> tolerance = std::nullopt);

}  // namespace stein_gauge
