#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>

#include "cli.hpp"
#include "cli_internal.hpp"
#include "stein_gauge/csv.hpp"
#include "stein_gauge/discrepancy.hpp"
#include "stein_gauge/errors.hpp"
#include "stein_gauge/factors.hpp"
#include "stein_gauge/langevin.hpp"
#include "stein_gauge/metrics.hpp"
#include "stein_gauge/oracles.hpp"
#include "stein_gauge/random.hpp"

namespace stein_gauge::cli {
namespace {

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const SteinFactors& f) { return Json{{"c1", f.c1}, {"c2", f.c2}, {"c3", f.c3}}; }

Json to_json(const SmoothnessBudget& b) { return Json{{"k", b.k}, {"l3", b.l3}, {"l4", b.l4}}; }

struct TargetBundle {
  std::unique_ptr<Target> target;
  Json description;
};

TargetBundle make_target(const RunConfig& cfg, Eigen::Index dim_hint) {
  TargetBundle b;
  if (cfg.dim < 0) throw InputError("--dim must be positive");
  if (cfg.target == "gaussian") {
    Vector mean;
    if (!cfg.mean.empty()) mean = parse_vector(cfg.mean, "--mean");
    Eigen::Index d = cfg.dim > 0 ? cfg.dim : (mean.size() > 0 ? mean.size() : (dim_hint > 0 ? dim_hint : 1));
    if (mean.size() == 0) mean = Vector::Zero(d);
    if (mean.size() != d) throw InputError("--mean has " + std::to_string(mean.size()) + " entries, dimension is " +
                                           std::to_string(d));
    if (!(cfg.precision > 0.0) || !std::isfinite(cfg.precision)) throw InputError("--precision must be positive");
    b.target = std::make_unique<GaussianTarget>(mean, cfg.precision * Matrix::Identity(d, d));
    b.description = Json{{"kind", "gaussian"}, {"dim", d}, {"mean", to_json(mean)}, {"precision", cfg.precision}};
  } else if (cfg.target == "logistic") {
    if (!cfg.data.empty()) {
      const auto data = read_logistic_csv(cfg.data, cfg.data_header);
      if (cfg.dim > 0 && cfg.dim != data.covariates.cols())
        throw InputError("--dim does not match the covariate columns of " + cfg.data);
      b.target = std::make_unique<LogisticTarget>(cfg.sigma2, data.covariates, data.labels);
    } else {
      const Eigen::Index d = cfg.dim > 0 ? cfg.dim : (dim_hint > 0 ? dim_hint : 1);
      b.target = std::make_unique<LogisticTarget>(LogisticTarget::prior_only(d, cfg.sigma2));
    }
    const auto& t = static_cast<const LogisticTarget&>(*b.target);
    b.description = Json{{"kind", "logistic"}, {"dim", t.dim()},         {"sigma2", cfg.sigma2},
                         {"data", cfg.data},   {"datapoints", t.num_datapoints()}};
  } else {
    throw InputError("--target must be gaussian or logistic, got '" + cfg.target + "'");
  }
  if (dim_hint > 0 && b.target->dim() != dim_hint)
    throw InputError("target dimension " + std::to_string(b.target->dim()) + " does not match input dimension " +
                     std::to_string(dim_hint));
  return b;
}

int exit_for(LpStatus status) { return status == LpStatus::kOptimal ? kSuccess : kNumericFailure; }

struct DiscrepancyOutcome {
  Json json;
  double value = 0.0;
  Eigen::Index dim = 0;
  LpStatus status = LpStatus::kNumericFailure;
};

DiscrepancyOutcome run_discrepancy(const RunConfig& cfg, Json& inputs) {
  if (cfg.samples.empty()) throw InputError("--samples is required");
  SampleCsvOptions csv;
  csv.header = cfg.samples_header;
  if (cfg.weights_column >= 0) csv.weights_column = static_cast<std::size_t>(cfg.weights_column);
  const auto q = read_samples_csv(cfg.samples, csv);
  const auto bundle = make_target(cfg, q.dim());

  ProgramOptions options;
  if (cfg.relaxation == "none") {
    options.relaxation = NormRelaxation::kNone;
  } else if (cfg.relaxation != "sqrt-dim") {
    throw InputError("--relaxation must be sqrt-dim or none");
  }
  const auto graph = GraphSpec::parse(cfg.graph);

  inputs["target"] = bundle.description;
  inputs["samples"] = cfg.samples;
  inputs["samples_header"] = cfg.samples_header;
  inputs["weights_column"] = cfg.weights_column >= 0 ? Json(cfg.weights_column) : Json();
  inputs["graph"] = graph.to_string();
  inputs["relaxation"] = cfg.relaxation;

  const auto budget = bundle.target->smoothness();
  const auto program = build_program(*bundle.target, q, classical_factors(budget), graph, options);
  const auto sol = solve_program(program);

  DiscrepancyOutcome out;
  out.value = sol.value;
  out.dim = q.dim();
  out.status = sol.status;
  out.json = Json{{"value", sol.value},
                  {"n", program.n},
                  {"d", program.d},
                  {"budget", to_json(budget)},
                  {"factors", to_json(program.factors)},
                  {"scaled_factors", to_json(program.scaled)},
                  {"inflation", program.inflation},
                  {"graph", program.graph.to_string()},
                  {"edges", program.edges.size()},
                  {"status", to_string(sol.status)},
                  {"iterations", sol.plus.iterations + sol.minus.iterations},
                  {"active_rows", std::max(sol.plus.active_rows, sol.minus.active_rows)}};
  if (sol.status != LpStatus::kOptimal) {
    out.json["message"] = sol.plus.status != LpStatus::kOptimal ? sol.plus.message : sol.minus.message;
  }
  return out;
}

Json to_json(const MetricReport& m) {
  return Json{{"d_smooth_upper", m.d_smooth_upper},
              {"w1_upper", m.w1_upper},
              {"bl_upper", m.bl_upper},
              {"dim", m.dim},
              {"e_norm_g", m.e_norm_g}};
}

CouplingGeometry make_geometry(const RunConfig& cfg, Eigen::Index d) {
  CouplingGeometry g;
  g.x = cfg.x.empty() ? Vector::Zero(d) : parse_vector(cfg.x, "--x");
  if (cfg.x_prime.empty()) {
    g.x_prime = g.x;
    g.x_prime(0) += 0.5;
  } else {
    g.x_prime = parse_vector(cfg.x_prime, "--x-prime");
  }
  g.v = cfg.v.empty() ? Vector::Unit(d, 0) : parse_vector(cfg.v, "--v");
  g.v_prime = cfg.v_prime.empty() ? Vector::Ones(d) : parse_vector(cfg.v_prime, "--v-prime");
  for (Vector* dir : {&g.v, &g.v_prime}) {
    const double n = dir->norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw InputError("coupling directions must be nonzero");
    *dir /= n;
  }
  g.eps = cfg.eps;
  g.eps_prime = cfg.eps_prime;
  g.eps_dprime = cfg.eps_dprime;
  g.validate(d);
  return g;
}

Json to_json(const CouplingGeometry& g) {
  return Json{{"x", to_json(g.x)},         {"x_prime", to_json(g.x_prime)}, {"v", to_json(g.v)},
              {"v_prime", to_json(g.v_prime)}, {"eps", g.eps},             {"eps_prime", g.eps_prime},
              {"eps_dprime", g.eps_dprime}};
}

DiffusionConfig make_diffusion(const RunConfig& cfg, const SmoothnessBudget& budget) {
  auto c = DiffusionConfig::defaults_for(budget);
  if (cfg.dt < 0.0 || cfg.horizon < 0.0) throw InputError("--dt and --horizon must be positive");
  if (cfg.dt > 0.0) c.dt = cfg.dt;
  if (cfg.horizon > 0.0) c.horizon = cfg.horizon;
  c.seed = cfg.seed;
  c.replicas = cfg.replicas;
  c.validate(budget);
  return c;
}

Json to_json(const ContractReport& r) {
  return Json{{"name", r.name},
              {"max_ratio", r.max_ratio},
              {"slack", r.slack},
              {"zero_envelope_violation", r.zero_envelope_violation},
              {"grid_points", r.series.size()},
              {"passed", r.passed}};
}

std::string file_name(std::string name) {
  for (char& c : name)
    if (c == ':' || c == '/' || c == '(' || c == ')' || c == '[' || c == ']') c = '_';
  return name + ".csv";
}

void write_series(const std::string& dir, const ContractReport& r, Json& files) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / file_name(r.name);
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << std::setprecision(17) << "t,measured,envelope,ratio\n";
  for (const auto& p : r.series) out << p.t << ',' << p.measured << ',' << p.envelope << ',' << p.ratio << '\n';
  files.push_back(path.filename().string());
}

std::vector<ContractReport> replica_reports(const Target& target, const DiffusionConfig& dc,
                                            const CouplingGeometry& g, std::size_t replica, TimeGridKind grid,
                                            double slack, bool with_functions) {
  const auto run = run_coupled(target, dc, g, replica, grid);
  const auto budget = target.smoothness();
  std::vector<ContractReport> reports;
  for (auto c : {Contract::kFirst, Contract::kSecond, Contract::kThird})
    reports.push_back(check_contract(c, run.ensemble, run.diffs, budget, g, slack));
  if (with_functions) {
    const auto h = functions::sin_coordinate(0);
    reports.push_back(check_function_contract(2, h, run.ensemble, budget, g, slack));
    reports.push_back(check_function_contract(3, h, run.ensemble, budget, g, slack));
  }
  return reports;
}

void diffusion_inputs(Json& inputs, const DiffusionConfig& dc, const CouplingGeometry& g, double slack) {
  inputs["dt"] = dc.dt;
  inputs["horizon"] = dc.horizon;
  inputs["seed"] = dc.seed;
  inputs["geometry"] = to_json(g);
  inputs["slack"] = slack;
}

SmoothFunction smoothing_function(const std::string& name) {
  if (name == "abs") return functions::abs_coordinate(0);
  if (name == "norm") return functions::euclidean_norm();
  if (name == "sin") return functions::sin_coordinate(0);
  throw InputError("--function must be abs, norm or sin, got '" + name + "'");
}

Json to_json(const SmoothingOrderCheck& c) {
  return Json{{"estimate", c.estimate}, {"bound", c.bound}, {"tolerance", c.tolerance}, {"passed", c.passed}};
}

}  // namespace

int cmd_factors(const RunConfig& cfg, Json& inputs, Json& results) {
  const auto bundle = make_target(cfg, 0);
  const TestFunctionBudget h{cfg.m1, cfg.m2, cfg.m3};
  if (!(h.m1 >= 0.0 && h.m2 >= 0.0 && h.m3 >= 0.0)) throw InputError("--m1/--m2/--m3 must be nonnegative");
  inputs["target"] = bundle.description;
  inputs["test_function"] = Json{{"m1", h.m1}, {"m2", h.m2}, {"m3", h.m3}};

  const auto budget = smoothness_constants(*bundle.target);
  const auto b = solution_factor_bounds(budget, h);
  results["budget"] = to_json(budget);
  results["factors"] = to_json(classical_factors(budget));
  results["solution_bounds"] = Json{{"b1", b.b1}, {"b2", b.b2}, {"b3", b.b3}};
  if (const auto* lt = dynamic_cast<const LogisticTarget*>(bundle.target.get())) {
    results["logistic_closed_form"] = to_json(logistic_factors(*lt));
  }
  return kSuccess;
}

int cmd_discrepancy(const RunConfig& cfg, Json& inputs, Json& results) {
  auto d = run_discrepancy(cfg, inputs);
  results = std::move(d.json);
  return exit_for(d.status);
}

int cmd_certify(const RunConfig& cfg, Json& inputs, Json& results) {
  auto d = run_discrepancy(cfg, inputs);
  results["discrepancy"] = std::move(d.json);
  if (d.status != LpStatus::kOptimal) return kNumericFailure;
  results["metrics"] = to_json(metric_report(d.value, d.dim));
  return kSuccess;
}

int cmd_simulate(const RunConfig& cfg, Json& inputs, Json& results) {
  const Eigen::Index hint = cfg.x.empty() ? 0 : parse_vector(cfg.x, "--x").size();
  const auto bundle = make_target(cfg, hint);
  const auto budget = bundle.target->smoothness();
  auto dc = make_diffusion(cfg, budget);
  const auto g = make_geometry(cfg, bundle.target->dim());
  TimeGridKind grid;
  if (cfg.grid == "geometric") {
    grid = TimeGridKind::kGeometric;
  } else if (cfg.grid == "every-step") {
    grid = TimeGridKind::kEveryStep;
  } else {
    throw InputError("--grid must be geometric or every-step");
  }
  const double slack = cfg.slack >= 0.0 ? cfg.slack : discretization_slack(dc.dt, budget.k);
  inputs["target"] = bundle.description;
  diffusion_inputs(inputs, dc, g, slack);
  inputs["replica"] = cfg.replica;
  inputs["grid"] = cfg.grid;

  const auto reports = replica_reports(*bundle.target, dc, g, cfg.replica, grid, slack, !cfg.no_function_checks);
  const auto growth = g.growth();
  results["steps"] = dc.steps();
  results["growth"] = Json{{"f1", growth.f1}, {"f2", growth.f2}};
  results["contracts"] = Json::array();
  for (const auto& r : reports) results["contracts"].push_back(to_json(r));
  if (!cfg.plot_dir.empty()) {
    Json files = Json::array();
    for (const auto& r : reports) write_series(cfg.plot_dir, r, files);
    results["plot_files"] = files;
  }
  return kSuccess;
}

int cmd_verify_coupling(const RunConfig& cfg, Json& inputs, Json& results) {
  const Eigen::Index hint = cfg.x.empty() ? 0 : parse_vector(cfg.x, "--x").size();
  const auto bundle = make_target(cfg, hint);
  const auto budget = bundle.target->smoothness();
  const auto dc = make_diffusion(cfg, budget);
  const auto g = make_geometry(cfg, bundle.target->dim());
  const double slack = cfg.slack >= 0.0 ? cfg.slack : discretization_slack(dc.dt, budget.k);
  if (!(cfg.required_fraction > 0.0 && cfg.required_fraction <= 1.0))
    throw InputError("--required-fraction must be in (0, 1]");
  inputs["target"] = bundle.description;
  diffusion_inputs(inputs, dc, g, slack);
  inputs["replicas"] = dc.replicas;
  inputs["required_fraction"] = cfg.required_fraction;

  std::vector<SmoothFunction> hs;
  if (!cfg.no_function_checks) hs.push_back(functions::sin_coordinate(0));
  const auto rep = verify_coupling(*bundle.target, dc, g, slack, cfg.required_fraction, hs, hs);
  results["passed"] = rep.passed;
  results["contracts"] = Json::array();
  for (const auto& t : rep.contracts) {
    results["contracts"].push_back(Json{{"name", t.name},
                                        {"passed", t.passed},
                                        {"total", t.total},
                                        {"pass_fraction", t.pass_fraction()},
                                        {"worst_ratio", t.worst_ratio},
                                        {"median_ratio", t.median_ratio}});
  }
  if (!cfg.plot_dir.empty()) {
    Json files = Json::array();
    for (const auto& r :
         replica_reports(*bundle.target, dc, g, 0, TimeGridKind::kGeometric, slack, !cfg.no_function_checks))
      write_series(cfg.plot_dir, r, files);
    results["plot_files"] = files;
  }
  return rep.passed ? kSuccess : kVerificationFailure;
}

int cmd_verify_lemma2(const RunConfig& cfg, Json& inputs, Json& results) {
  Lemma2SuiteConfig c;
  c.instances = cfg.instances;
  c.seed = cfg.seed;
  c.equality_instances = cfg.equality_instances;
  c.dims.clear();
  for (double d : parse_doubles(cfg.dims, "--dims")) {
    if (!(d >= 1.0) || d != std::floor(d)) throw InputError("--dims must list positive integers");
    c.dims.push_back(static_cast<Eigen::Index>(d));
  }
  inputs["instances"] = c.instances;
  inputs["seed"] = c.seed;
  inputs["dims"] = c.dims;
  inputs["equality_instances"] = c.equality_instances;

  const auto r = run_lemma2_suite(c);
  results = Json{{"instances", r.instances},
                 {"second_order_violations", r.second_violations},
                 {"third_order_violations", r.third_violations},
                 {"worst_second_order_ratio", r.worst_second_ratio},
                 {"worst_third_order_ratio", r.worst_third_ratio},
                 {"equality_instances", r.equality_instances},
                 {"equality_worst_rel_gap", r.equality_worst_rel_gap},
                 {"passed", r.passed}};
  return r.passed ? kSuccess : kVerificationFailure;
}

int cmd_verify_smoothing(const RunConfig& cfg, Json& inputs, Json& results) {
  if (cfg.dim < 0) throw InputError("--dim must be positive");
  const Eigen::Index d = cfg.dim > 0 ? cfg.dim : 1;
  const auto h = smoothing_function(cfg.function);
  const auto scales = parse_doubles(cfg.scales, "--scales");
  if (cfg.probes == 0) throw InputError("--probes must be positive");
  inputs["function"] = cfg.function;
  inputs["dim"] = d;
  inputs["scales"] = scales;
  inputs["probes"] = cfg.probes;
  inputs["seed"] = cfg.seed;
  if (d > 2) inputs["mc_draws"] = cfg.mc_draws;

  const auto rule = default_smoothing_rule(d, cfg.mc_draws, cfg.seed);
  bool passed = true;
  results["checks"] = Json::array();
  std::ofstream plot;
  if (!cfg.plot_dir.empty()) {
    std::filesystem::create_directories(cfg.plot_dir);
    plot.open(std::filesystem::path(cfg.plot_dir) / "smoothing.csv");
    if (!plot) throw InputError("cannot write smoothing.csv in " + cfg.plot_dir);
    plot << std::setprecision(17) << "t,order,estimate,bound,tolerance\n";
  }
  for (std::size_t s = 0; s < scales.size(); ++s) {
    const double t = scales[s];
    // Probes spread over a few smoothing widths around the kink at 0.
    GaussianStream gs(cfg.seed, s + 1);
    std::vector<Vector> probes{Vector::Zero(d)};
    for (std::size_t i = 1; i < cfg.probes; ++i) {
      Vector p(d);
      gs.fill(p, 2.0 * t);
      probes.push_back(p);
    }
    const auto r = verify_smoothing_derivative_bounds(h, t, probes, rule);
    passed = passed && r.passed;
    results["checks"].push_back(Json{{"t", t},
                                     {"step", r.step},
                                     {"probes", r.probes},
                                     {"m1", to_json(r.m1)},
                                     {"m2", to_json(r.m2)},
                                     {"m3", to_json(r.m3)},
                                     {"passed", r.passed}});
    if (plot.is_open()) {
      int order = 1;
      for (const auto* c : {&r.m1, &r.m2, &r.m3})
        plot << t << ',' << order++ << ',' << c->estimate << ',' << c->bound << ',' << c->tolerance << '\n';
    }
  }
  if (plot.is_open()) results["plot_files"] = Json::array({"smoothing.csv"});
  results["passed"] = passed;
  return passed ? kSuccess : kVerificationFailure;
}

int cmd_wasserstein_bound(const RunConfig& cfg, Json& inputs, Json& results) {
  if (cfg.dim < 0) throw InputError("--dim must be positive");
  const Eigen::Index d = cfg.dim > 0 ? cfg.dim : 1;
  inputs["smooth"] = cfg.smooth;
  inputs["dim"] = d;
  results = to_json(metric_report(cfg.smooth, d));
  return kSuccess;
}

}  // namespace stein_gauge::cli
