#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "cli_internal.hpp"
#include "stein_gauge/errors.hpp"

namespace stein_gauge::cli {
namespace {

using Command = std::function<int(const RunConfig&, Json&, Json&)>;

void add_output_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--output,-o", cfg.output, "Write the JSON report here instead of stdout");
  sub->add_flag("--no-timestamp", cfg.no_timestamp, "Omit the timestamp so identical runs give identical reports");
}

void add_target_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--target", cfg.target, "gaussian or logistic")->capture_default_str();
  sub->add_option("--dim", cfg.dim, "Dimension (inferred from inputs when omitted)");
  sub->add_option("--mean", cfg.mean, "Gaussian mean, comma separated");
  sub->add_option("--precision", cfg.precision, "Gaussian isotropic precision k")->capture_default_str();
  sub->add_option("--sigma2", cfg.sigma2, "Logistic prior variance")->capture_default_str();
  sub->add_option("--data", cfg.data, "Logistic data CSV: covariates then a 0/1 label");
  sub->add_flag("--data-header", cfg.data_header, "Data CSV has a header row");
}

void add_sample_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--samples", cfg.samples, "Sample CSV, one point per row");
  sub->add_flag("--samples-header", cfg.samples_header, "Sample CSV has a header row");
  sub->add_option("--weights-column", cfg.weights_column, "0-based column holding point weights");
  sub->add_option("--graph", cfg.graph, "auto, complete or knn:<m>")->capture_default_str();
  sub->add_option("--relaxation", cfg.relaxation, "sqrt-dim or none")->capture_default_str();
}

void add_diffusion_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  sub->add_option("--dt", cfg.dt, "Euler-Maruyama step (default 1e-3/k)");
  sub->add_option("--horizon", cfg.horizon, "Simulated time (default 20/k)");
  sub->add_option("--x", cfg.x, "Base point x, comma separated (default 0)");
  sub->add_option("--x-prime", cfg.x_prime, "Base point x' (default x + 0.5 e1)");
  sub->add_option("--v", cfg.v, "Direction v, normalized (default e1)");
  sub->add_option("--v-prime", cfg.v_prime, "Direction v', normalized (default (1,...,1)/sqrt(d))");
  sub->add_option("--eps", cfg.eps, "Step along v")->capture_default_str();
  sub->add_option("--eps-prime", cfg.eps_prime, "Step along v' at x")->capture_default_str();
  sub->add_option("--eps-dprime", cfg.eps_dprime, "Step along v' at x'")->capture_default_str();
  sub->add_option("--slack", cfg.slack, "Allowed envelope excess (default 5 dt k)");
  sub->add_flag("--no-function-checks", cfg.no_function_checks, "Skip the differenced sin(x_0) checks");
  sub->add_option("--emit-plot-data", cfg.plot_dir, "Directory for CSV time series");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Stein factors, graph Stein discrepancies and Wasserstein bounds", "stein-gauge"};
  app.set_version_flag("--version", std::string(STEIN_GAUGE_VERSION));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--config", "JSON file of option values; flags override it");

  std::map<CLI::App*, std::pair<std::string, Command>> commands;
  auto add = [&](const std::string& name, const std::string& help, Command fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    add_output_options(sub, cfg);
    commands[sub] = {name, std::move(fn)};
    return sub;
  };

  auto* factors = add("factors", "Smoothness constants and Stein factors of a target", cmd_factors);
  add_target_options(factors, cfg);
  factors->add_option("--m1", cfg.m1, "Test-function bound on M1(h)")->capture_default_str();
  factors->add_option("--m2", cfg.m2, "Test-function bound on M2(h)")->capture_default_str();
  factors->add_option("--m3", cfg.m3, "Test-function bound on M3(h)")->capture_default_str();

  auto* disc = add("discrepancy", "Graph Stein discrepancy of a sample", cmd_discrepancy);
  add_target_options(disc, cfg);
  add_sample_options(disc, cfg);

  auto* cert = add("certify", "Discrepancy plus the implied Wasserstein bound", cmd_certify);
  add_target_options(cert, cfg);
  add_sample_options(cert, cfg);

  auto* sim = add("simulate", "One replica of the coupled diffusions with contract ratios", cmd_simulate);
  add_target_options(sim, cfg);
  add_diffusion_options(sim, cfg);
  sim->add_option("--replica", cfg.replica, "Replica index (noise stream)")->capture_default_str();
  sim->add_option("--grid", cfg.grid, "geometric or every-step")->capture_default_str();

  auto* vc = add("verify-coupling", "Contract checks over many coupled replicas", cmd_verify_coupling);
  add_target_options(vc, cfg);
  add_diffusion_options(vc, cfg);
  vc->add_option("--replicas", cfg.replicas, "Number of replicas")->capture_default_str();
  vc->add_option("--required-fraction", cfg.required_fraction, "Pass fraction required per check")
      ->capture_default_str();

  auto* l2 = add("verify-lemma2", "Random-instance suite for the weighted difference bounds", cmd_verify_lemma2);
  l2->add_option("--instances", cfg.instances, "Random instances")->capture_default_str();
  l2->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  l2->add_option("--dims", cfg.dims, "Dimensions to cycle through")->capture_default_str();
  l2->add_option("--equality-instances", cfg.equality_instances, "Quadratic equality cases")->capture_default_str();

  auto* vs = add("verify-smoothing", "Derivative bounds of Gaussian-smoothed test functions", cmd_verify_smoothing);
  vs->add_option("--function", cfg.function, "abs, norm or sin")->capture_default_str();
  vs->add_option("--dim", cfg.dim, "Dimension (default 1)");
  vs->add_option("--scales", cfg.scales, "Smoothing scales t")->capture_default_str();
  vs->add_option("--probes", cfg.probes, "Probe points per scale")->capture_default_str();
  vs->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  vs->add_option("--mc-draws", cfg.mc_draws, "Monte Carlo draws for d > 2")->capture_default_str();
  vs->add_option("--emit-plot-data", cfg.plot_dir, "Directory for CSV output");

  auto* wb = add("wasserstein-bound", "Wasserstein bound implied by a smooth-function distance", cmd_wasserstein_bound);
  wb->add_option("--smooth", cfg.smooth, "Bound S on the smooth-function distance")->required();
  wb->add_option("--dim", cfg.dim, "Dimension (default 1)");

  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidationError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const auto& [name, fn] = commands.at(chosen);
  cfg.command = name;

  Json report;
  report["tool"] = "stein-gauge";
  report["version"] = STEIN_GAUGE_VERSION;
  report["command"] = name;
  Json inputs = Json::object();
  Json results = Json::object();
  int code = kSuccess;
  try {
    code = fn(cfg, inputs, results);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  }
  report["inputs"] = std::move(inputs);
  report["results"] = std::move(results);
  report["exit_code"] = code;
  if (!cfg.no_timestamp) report["timestamp"] = utc_timestamp();

  const std::string text = report.dump(2) + "\n";
  if (cfg.output.empty()) {
    out << text;
  } else {
    std::ofstream file(cfg.output);
    if (!file || !(file << text)) {
      err << "error: cannot write " << cfg.output << '\n';
      return kValidationError;
    }
  }
  if (code == kVerificationFailure) err << name << ": verification failed\n";
  if (code == kNumericFailure) err << name << ": solver did not reach an optimal solution\n";
  return code;
}

}  // namespace stein_gauge::cli
