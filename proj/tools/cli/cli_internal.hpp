#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "stein_gauge/types.hpp"

namespace stein_gauge::cli {

using Json = nlohmann::ordered_json;

/// Every knob of every subcommand; each subcommand reads its own subset.
struct RunConfig {
  std::string command;
  std::string output;
  std::string plot_dir;
  bool no_timestamp = false;

  std::string target = "gaussian";
  long dim = 0;  // 0: infer from samples or geometry
  std::string mean;
  double precision = 1.0;
  double sigma2 = 1.0;
  std::string data;
  bool data_header = false;

  std::string samples;
  bool samples_header = false;
  long weights_column = -1;
  std::string graph = "auto";
  std::string relaxation = "sqrt-dim";

  double m1 = 1.0, m2 = 1.0, m3 = 1.0;

  std::uint64_t seed = 0;
  double dt = 0.0;       // 0: 1e-3 / k
  double horizon = 0.0;  // 0: 20 / k
  std::size_t replicas = 1000;
  std::size_t replica = 0;
  std::string grid = "geometric";
  std::string x, x_prime, v, v_prime;
  double eps = 0.1, eps_prime = 0.1, eps_dprime = 0.1;
  double slack = -1.0;  // negative: 5 dt k
  double required_fraction = 0.99;
  bool no_function_checks = false;

  std::size_t instances = 1000;
  std::string dims = "1,2,3";
  std::size_t equality_instances = 100;

  std::string function = "abs";
  std::string scales = "0.1,1,10";
  std::size_t probes = 100;
  std::size_t mc_draws = 20000;

  double smooth = 0.0;
};

/// Pulls `--config FILE` out of `args` and splices the file's keys in as
/// `--key=value` right after the subcommand, so explicit flags (parsed
/// later, last one wins) override the file. A "command" key supplies the
/// subcommand when none is given on the command line.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

std::vector<double> parse_doubles(const std::string& text, const char* what);
Vector parse_vector(const std::string& text, const char* what);

/// Each returns an exit code and fills `results`.
int cmd_factors(const RunConfig& cfg, Json& inputs, Json& results);
int cmd_discrepancy(const RunConfig& cfg, Json& inputs, Json& results);
int cmd_certify(const RunConfig& cfg, Json& inputs, Json& results);
int cmd_simulate(const RunConfig& cfg, Json& inputs, Json& results);
int cmd_verify_coupling(const RunConfig& cfg, Json& inputs, Json& results);
int cmd_verify_lemma2(const RunConfig& cfg, Json& inputs, Json& results);
int cmd_verify_smoothing(const RunConfig& cfg, Json& inputs, Json& results);
int cmd_wasserstein_bound(const RunConfig& cfg, Json& inputs, Json& results);

}  // namespace stein_gauge::cli
