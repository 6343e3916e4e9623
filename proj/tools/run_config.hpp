#ifndef DECOT_TOOLS_RUN_CONFIG_HPP_
#define DECOT_TOOLS_RUN_CONFIG_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace decot::cli {

struct RunConfig {
  std::string problem = "dot";  // dot | deot
  int n = 10;
  int num_agents = 5;  // DE-OT only; D-OT always uses N = n
  std::string graph = "random";  // random | path | complete | star
  double edge_prob = 0.3;
  std::uint64_t graph_seed = 1;
  std::uint64_t instance_seed = 1;
  double noise_var = 10.0;
  std::string mode = "inexact";  // dc | exact | inexact
  double rho = 1.0;
  double tau = 1.0;
  double beta = 0.0;  // <= 0 selects beta automatically
  double beta_factor = 1.1;
  double eta = 1e-2;
  int max_iters = 10000;
  double eps = 1e-2;
  int log_every = 1;
  int threads = 1;
  int inner_max_iters = 10000;
  double inner_tol = 1e-10;
  bool no_oracle = false;
  std::string instance_file;
  std::string output;  // empty writes the CSV to stdout
  // verify
  int verify_cases = 20;
  bool inject_fault = false;
};

// Sets one field from its textual value. Keys use underscores; dashes are
// accepted too. Throws decot::ParseError on an unknown key or a bad value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

// key=value lines; blank lines and lines starting with '#' are skipped.
void load_config(RunConfig& cfg, std::istream& in);
void load_config_file(RunConfig& cfg, const std::string& path);

// Every field as (key, value), in declaration order.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg);

}  // namespace decot::cli

#endif  // DECOT_TOOLS_RUN_CONFIG_HPP_
