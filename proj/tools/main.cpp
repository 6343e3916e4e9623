#include <cstring>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "decot/errors.hpp"
#include "run_config.hpp"

namespace {

using decot::cli::RunConfig;

// The file is applied before flag parsing so that flags overwrite it.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return argv[i + 1];
    if (std::strncmp(argv[i], "--config=", 9) == 0) return argv[i] + 9;
  }
  return "";
}

void add_instance_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--n", cfg.n, "Number of support points");
  cmd->add_option("-N,--num-agents", cfg.num_agents, "Agents for deot (dot uses N = n)");
  cmd->add_option("--instance-seed", cfg.instance_seed, "Instance generator seed");
  cmd->add_option("--noise-var", cfg.noise_var, "Variance of the per-agent cost noise (deot)");
}

void add_run_options(CLI::App* cmd, RunConfig& cfg) {
  add_instance_options(cmd, cfg);
  cmd->add_option("--instance", cfg.instance_file, "Load the instance from a file instead");
  cmd->add_option("--graph", cfg.graph, "random | path | complete | star");
  cmd->add_option("--edge-prob", cfg.edge_prob, "Extra-edge probability of the random graph");
  cmd->add_option("--graph-seed", cfg.graph_seed, "Random graph seed");
  cmd->add_option("--mode", cfg.mode, "dc | exact | inexact");
  cmd->add_option("--rho", cfg.rho, "Consensus penalty");
  cmd->add_option("--tau", cfg.tau, "Proximal weight of the y = x split (exact, inexact)");
  cmd->add_option("--beta", cfg.beta, "Inexact step parameter; <= 0 picks it automatically");
  cmd->add_option("--beta-factor", cfg.beta_factor, "Safety factor on the automatic beta");
  cmd->add_option("--eta", cfg.eta, "Weight of the (eta/2)|x|^2 regularizer");
  cmd->add_option("--max-iters", cfg.max_iters, "Iteration cap");
  cmd->add_option("--eps", cfg.eps, "Target for gap + violations");
  cmd->add_option("--log-every", cfg.log_every, "Metrics and CSV row interval");
  cmd->add_option("--threads", cfg.threads, "Worker threads for the agent updates");
  cmd->add_option("--inner-max-iters", cfg.inner_max_iters, "Inner solver iteration cap");
  cmd->add_option("--inner-tol", cfg.inner_tol, "Inner solver tolerance");
  cmd->add_flag("--no-oracle", cfg.no_oracle, "Skip the LP reference solve");
  cmd->add_option("-o,--output", cfg.output, "CSV path (stdout when omitted)");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  try {
    const std::string config_path = find_config_path(argc, argv);
    if (!config_path.empty()) decot::cli::load_config_file(cfg, config_path);
  } catch (const decot::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return decot::cli::kExitError;
  }

  CLI::App app{"Decentralized optimal transport experiments"};
  app.require_subcommand(1);
  std::string config_path;

  auto* run_dot = app.add_subcommand("run-dot", "Solve a decentralized transport instance");
  add_run_options(run_dot, cfg);
  auto* run_deot = app.add_subcommand("run-deot", "Solve a decentralized equitable transport instance");
  add_run_options(run_deot, cfg);
  auto* verify = app.add_subcommand("verify", "Run the reformulation and oracle property checks");
  verify->add_option("--cases", cfg.verify_cases, "Seeded cases per property");
  verify->add_option("--seed", cfg.instance_seed, "First seed");
  verify->add_flag("--inject-fault", cfg.inject_fault, "Corrupt one marginal block");
  auto* gen = app.add_subcommand("gen", "Write a generated instance file");
  gen->add_option("--problem", cfg.problem, "dot | deot");
  add_instance_options(gen, cfg);
  gen->add_option("-o,--output", cfg.output, "Instance path (required)");
  for (CLI::App* cmd : {run_dot, run_deot, verify, gen}) {
    cmd->add_option("--config", config_path, "key=value file; flags take precedence");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return decot::cli::kExitError;
  }

  try {
    if (run_dot->parsed() || run_deot->parsed()) {
      cfg.problem = run_dot->parsed() ? "dot" : "deot";
      return decot::cli::run_solve(cfg, std::cout, std::cerr);
    }
    if (verify->parsed()) return decot::cli::run_verify(cfg, std::cout);
    return decot::cli::run_gen(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return decot::cli::kExitError;
  }
}
