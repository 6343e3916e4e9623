#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>

#include "decot/errors.hpp"
#include "decot/instance_io.hpp"
#include "decot/oracle.hpp"
#include "decot/problems.hpp"
#include "decot/solver.hpp"
#include "decot/topology.hpp"

namespace decot::cli {

namespace {

Graph make_graph(const RunConfig& cfg, int agents) {
  if (agents == 1) return build_graph(1, {});
  if (cfg.graph == "random") return random_connected_graph(agents, cfg.edge_prob, cfg.graph_seed);
  if (cfg.graph == "path") return path_graph(agents);
  if (cfg.graph == "complete") return complete_graph(agents);
  if (cfg.graph == "star") return star_graph(agents);
  throw ParseError("unknown graph kind '" + cfg.graph + "'");
}

SolverMode parse_mode(const std::string& s) {
  if (s == "dc") return SolverMode::kExactTau0;
  if (s == "exact") return SolverMode::kExact;
  if (s == "inexact") return SolverMode::kInexact;
  throw ParseError("unknown solver mode '" + s + "' (expected dc, exact or inexact)");
}

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

struct Loaded {
  OTInstance dot;
  EOTInstance deot;
};

Loaded load_or_generate(const RunConfig& cfg) {
  Loaded l;
  const bool is_dot = cfg.problem == "dot";
  if (!is_dot && cfg.problem != "deot") {
    throw ParseError("unknown problem '" + cfg.problem + "' (expected dot or deot)");
  }
  if (!cfg.instance_file.empty()) {
    Instance inst = load_instance(cfg.instance_file);
    if (is_dot) {
      if (!std::holds_alternative<OTInstance>(inst)) {
        throw InvalidInstance(cfg.instance_file + " does not hold a dot instance");
      }
      l.dot = std::get<OTInstance>(std::move(inst));
    } else {
      if (!std::holds_alternative<EOTInstance>(inst)) {
        throw InvalidInstance(cfg.instance_file + " does not hold a deot instance");
      }
      l.deot = std::get<EOTInstance>(std::move(inst));
    }
    return l;
  }
  if (is_dot) {
    l.dot = gen_dot_instance(cfg.n, cfg.instance_seed);
  } else {
    l.deot = gen_deot_instance(cfg.n, cfg.num_agents, cfg.instance_seed, cfg.noise_var);
  }
  return l;
}

}  // namespace

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const bool is_dot = cfg.problem == "dot";
  const Loaded inst = load_or_generate(cfg);
  const int agents = is_dot ? inst.dot.n : inst.deot.num_agents;
  const Graph g = make_graph(cfg, agents);
  const DccoProblem problem = is_dot ? reformulate_dot(inst.dot) : reformulate_deot(inst.deot, g);

  double f_star = std::numeric_limits<double>::quiet_NaN();
  if (!cfg.no_oracle) {
    try {
      f_star = lp_solve(problem).objective;
    } catch (const TooLarge& e) {
      err << "warning: " << e.what() << "; obj_gap left empty\n";
    }
  }

  SolverParams params;
  params.mode = parse_mode(cfg.mode);
  params.rho = cfg.rho;
  params.eta = cfg.eta;
  params.max_iters = cfg.max_iters;
  params.target_eps = cfg.eps;
  params.log_every = cfg.log_every;
  params.num_threads = cfg.threads;
  params.inner.max_iters = cfg.inner_max_iters;
  params.inner.tol = cfg.inner_tol;
  if (params.mode != SolverMode::kExactTau0) {
    params.tau.assign(static_cast<std::size_t>(agents), cfg.tau);
  }
  if (params.mode == SolverMode::kInexact) {
    params.beta = cfg.beta > 0.0
                      ? std::vector<double>(static_cast<std::size_t>(agents), cfg.beta)
                      : auto_beta(problem, g, cfg.rho, params.tau, cfg.beta_factor);
  }

  std::ofstream file;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) throw ParseError("cannot write " + cfg.output);
  }
  std::ostream& csv = cfg.output.empty() ? out : file;
  for (const auto& [key, value] : config_entries(cfg)) csv << "# " << key << '=' << value << '\n';
  csv << "# f_star=" << num(f_star) << '\n';
  csv << kCsvHeader << '\n';

  IterationRecord last;
  RunOptions opts;
  opts.keep_log = false;
  opts.metrics = [&](std::span<const Vector> x) {
    Metrics m = is_dot ? metrics_dot(x, inst.dot, f_star) : metrics_deot(x, inst.deot, f_star);
    return m;
  };
  opts.on_record = [&](const IterationRecord& r) {
    last = r;
    csv << r.iter << ',' << num(r.objective) << ',' << num(r.obj_gap) << ','
        << num(r.feas_viol) << ',' << num(r.equity_viol) << ',' << num(r.xy_gap) << ','
        << r.messages_sent << ',' << num(r.wall_ms) << '\n';
  };
  const SolveResult res = run(problem, g, params, opts);
  csv.flush();

  out << "# summary problem=" << cfg.problem << " mode=" << cfg.mode
      << " iterations=" << res.iterations
      << " reached_eps=" << (res.reached_target ? "yes" : "no")
      << " iterations_to_eps=" << (res.reached_target ? std::to_string(res.iterations) : "-")
      << " wall_ms=" << num(last.wall_ms) << " messages=" << last.messages_sent
      << " objective=" << num(last.objective) << " obj_gap=" << num(last.obj_gap)
      << " feas_viol=" << num(last.feas_viol) << " equity_viol=" << num(last.equity_viol)
      << " xy_gap=" << num(last.xy_gap) << '\n';
  return res.reached_target ? kExitReached : kExitMaxIters;
}

int run_gen(const RunConfig& cfg, std::ostream& out) {
  if (cfg.output.empty()) throw ParseError("gen needs --output");
  if (cfg.problem == "dot") {
    save_instance(cfg.output, gen_dot_instance(cfg.n, cfg.instance_seed));
  } else if (cfg.problem == "deot") {
    save_instance(cfg.output,
                  gen_deot_instance(cfg.n, cfg.num_agents, cfg.instance_seed, cfg.noise_var));
  } else {
    throw ParseError("unknown problem '" + cfg.problem + "' (expected dot or deot)");
  }
  out << "wrote " << cfg.problem << " instance to " << cfg.output << '\n';
  return 0;
}

}  // namespace decot::cli
