#include "decot/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "decot/errors.hpp"

namespace decot {

namespace {

constexpr double kStepMargin = 1e-12;

struct NeighborTerms {
  Vector sum;  // sum_j (lambda_i + lambda_j)
  int degree = 1;
};

NeighborTerms neighbor_terms(const AgentState& state, const Inbox& inbox,
                             OpCounter* ops) {
  NeighborTerms t;
  if (inbox.empty()) {
    t.sum = 2.0 * state.lambda;
    t.degree = 1;
    count_ops(ops, static_cast<std::uint64_t>(state.lambda.size()));
    return t;
  }
  t.degree = static_cast<int>(inbox.size());
  t.sum = static_cast<double>(t.degree) * state.lambda;
  for (const Message& msg : inbox) {
    if (msg.payload.size() != state.lambda.size()) {
      throw DimensionMismatch("neighbor multiplier has the wrong length");
    }
    t.sum += msg.payload;
  }
  count_ops(ops, static_cast<std::uint64_t>(state.lambda.size()) * (inbox.size() + 1));
  return t;
}

// b/N + t_i - rho * sum_j (lambda_i + lambda_j): the point the local coupling
// term A_i x_i is pulled toward.
Vector local_target(const AgentState& state, const Vector& nsum,
                    const DccoProblem& problem, double rho, OpCounter* ops) {
  count_ops(ops, 3 * static_cast<std::uint64_t>(problem.num_rows));
  return problem.rhs / static_cast<double>(problem.num_agents) + state.tracker -
         rho * nsum;
}

void check_agent(const DccoProblem& problem, int agent, const AgentState& state) {
  if (agent < 0 || agent >= problem.num_agents) {
    throw DimensionMismatch("agent index out of range");
  }
  if (state.x.size() != problem.local_dim || state.lambda.size() != problem.num_rows) {
    throw DimensionMismatch("agent state does not match the problem dimensions");
  }
}

double tau_of(const SolverParams& params, int agent) {
  if (params.mode == SolverMode::kExactTau0) return 0.0;
  return params.tau[static_cast<std::size_t>(agent)];
}

void validate_params(const SolverParams& params, const DccoProblem& problem,
                     const Graph& g) {
  const auto n = static_cast<std::size_t>(problem.num_agents);
  if (g.num_agents() != problem.num_agents) {
    throw DimensionMismatch("graph and problem disagree on the number of agents");
  }
  if (!(params.rho > 0.0)) throw StepSizeViolation("rho must be positive");
  if (params.eta < 0.0) throw StepSizeViolation("eta must be nonnegative");
  if (params.max_iters < 0) throw StepSizeViolation("max_iters must be nonnegative");
  if (params.log_every < 1) throw StepSizeViolation("log_every must be positive");
  if (params.mode == SolverMode::kExactTau0) {
    for (double t : params.tau) {
      if (t != 0.0) throw StepSizeViolation("tau must be zero in the tau = 0 mode");
    }
    return;
  }
  if (params.tau.size() != n) {
    throw StepSizeViolation("expected one tau per agent");
  }
  for (double t : params.tau) {
    if (!(t > 0.0)) throw StepSizeViolation("tau must be positive in this mode");
  }
  if (params.mode == SolverMode::kInexact) {
    if (!(params.eta > 0.0)) throw StepSizeViolation("the inexact mode needs eta > 0");
    if (params.beta.size() != n) throw StepSizeViolation("expected one beta per agent");
  }
  if (!check_step_sizes(params, problem, g)) {
    throw StepSizeViolation("beta, tau and rho violate the inexact step-size condition");
  }
}

}  // namespace

AgentState initial_state(int local_dim, int num_rows) {
  AgentState s;
  s.x = Vector::Zero(local_dim);
  s.y = Vector::Zero(local_dim);
  s.z = Vector::Zero(local_dim);
  s.lambda = Vector::Zero(num_rows);
  s.tracker = Vector::Zero(num_rows);
  s.x_sum = Vector::Zero(local_dim);
  s.y_sum = Vector::Zero(local_dim);
  return s;
}

double min_inexact_beta(double tau, double rho, int degree, double gram_bound) {
  // beta - beta/(beta tau - 1) - 1 = L  <=>  tau b^2 - (2 + tau (1 + L)) b + (1 + L) = 0;
  // the larger root is the one with beta * tau > 1.
  const double l = gram_bound / (2.0 * rho * std::max(degree, 1));
  const double k = 1.0 + l;
  const double lin = 2.0 + tau * k;
  return (lin + std::sqrt(lin * lin - 4.0 * tau * k)) / (2.0 * tau);
}

std::vector<double> auto_beta(const DccoProblem& problem, const Graph& g, double rho,
                              std::span<const double> tau, double factor) {
  if (static_cast<int>(tau.size()) != problem.num_agents) {
    throw DimensionMismatch("auto_beta: expected one tau per agent");
  }
  std::vector<double> beta;
  for (int i = 0; i < problem.num_agents; ++i) {
    const double bound = problem.operators[static_cast<std::size_t>(i)].gram_spectral_bound();
    beta.push_back(factor * min_inexact_beta(tau[static_cast<std::size_t>(i)], rho,
                                             g.degree(i), bound));
  }
  return beta;
}

bool check_step_sizes(const SolverParams& params, const DccoProblem& problem,
                      const Graph& g) {
  if (!(params.rho > 0.0)) return false;
  if (params.mode != SolverMode::kInexact) return true;
  if (params.tau.size() != static_cast<std::size_t>(problem.num_agents) ||
      params.beta.size() != static_cast<std::size_t>(problem.num_agents)) {
    return false;
  }
  for (int i = 0; i < problem.num_agents; ++i) {
    const double beta = params.beta[static_cast<std::size_t>(i)];
    const double tau = params.tau[static_cast<std::size_t>(i)];
    if (!(beta > 0.0 && tau > 0.0) || !(beta * tau > 1.0)) return false;
    const double lhs = beta - beta / (beta * tau - 1.0) - 1.0;
    const double degree = std::max(g.degree(i), 1);
    const double rhs = problem.operators[static_cast<std::size_t>(i)].gram_spectral_bound() /
                       (2.0 * params.rho * degree);
    if (!(lhs - rhs > kStepMargin)) return false;
  }
  return true;
}

void advance_tracker(AgentState& state, const Inbox& inbox, double rho, OpCounter* ops) {
  for (const Message& msg : inbox) {
    if (msg.payload.size() != state.lambda.size()) {
      throw DimensionMismatch("neighbor multiplier has the wrong length");
    }
    state.tracker += rho * (state.lambda - msg.payload);
  }
  count_ops(ops, 3 * static_cast<std::uint64_t>(state.lambda.size()) * inbox.size());
}

PrimalStep exact_primal_update(const AgentState& state, const Inbox& inbox,
                               const DccoProblem& problem, int agent,
                               const SolverParams& params) {
  check_agent(problem, agent, state);
  const auto ua = static_cast<std::size_t>(agent);
  const NeighborTerms nb = neighbor_terms(state, inbox, nullptr);
  LocalQp qp;
  qp.op = &problem.operators[ua];
  qp.cost = &problem.costs[ua];
  qp.eta = params.eta;
  qp.penalty = 1.0 / (4.0 * params.rho * nb.degree);
  qp.target = local_target(state, nb.sum, problem, params.rho, nullptr);
  qp.tau = tau_of(params, agent);
  qp.z = &state.z;
  InnerResult res = solve_local_qp(qp, state.x, state.y, params.inner);
  return {std::move(res.x), std::move(res.y)};
}

PrimalStep inexact_primal_update(const AgentState& state, const Inbox& inbox,
                                 const DccoProblem& problem, int agent,
                                 const SolverParams& params, OpCounter* ops) {
  check_agent(problem, agent, state);
  const auto ua = static_cast<std::size_t>(agent);
  const double tau = params.tau[ua];
  const double beta = params.beta[ua];
  const auto d = static_cast<std::uint64_t>(problem.local_dim);
  const BlockOperator& op = problem.operators[ua];

  const NeighborTerms nb = neighbor_terms(state, inbox, ops);
  const Vector target = local_target(state, nb.sum, problem, params.rho, ops);

  const double bt = beta * tau;
  PrimalStep step;
  step.y = ((1.0 - 1.0 / bt) * state.y + (state.x - tau * state.z) / bt).cwiseMax(0.0);
  count_ops(ops, 6 * d);

  Vector ax;
  op.apply(state.x, ax, ops);
  ax -= target;
  count_ops(ops, static_cast<std::uint64_t>(problem.num_rows));
  Vector grad;
  op.apply_transpose(ax, grad, ops);
  grad /= 2.0 * params.rho * nb.degree;
  grad += problem.costs[ua] + params.eta * state.x +
          (state.x - step.y - tau * state.z) / tau;
  count_ops(ops, 9 * d);
  step.x = state.x - grad / beta;
  count_ops(ops, 2 * d);
  return step;
}

void dual_updates(AgentState& state, const Inbox& inbox, const PrimalStep& step,
                  const DccoProblem& problem, int agent, const SolverParams& params,
                  OpCounter* ops) {
  check_agent(problem, agent, state);
  const auto ua = static_cast<std::size_t>(agent);
  const NeighborTerms nb = neighbor_terms(state, inbox, ops);
  Vector ax;
  problem.operators[ua].apply(step.x, ax, ops);
  const double inv_rho = 1.0 / params.rho;
  state.lambda = (nb.sum - inv_rho * state.tracker +
                  inv_rho * (ax - problem.rhs / static_cast<double>(problem.num_agents))) /
                 (2.0 * nb.degree);
  count_ops(ops, 7 * static_cast<std::uint64_t>(problem.num_rows));

  const double tau = tau_of(params, agent);
  const auto d = static_cast<std::uint64_t>(problem.local_dim);
  if (tau > 0.0) {
    state.z += (step.y - step.x) / tau;
    count_ops(ops, 3 * d);
  }
  state.x = step.x;
  state.y = params.mode == SolverMode::kExactTau0 ? step.x : step.y;
  state.x_sum += state.x;
  state.y_sum += state.y;
  count_ops(ops, 2 * d);
}

SolveResult run(const DccoProblem& problem, const Graph& g, const SolverParams& params,
                const RunOptions& options) {
  validate_params(params, problem, g);
  const int num_agents = problem.num_agents;
  const auto un = static_cast<std::size_t>(num_agents);

  Network net(g, params.num_threads);
  std::vector<AgentState> states(un, initial_state(problem.local_dim, problem.num_rows));
  std::vector<PrimalStep> steps(un);
  SolveResult result;
  const auto start = std::chrono::steady_clock::now();

  std::vector<Vector> xbar(un);
  std::vector<Vector> ybar(un);

  auto record_round = [&](const RoundReport& report) {
    const int k = report.round;
    result.iterations = k;
    const bool last = k == params.max_iters;
    if (k % params.log_every != 0 && !last) return true;

    const double inv_k = 1.0 / static_cast<double>(k);
    double xy2 = 0.0;
    for (std::size_t i = 0; i < un; ++i) {
      xbar[i] = states[i].x_sum * inv_k;
      ybar[i] = states[i].y_sum * inv_k;
      xy2 += (ybar[i] - xbar[i]).squaredNorm();
    }
    IterationRecord rec;
    rec.iter = k;
    rec.objective = problem.objective(xbar);
    rec.residual = problem.residual(xbar).norm();
    rec.xy_gap = std::sqrt(xy2);
    Vector mean = Vector::Zero(problem.num_rows);
    for (const AgentState& s : states) mean += s.lambda;
    mean /= static_cast<double>(num_agents);
    for (const AgentState& s : states) {
      rec.lambda_disagreement = std::max(rec.lambda_disagreement, (s.lambda - mean).norm());
    }
    double stop_metric = 0.0;
    if (options.metrics) {
      const Metrics m = options.metrics(xbar);
      rec.obj_gap = m.obj_gap;
      rec.feas_viol = m.feas_viol;
      rec.equity_viol = m.equity_viol;
      // Without a known optimum the gap is NaN and drops out of the test.
      const double gap = std::isnan(m.obj_gap) ? 0.0 : m.obj_gap;
      stop_metric = gap + m.feas_viol + m.equity_viol + rec.xy_gap;
    } else {
      rec.obj_gap = std::numeric_limits<double>::quiet_NaN();
      rec.feas_viol = rec.residual;
      stop_metric = rec.residual + rec.xy_gap;
    }
    rec.messages_sent = net.total_messages();
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    if (options.on_record) options.on_record(rec);
    if (options.keep_log) result.log.push_back(rec);
    if (params.target_eps > 0.0 && std::isfinite(stop_metric) &&
        stop_metric <= params.target_eps) {
      result.reached_target = true;
      return false;
    }
    return true;
  };

  RoundCallbacks callbacks;
  callbacks.publish = [&](int a) { return states[static_cast<std::size_t>(a)].lambda; };
  callbacks.primal = [&](int a, const Inbox& inbox) {
    AgentState& s = states[static_cast<std::size_t>(a)];
    advance_tracker(s, inbox, params.rho);
    steps[static_cast<std::size_t>(a)] =
        params.mode == SolverMode::kInexact
            ? inexact_primal_update(s, inbox, problem, a, params)
            : exact_primal_update(s, inbox, problem, a, params);
  };
  callbacks.dual = [&](int a, const Inbox& inbox) {
    dual_updates(states[static_cast<std::size_t>(a)], inbox,
                 steps[static_cast<std::size_t>(a)], problem, a, params);
  };
  callbacks.end_of_round = record_round;

  result.rounds = run_rounds(net, callbacks, params.max_iters);

  const int k = std::max(result.iterations, 1);
  for (std::size_t i = 0; i < un; ++i) {
    result.ergodic_x.push_back(states[i].x_sum / static_cast<double>(k));
    result.ergodic_y.push_back(states[i].y_sum / static_cast<double>(k));
    result.last_x.push_back(states[i].x);
  }
  return result;
}

}  // namespace decot
