#ifndef DECOT_SOLVER_HPP_
#define DECOT_SOLVER_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "decot/inner_qp.hpp"
#include "decot/metrics.hpp"
#include "decot/problems.hpp"
#include "decot/simnet.hpp"
#include "decot/topology.hpp"
#include "decot/types.hpp"

namespace decot {

// Proximal dual-consensus ADMM over a DccoProblem.
//
// Every agent i keeps a local copy lambda_i of the multiplier of the coupling
// constraint sum_i A_i x_i = b. One round is:
//
//   1. exchange lambda_i with the neighbors;
//   2. fold the neighbor disagreement into the tracker,
//        t_i += rho * sum_j (lambda_i - lambda_j);
//   3. primal step on (x_i, y_i), either the exact local QP or the
//      linearized closed form;
//   4. lambda_i = (1/2|N_i|) (sum_j (lambda_i + lambda_j) - t_i/rho
//                             + (A_i x_i - b/N)/rho),
//      z_i += (y_i - x_i)/tau_i.
//
// Ergodic averages of x and y are accumulated for the O(1/k) guarantee.
enum class SolverMode {
  kExactTau0,  // tau_i = 0: y and z are dropped, nonnegativity is put on x
  kExact,      // exact local QP with the proximal y/z splitting
  kInexact,    // single-loop closed-form updates; needs eta > 0
};

struct SolverParams {
  double rho = 1.0;
  std::vector<double> tau;   // per agent, >= 0
  std::vector<double> beta;  // per agent, used by kInexact
  double eta = 0.0;          // weight of (eta/2)|x|^2
  SolverMode mode = SolverMode::kExactTau0;
  int max_iters = 1000;
  InnerOptions inner;
  // Stop once the stopping metric (metrics total plus |ybar - xbar|, or the
  // coupling residual when no metrics callback is given) reaches this value.
  // A NaN obj_gap is left out of the sum. Zero disables early stopping.
  double target_eps = 0.0;
  int num_threads = 1;
  int log_every = 1;
};

struct AgentState {
  Vector x;
  Vector y;
  Vector z;
  Vector lambda;
  Vector tracker;
  Vector x_sum;
  Vector y_sum;
};

AgentState initial_state(int local_dim, int num_rows);

struct PrimalStep {
  Vector x;
  Vector y;
};

// Smallest beta with beta*tau > 1 and
//   beta - beta/(beta*tau - 1) - 1 = gram_bound / (2 rho degree),
// i.e. the boundary of the inexact step-size condition.
double min_inexact_beta(double tau, double rho, int degree, double gram_bound);

// Per-agent beta = factor * min_inexact_beta(...).
std::vector<double> auto_beta(const DccoProblem& problem, const Graph& g, double rho,
                              std::span<const double> tau, double factor = 1.1);

// Exact modes need rho > 0 only. kInexact additionally needs, per agent,
// beta*tau > 1 and beta - beta/(beta*tau - 1) - 1 > bound/(2 rho |N_i|) by a
// margin of 1e-12.
bool check_step_sizes(const SolverParams& params, const DccoProblem& problem,
                      const Graph& g);

// Both primal updates take the lambda^k values just received from the
// neighbors. An agent without neighbors (a one-agent network) acts as its own
// single neighbor.
void advance_tracker(AgentState& state, const Inbox& inbox, double rho,
                     OpCounter* ops = nullptr);

PrimalStep exact_primal_update(const AgentState& state, const Inbox& inbox,
                               const DccoProblem& problem, int agent,
                               const SolverParams& params);

PrimalStep inexact_primal_update(const AgentState& state, const Inbox& inbox,
                                 const DccoProblem& problem, int agent,
                                 const SolverParams& params, OpCounter* ops = nullptr);

// lambda and z updates. Stores step.x / step.y into the state and adds them to
// the ergodic sums.
void dual_updates(AgentState& state, const Inbox& inbox, const PrimalStep& step,
                  const DccoProblem& problem, int agent, const SolverParams& params,
                  OpCounter* ops = nullptr);

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;  // sum_i c_i^T xbar_i
  double obj_gap = 0.0;    // NaN when no optimum is known
  double feas_viol = 0.0;
  double equity_viol = 0.0;
  double xy_gap = 0.0;               // |ybar - xbar|
  double residual = 0.0;             // |sum_i A_i xbar_i - b|
  double lambda_disagreement = 0.0;  // max_i |lambda_i - mean lambda|
  std::int64_t messages_sent = 0;    // cumulative
  double wall_ms = 0.0;
};

struct RunOptions {
  // Evaluates the approximation metrics of the ergodic iterate.
  std::function<Metrics(std::span<const Vector> xbar)> metrics;
  std::function<void(const IterationRecord&)> on_record;
  bool keep_log = true;
};

struct SolveResult {
  std::vector<Vector> ergodic_x;
  std::vector<Vector> ergodic_y;
  std::vector<Vector> last_x;
  std::vector<IterationRecord> log;
  std::vector<RoundReport> rounds;
  int iterations = 0;
  bool reached_target = false;
};

// Throws StepSizeViolation on invalid parameters and propagates
// InnerNoConverge from the exact local solves.
SolveResult run(const DccoProblem& problem, const Graph& g, const SolverParams& params,
                const RunOptions& options = {});

}  // namespace decot

#endif  // DECOT_SOLVER_HPP_
