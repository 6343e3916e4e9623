// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any of them fails.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>

#include "brute_force.hpp"
#include "decot/oracle.hpp"
#include "decot/solver.hpp"

extern "C" void* __libc_malloc(std::size_t);
extern "C" void* __libc_calloc(std::size_t, std::size_t);
extern "C" void* __libc_realloc(void*, std::size_t);

namespace {

std::atomic<bool> g_tracking{false};
std::atomic<std::size_t> g_largest{0};

void note_allocation(std::size_t bytes) {
  if (!g_tracking.load(std::memory_order_relaxed)) return;
  std::size_t prev = g_largest.load(std::memory_order_relaxed);
  while (bytes > prev && !g_largest.compare_exchange_weak(prev, bytes)) {
  }
}

}  // namespace

// Eigen and operator new both end up here.
extern "C" void* malloc(std::size_t bytes) {
  note_allocation(bytes);
  return __libc_malloc(bytes);
}

extern "C" void* calloc(std::size_t count, std::size_t size) {
  note_allocation(count * size);
  return __libc_calloc(count, size);
}

extern "C" void* realloc(void* ptr, std::size_t bytes) {
  note_allocation(bytes);
  return __libc_realloc(ptr, bytes);
}

namespace {

using namespace decot;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

void guarded(int criterion, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(criterion, false, std::string("exception: ") + e.what());
  }
}

// Reformulated LP optimum equals the direct LP optimum.
void criterion_1() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    const int n = 3 + c % 3;
    const auto seed = static_cast<std::uint64_t>(100 + c);
    const OTInstance ot = gen_dot_instance(n, seed);
    worst = std::max(worst, std::abs(lp_solve(reformulate_dot(ot)).objective -
                                     solve_ot_lp(ot).objective));
    const int big_n = 2 + c % 2;
    const EOTInstance eot = gen_deot_instance(n, big_n, seed);
    const Graph g = c % 4 < 2 ? path_graph(big_n) : complete_graph(big_n);
    worst = std::max(worst, std::abs(lp_solve(reformulate_deot(eot, g)).objective -
                                     solve_eot_lp(eot).objective));
  }
  const double secs = seconds_since(t0);
  report(1, worst <= 1e-8 && secs < 10.0,
         fmt("40 instances, max |f_dcco - f_direct| = %.3e, %.2f s", worst, secs));
}

// Exact tau = 0 mode on a 10 x 10 transport problem: 1e-2 accuracy and an
// O(1/k) envelope.
void criterion_2() {
  const OTInstance inst = gen_dot_instance(10, 1);
  const Graph g = random_connected_graph(10, 0.3, 1);
  const DccoProblem prob = reformulate_dot(inst);
  const double f_star = lp_solve(prob).objective;
  SolverParams params;
  params.mode = SolverMode::kExactTau0;
  params.rho = 1e-4;
  params.max_iters = 20000;
  params.target_eps = 1e-2;
  RunOptions opts;
  opts.metrics = [&](std::span<const Vector> x) { return metrics_dot(x, inst, f_star); };
  const SolveResult res = run(prob, g, params, opts);
  double anchor = 0.0;
  double worst_ratio = 0.0;
  for (const IterationRecord& r : res.log) {
    const double err = r.obj_gap + r.feas_viol;
    if (r.iter == 100) anchor = 100.0 * err;
    if (r.iter >= 100 && anchor > 0.0) worst_ratio = std::max(worst_ratio, r.iter * err / anchor);
  }
  report(2, res.reached_target && anchor > 0.0 && worst_ratio <= 10.0,
         fmt("reached 1e-2 at k = %d, max k*r_k / (100*r_100) = %.3f", res.iterations,
             worst_ratio));
}

// Inexact mode: regularized objective within eta/2 + 1e-2 of the optimum.
void criterion_3() {
  const OTInstance inst = gen_dot_instance(10, 1);
  const Graph g = random_connected_graph(10, 0.3, 1);
  const DccoProblem prob = reformulate_dot(inst);
  const double f_star = lp_solve(prob).objective;
  SolverParams params;
  params.mode = SolverMode::kInexact;
  params.rho = 1e-3;
  params.eta = 1e-2;
  params.tau.assign(10, 1e-2);
  params.beta = auto_beta(prob, g, params.rho, params.tau);
  params.max_iters = 50000;
  params.log_every = 50000;
  const bool steps_ok = check_step_sizes(params, prob, g);
  RunOptions opts;
  opts.metrics = [&](std::span<const Vector> x) { return metrics_dot(x, inst, f_star); };
  const SolveResult res = run(prob, g, params, opts);
  const IterationRecord& last = res.log.back();
  const double bound = f_star + params.eta / 2 + 1e-2;
  report(3, steps_ok && last.objective <= bound && last.feas_viol + last.xy_gap <= 1e-2,
         fmt("f(xbar) = %.6f, f* = %.6f, feas + |ybar - xbar| = %.3e", last.objective, f_star,
             last.feas_viol + last.xy_gap));
}

// Equitable transport on a path of five agents.
void criterion_4() {
  const EOTInstance inst = gen_deot_instance(10, 5, 1);
  const Graph g = path_graph(5);
  const DccoProblem prob = reformulate_deot(inst, g);
  const double f_star = lp_solve(prob).objective;
  SolverParams params;
  params.mode = SolverMode::kExactTau0;
  params.rho = 1e-2;
  params.max_iters = 50000;
  params.target_eps = 5e-2;
  RunOptions opts;
  opts.metrics = [&](std::span<const Vector> x) { return metrics_deot(x, inst, f_star); };
  const SolveResult res = run(prob, g, params, opts);
  double anchor = 0.0;
  double worst_ratio = 0.0;
  for (const IterationRecord& r : res.log) {
    if (r.iter == 100) anchor = 100.0 * r.equity_viol;
    if (r.iter >= 100 && anchor > 0.0) {
      worst_ratio = std::max(worst_ratio, r.iter * r.equity_viol / anchor);
    }
  }
  const IterationRecord& last = res.log.back();
  report(4, res.reached_target && anchor > 0.0 && worst_ratio <= 10.0,
         fmt("total %.3e at k = %d, max k*eq_k / (100*eq_100) = %.3f",
             last.obj_gap + last.feas_viol + last.equity_viol, res.iterations, worst_ratio));
}

// Rounding restores the marginals and moves the plan by at most twice the
// marginal error.
void criterion_5() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst_marginal = 0.0;
  bool ok = true;
  for (int c = 0; c < 100; ++c) {
    const int n = 20;
    const OTInstance inst = gen_dot_instance(n, static_cast<std::uint64_t>(c));
    Matrix x(n, n);
    const double scale = (0.2 + 2.0 * unif(rng)) / (n * n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) x(i, j) = scale * unif(rng);
    }
    const Matrix r = round_to_feasible(x, inst.p, inst.q);
    const double marginal =
        std::max((r.rowwise().sum() - inst.p).cwiseAbs().maxCoeff(),
                 (r.colwise().sum().transpose() - inst.q).cwiseAbs().maxCoeff());
    worst_marginal = std::max(worst_marginal, marginal);
    const double bound = 2.0 * ((x.rowwise().sum() - inst.p).lpNorm<1>() +
                                (x.colwise().sum().transpose() - inst.q).lpNorm<1>());
    ok = ok && r.minCoeff() >= 0.0 && marginal <= 1e-12 && (r - x).lpNorm<1>() <= bound + 1e-12;
  }
  report(5, ok, fmt("100 cases, max marginal error %.3e", worst_marginal));
}

struct Trace {
  double gap_100 = NAN, feas_100 = NAN, gap_end = NAN, feas_end = NAN;
  bool improved() const { return gap_end < gap_100 && feas_end < feas_100; }
};

Trace trace_of(const SolveResult& res) {
  Trace t;
  for (const IterationRecord& r : res.log) {
    if (r.iter == 100) {
      t.gap_100 = r.obj_gap;
      t.feas_100 = r.feas_viol;
    }
  }
  t.gap_end = res.log.back().obj_gap;
  t.feas_end = res.log.back().feas_viol;
  return t;
}

// Full-size runs: 50 agents on 50 x 50 transport, 10 agents on 20 x 20
// equitable transport.
void criterion_6() {
  const auto t0 = Clock::now();
  SolverParams params;
  params.mode = SolverMode::kExactTau0;
  params.max_iters = 5000;
  params.log_every = 100;

  const OTInstance ot = gen_dot_instance(50, 1);
  const Graph g_dot = random_connected_graph(50, 0.1, 1);
  const DccoProblem p_dot = reformulate_dot(ot);
  const double f_dot = lp_solve(p_dot).objective;
  params.rho = 1e-4;
  RunOptions o_dot;
  o_dot.metrics = [&](std::span<const Vector> x) { return metrics_dot(x, ot, f_dot); };
  const Trace t_dot = trace_of(run(p_dot, g_dot, params, o_dot));

  const EOTInstance eot = gen_deot_instance(20, 10, 1);
  const Graph g_eot = random_connected_graph(10, 0.3, 1);
  const DccoProblem p_eot = reformulate_deot(eot, g_eot);
  const double f_eot = lp_solve(p_eot).objective;
  params.rho = 1e-2;
  RunOptions o_eot;
  o_eot.metrics = [&](std::span<const Vector> x) { return metrics_deot(x, eot, f_eot); };
  const Trace t_eot = trace_of(run(p_eot, g_eot, params, o_eot));

  const double secs = seconds_since(t0);
  report(6, t_dot.improved() && t_eot.improved() && secs < 300.0,
         fmt("D-OT gap %.3e -> %.3e, feas %.3e -> %.3e; DE-OT gap %.3e -> %.3e, "
             "feas %.3e -> %.3e; %.1f s",
             t_dot.gap_100, t_dot.gap_end, t_dot.feas_100, t_dot.feas_end, t_eot.gap_100,
             t_eot.gap_end, t_eot.feas_100, t_eot.feas_end, secs));
}

struct IterationCost {
  std::uint64_t ops = 0;
  std::size_t largest_allocation = 0;
};

// One inexact iteration of the middle agent of a path network.
IterationCost middle_agent_iteration(int n) {
  const OTInstance inst = gen_dot_instance(n, 3);
  const Graph g = path_graph(n);
  const DccoProblem prob = reformulate_dot(inst);
  SolverParams params;
  params.mode = SolverMode::kInexact;
  params.rho = 1e-2;
  params.eta = 1e-2;
  params.tau.assign(n, 1.0);
  params.beta = auto_beta(prob, g, params.rho, params.tau);
  const int agent = n / 2;
  AgentState state = initial_state(prob.local_dim, prob.num_rows);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  for (Eigen::Index k = 0; k < state.lambda.size(); ++k) state.lambda[k] = normal(rng);
  Inbox inbox;
  for (int nb : {agent - 1, agent + 1}) {
    Message m;
    m.from = nb;
    m.payload = Vector::NullaryExpr(prob.num_rows, [&] { return normal(rng); });
    inbox.push_back(std::move(m));
  }
  OpCounter ops;
  g_largest = 0;
  g_tracking = true;
  advance_tracker(state, inbox, params.rho, &ops);
  const PrimalStep step = inexact_primal_update(state, inbox, prob, agent, params, &ops);
  dual_updates(state, inbox, step, prob, agent, params, &ops);
  g_tracking = false;
  return {ops.ops, g_largest.load()};
}

// Per-agent work grows linearly in n and nothing of size (2n-1) x n is formed.
void criterion_7() {
  const IterationCost small = middle_agent_iteration(100);
  const IterationCost large = middle_agent_iteration(200);
  const double ratio = static_cast<double>(large.ops) / static_cast<double>(small.ops);
  const bool memory_ok = small.largest_allocation < std::size_t{199} * 100 * 8 &&
                         large.largest_allocation < std::size_t{399} * 200 * 8;
  report(7, ratio >= 1.8 && ratio <= 2.4 && memory_ok,
         fmt("ops %llu -> %llu (ratio %.3f), largest allocation %zu / %zu bytes",
             static_cast<unsigned long long>(small.ops),
             static_cast<unsigned long long>(large.ops), ratio, small.largest_allocation,
             large.largest_allocation));
}

// Simplex projection and LP oracle properties on random cases.
void criterion_8() {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::exponential_distribution<double> expo(1.0);
  bool proj_ok = true;
  for (int c = 0; c < 100; ++c) {
    const int n = 1 + c % 12;
    const double radius = 0.5 + (c % 3);
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    const Vector u = project_simplex(v, radius);
    // KKT: u = max(v - theta, 0) with a single theta.
    double theta = NAN;
    for (int i = 0; i < n; ++i) {
      if (u[i] > 0.0) theta = v[i] - u[i];
    }
    bool kkt = std::abs(u.sum() - radius) <= 1e-12 && u.minCoeff() >= 0.0 && !std::isnan(theta);
    for (int i = 0; i < n && kkt; ++i) {
      kkt = u[i] > 0.0 ? std::abs(v[i] - u[i] - theta) <= 1e-12 : v[i] <= theta + 1e-12;
    }
    for (int t = 0; t < 20 && kkt; ++t) {
      Vector w(n);
      for (int i = 0; i < n; ++i) w[i] = expo(rng);
      w *= radius / w.sum();
      kkt = (u - v).norm() <= (w - v).norm() + 1e-12;
    }
    proj_ok = proj_ok && kkt;
  }
  bool lp_ok = true;
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  for (int c = 0; c < 100; ++c) {
    const int n = 2 + c % 3;
    const OTInstance inst = gen_dot_instance(n, static_cast<std::uint64_t>(500 + c));
    const DccoSolution sol = lp_solve(reformulate_dot(inst));
    const Matrix plan = assemble_dot_plan(sol.x, n);
    bool ok = plan.minCoeff() >= 0.0 &&
              (plan.rowwise().sum() - inst.p).cwiseAbs().maxCoeff() <= 1e-9 &&
              (plan.colwise().sum().transpose() - inst.q).cwiseAbs().maxCoeff() <= 1e-9;
    ok = ok && std::abs(sol.objective -
                        decot::testing::transport_min_by_vertices(inst.cost, inst.p, inst.q)) <=
                   1e-9;
    for (int t = 0; t < 20 && ok; ++t) {
      Matrix x = inst.p * inst.q.transpose();
      x = x.unaryExpr([&](double e) { return e * unif(rng); });
      ok = inst.cost.cwiseProduct(round_to_feasible(x, inst.p, inst.q)).sum() >=
           sol.objective - 1e-9;
    }
    lp_ok = lp_ok && ok;
  }
  report(8, proj_ok && lp_ok,
         fmt("projection %s, LP optimality %s", proj_ok ? "ok" : "violated",
             lp_ok ? "ok" : "violated"));
}

}  // namespace

int main() {
  guarded(1, criterion_1);
  guarded(2, criterion_2);
  guarded(3, criterion_3);
  guarded(4, criterion_4);
  guarded(5, criterion_5);
  guarded(6, criterion_6);
  guarded(7, criterion_7);
  guarded(8, criterion_8);
  return g_failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
