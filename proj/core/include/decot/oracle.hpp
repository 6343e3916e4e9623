#ifndef DECOT_ORACLE_HPP_
#define DECOT_ORACLE_HPP_

#include <span>
#include <vector>

#include "decot/metrics.hpp"
#include "decot/problems.hpp"
#include "decot/types.hpp"

namespace decot {

struct LpResult {
  Vector x;
  double objective = 0.0;
  int pivots = 0;
};

// min c^T x  s.t.  A x = b,  x >= 0.
//
// Dense two-phase tableau simplex with Bland's rule. Redundant equality rows
// are detected after phase one and dropped. The final basis is re-solved from
// the original data with an LU factorization, so the returned point does not
// carry the accumulated tableau round-off.
//
// Throws Infeasible, Unbounded, or TooLarge when A has more than
// kMaxLpColumns columns.
LpResult solve_standard_lp(const Matrix& a, const Vector& b, const Vector& c);

inline constexpr int kMaxLpColumns = 10000;

struct DccoSolution {
  std::vector<Vector> x;  // per agent
  double objective = 0.0;
};

// Centralized LP on the coupled form. Throws TooLarge when N * d > 10000.
DccoSolution lp_solve(const DccoProblem& problem);

struct OtSolution {
  Matrix plan;
  double objective = 0.0;
};

// The transport LP written directly over the n x n plan, both marginal
// blocks kept in full.
OtSolution solve_ot_lp(const OTInstance& inst);

struct EotSolution {
  std::vector<Matrix> plans;
  double objective = 0.0;
};

// Equitable transport written directly: sum_k X^k has marginals p and q and
// <C^k, X^k> = <C^{k+1}, X^{k+1}> for consecutive agents.
EotSolution solve_eot_lp(const EOTInstance& inst);

// Euclidean projection onto {u >= 0 : sum u = radius}. Throws
// DegenerateInput when radius <= 0.
Vector project_simplex(const Vector& v, double radius = 1.0);

// Rounds a nonnegative n x m matrix onto the transport polytope U(p, q):
// rows are scaled down to at most p, columns to at most q, and the remaining
// mass is added as the rank-one matrix err_r err_c^T / |err_r|_1.
// Throws DegenerateInput when p or q sums to zero, when their sums differ or
// when X has a negative entry.
Matrix round_to_feasible(const Matrix& x, const Vector& p, const Vector& q);

// Plan whose column i is agent i's block.
Matrix assemble_dot_plan(std::span<const Vector> x, int n);
// sum_k X^k over the per-agent vectorized plans.
Matrix sum_deot_plans(std::span<const Vector> x, int n);

// |<C, X> - f*| and |X 1 - p|_2 + |X^T 1 - q|_2.
Metrics metrics_dot(std::span<const Vector> x, const OTInstance& inst, double f_star);
// Same on sum_k X^k, plus (1/N) sum_k |<C^k, X^k> - mean_j <C^j, X^j>|.
Metrics metrics_deot(std::span<const Vector> x, const EOTInstance& inst, double f_star);

}  // namespace decot

#endif  // DECOT_ORACLE_HPP_
