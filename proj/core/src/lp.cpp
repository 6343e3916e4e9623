#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "decot/errors.hpp"
#include "decot/oracle.hpp"

namespace decot {

namespace {

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kPivotTol = 1e-9;

// Tableau layout: rows 0..m-1 are constraints, row m holds the reduced costs;
// the last column is the right-hand side (and -z in the cost row).
struct Simplex {
  Tableau t;
  std::vector<int> basis;
  int pivots = 0;

  int rows() const { return static_cast<int>(t.rows()) - 1; }
  int rhs_col() const { return static_cast<int>(t.cols()) - 1; }

  void pivot(int r, int e) {
    const double piv = t(r, e);
    t.row(r) /= piv;
    const Eigen::RowVectorXd prow = t.row(r);
    const Vector pcol = t.col(e);
    for (int i = 0; i < t.rows(); ++i) {
      if (i == r || pcol[i] == 0.0) continue;
      t.row(i) -= pcol[i] * prow;
    }
    t.col(e).setZero();
    t(r, e) = 1.0;
    basis[static_cast<std::size_t>(r)] = e;
    ++pivots;
  }

  // Bland: lowest eligible entering index, ties in the ratio test go to the
  // lowest basic index. Returns false at optimality; throws Unbounded.
  bool step(int eligible_cols) {
    const int m = rows();
    const int rc = rhs_col();
    int enter = -1;
    for (int j = 0; j < eligible_cols; ++j) {
      if (t(m, j) < -kPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return false;
    int leave = -1;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = t(i, enter);
      if (a <= kPivotTol) continue;
      const double ratio = t(i, rc) / a;
      if (leave < 0 || ratio < best - 1e-12) {
        leave = i;
        best = ratio;
      } else if (ratio <= best + 1e-12 && basis[static_cast<std::size_t>(i)] <
                                              basis[static_cast<std::size_t>(leave)]) {
        leave = i;
        best = std::min(best, ratio);
      }
    }
    if (leave < 0) throw Unbounded("linear program is unbounded");
    pivot(leave, enter);
    return true;
  }
};

}  // namespace

LpResult solve_standard_lp(const Matrix& a, const Vector& b, const Vector& c) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (b.size() != m || c.size() != n) {
    throw DimensionMismatch("solve_standard_lp: inconsistent dimensions");
  }
  if (n > kMaxLpColumns) {
    throw TooLarge("LP with " + std::to_string(n) + " columns exceeds the oracle cap of " +
                   std::to_string(kMaxLpColumns));
  }
  if (!a.allFinite() || !b.allFinite() || !c.allFinite()) {
    throw DimensionMismatch("solve_standard_lp: non-finite data");
  }

  // Phase one: x plus one artificial per row, rows flipped so that b >= 0.
  Simplex sx;
  sx.t.setZero(m + 1, n + m + 1);
  sx.basis.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    sx.t.row(i).head(n) = sign * a.row(i);
    sx.t(i, n + i) = 1.0;
    sx.t(i, n + m) = sign * b[i];
    sx.basis[static_cast<std::size_t>(i)] = n + i;
    sx.t.row(m).head(n) -= sx.t.row(i).head(n);
    sx.t(m, n + m) -= sx.t(i, n + m);
  }
  while (sx.step(n + m)) {
  }
  const double infeas = -sx.t(m, n + m);
  const double b_scale = std::max(1.0, b.cwiseAbs().sum());
  if (infeas > 1e-8 * b_scale) {
    throw Infeasible("linear program is infeasible (phase-one residual " +
                     std::to_string(infeas) + ")");
  }

  // Drive artificials out of the basis; rows where that is impossible are
  // linear combinations of the others.
  std::vector<int> keep;
  for (int i = 0; i < m; ++i) {
    if (sx.basis[static_cast<std::size_t>(i)] >= n) {
      int col = -1;
      double best = kPivotTol;
      for (int j = 0; j < n; ++j) {
        if (std::abs(sx.t(i, j)) > best) {
          best = std::abs(sx.t(i, j));
          col = j;
        }
      }
      if (col < 0) continue;
      sx.pivot(i, col);
    }
    keep.push_back(i);
  }

  // Phase two on the kept rows, artificial columns dropped.
  const int mk = static_cast<int>(keep.size());
  Simplex p2;
  p2.pivots = sx.pivots;
  p2.t.setZero(mk + 1, n + 1);
  for (int r = 0; r < mk; ++r) {
    const int i = keep[static_cast<std::size_t>(r)];
    p2.t.row(r).head(n) = sx.t.row(i).head(n);
    p2.t(r, n) = sx.t(i, n + m);
    p2.basis.push_back(sx.basis[static_cast<std::size_t>(i)]);
  }
  p2.t.row(mk).head(n) = c.transpose();
  for (int r = 0; r < mk; ++r) {
    const double cb = c[p2.basis[static_cast<std::size_t>(r)]];
    if (cb != 0.0) p2.t.row(mk) -= cb * p2.t.row(r);
  }
  while (p2.step(n)) {
  }

  // Re-solve the final basis from the original rows.
  Matrix basis_mat(mk, mk);
  Vector rhs(mk);
  for (int r = 0; r < mk; ++r) {
    const int i = keep[static_cast<std::size_t>(r)];
    rhs[r] = b[i];
    for (int k = 0; k < mk; ++k) basis_mat(r, k) = a(i, p2.basis[static_cast<std::size_t>(k)]);
  }
  LpResult res;
  res.x = Vector::Zero(n);
  const Eigen::FullPivLU<Matrix> lu(basis_mat);
  if (mk > 0 && lu.isInvertible()) {
    const Vector xb = lu.solve(rhs);
    for (int k = 0; k < mk; ++k) {
      res.x[p2.basis[static_cast<std::size_t>(k)]] = std::max(0.0, xb[k]);
    }
  } else {
    for (int r = 0; r < mk; ++r) {
      res.x[p2.basis[static_cast<std::size_t>(r)]] = std::max(0.0, p2.t(r, n));
    }
  }
  res.objective = c.dot(res.x);
  res.pivots = p2.pivots;
  return res;
}

DccoSolution lp_solve(const DccoProblem& problem) {
  const int big_n = problem.num_agents;
  const int d = problem.local_dim;
  const long total = static_cast<long>(big_n) * d;
  if (total > kMaxLpColumns) {
    throw TooLarge("lp_solve: N * d = " + std::to_string(total) + " exceeds " +
                   std::to_string(kMaxLpColumns));
  }
  const int m = problem.num_rows;
  Matrix a(m, total);
  Vector c(total);
  Vector col;
  for (int i = 0; i < big_n; ++i) {
    const BlockOperator& op = problem.operators[static_cast<std::size_t>(i)];
    for (int j = 0; j < d; ++j) {
      op.column(j, col);
      a.col(static_cast<Eigen::Index>(i) * d + j) = col;
    }
    c.segment(static_cast<Eigen::Index>(i) * d, d) = problem.costs[static_cast<std::size_t>(i)];
  }
  const LpResult lp = solve_standard_lp(a, problem.rhs, c);
  DccoSolution sol;
  for (int i = 0; i < big_n; ++i) {
    sol.x.push_back(lp.x.segment(static_cast<Eigen::Index>(i) * d, d));
  }
  sol.objective = lp.objective;
  return sol;
}

OtSolution solve_ot_lp(const OTInstance& inst) {
  inst.validate();
  const int n = inst.n;
  const int nn = n * n;
  Matrix a = Matrix::Zero(2 * n, nn);
  Vector b(2 * n);
  b << inst.p, inst.q;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      a(i, j * n + i) = 1.0;
      a(n + j, j * n + i) = 1.0;
    }
  }
  const LpResult lp = solve_standard_lp(a, b, vectorize(inst.cost));
  return {unvectorize(lp.x, n), lp.objective};
}

EotSolution solve_eot_lp(const EOTInstance& inst) {
  inst.validate();
  const int n = inst.n;
  const int big_n = inst.num_agents;
  const int nn = n * n;
  const int rows = 2 * n + big_n - 1;
  Matrix a = Matrix::Zero(rows, static_cast<Eigen::Index>(big_n) * nn);
  Vector b = Vector::Zero(rows);
  b.head(n) = inst.p;
  b.segment(n, n) = inst.q;
  Vector c(static_cast<Eigen::Index>(big_n) * nn);
  for (int k = 0; k < big_n; ++k) {
    const Vector ck = vectorize(inst.costs[static_cast<std::size_t>(k)]);
    const Eigen::Index off = static_cast<Eigen::Index>(k) * nn;
    c.segment(off, nn) = ck;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        a(i, off + j * n + i) = 1.0;
        a(n + j, off + j * n + i) = 1.0;
      }
    }
    if (k + 1 < big_n) a.row(2 * n + k).segment(off, nn) = ck.transpose();
    if (k > 0) a.row(2 * n + k - 1).segment(off, nn) = -ck.transpose();
  }
  const LpResult lp = solve_standard_lp(a, b, c);
  EotSolution sol;
  for (int k = 0; k < big_n; ++k) {
    sol.plans.push_back(unvectorize(lp.x.segment(static_cast<Eigen::Index>(k) * nn, nn), n));
  }
  sol.objective = lp.objective;
  return sol;
}

}  // namespace decot
