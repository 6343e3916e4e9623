#include "decot/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "decot/errors.hpp"

namespace decot {

Vector project_simplex(const Vector& v, double radius) {
  if (!(radius > 0.0)) throw DegenerateInput("project_simplex: radius must be positive");
  const Eigen::Index n = v.size();
  if (n == 0) throw DegenerateInput("project_simplex: empty vector");
  Vector u = v;
  std::sort(u.data(), u.data() + n, std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cum += u[k];
    const double t = (cum - radius) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

Matrix round_to_feasible(const Matrix& x, const Vector& p, const Vector& q) {
  if (x.rows() != p.size() || x.cols() != q.size()) {
    throw DimensionMismatch("round_to_feasible: plan and marginals disagree in shape");
  }
  const double sp = p.sum();
  const double sq = q.sum();
  if (!(sp > 0.0) || !(sq > 0.0)) {
    throw DegenerateInput("round_to_feasible: marginal with zero total mass");
  }
  if (std::abs(sp - sq) > 1e-12 * std::max(sp, sq)) {
    throw DegenerateInput("round_to_feasible: marginals carry different total mass");
  }
  if ((x.array() < 0.0).any() || (p.array() < 0.0).any() || (q.array() < 0.0).any()) {
    throw DegenerateInput("round_to_feasible: negative entry");
  }
  Matrix out = x;
  const Vector r = out.rowwise().sum();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    if (r[i] > p[i]) out.row(i) *= p[i] / r[i];
  }
  const Vector c = out.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    if (c[j] > q[j]) out.col(j) *= q[j] / c[j];
  }
  const Vector err_r = (p - out.rowwise().sum()).cwiseMax(0.0);
  const Vector err_c = (q - out.colwise().sum().transpose()).cwiseMax(0.0);
  const double mass = err_r.sum();
  if (mass > 0.0) out += err_r * err_c.transpose() / mass;
  return out;
}

Matrix assemble_dot_plan(std::span<const Vector> x, int n) {
  if (static_cast<int>(x.size()) != n) {
    throw DimensionMismatch("assemble_dot_plan: expected one column per agent");
  }
  Matrix plan(n, n);
  for (int i = 0; i < n; ++i) {
    if (x[static_cast<std::size_t>(i)].size() != n) {
      throw DimensionMismatch("assemble_dot_plan: column of the wrong length");
    }
    plan.col(i) = x[static_cast<std::size_t>(i)];
  }
  return plan;
}

Matrix sum_deot_plans(std::span<const Vector> x, int n) {
  Matrix plan = Matrix::Zero(n, n);
  for (const Vector& xk : x) plan += unvectorize(xk, n);
  return plan;
}

Metrics metrics_dot(std::span<const Vector> x, const OTInstance& inst, double f_star) {
  const Matrix plan = assemble_dot_plan(x, inst.n);
  Metrics m;
  m.obj_gap = std::abs(inst.cost.cwiseProduct(plan).sum() - f_star);
  m.feas_viol = (plan.rowwise().sum() - inst.p).norm() +
                (plan.colwise().sum().transpose() - inst.q).norm();
  return m;
}

Metrics metrics_deot(std::span<const Vector> x, const EOTInstance& inst, double f_star) {
  const int big_n = inst.num_agents;
  if (static_cast<int>(x.size()) != big_n) {
    throw DimensionMismatch("metrics_deot: expected one plan per agent");
  }
  const int n = inst.n;
  Matrix total = Matrix::Zero(n, n);
  Vector agent_cost(big_n);
  for (int k = 0; k < big_n; ++k) {
    const Matrix xk = unvectorize(x[static_cast<std::size_t>(k)], n);
    agent_cost[k] = inst.costs[static_cast<std::size_t>(k)].cwiseProduct(xk).sum();
    total += xk;
  }
  Metrics m;
  m.obj_gap = std::abs(agent_cost.sum() - f_star);
  m.feas_viol = (total.rowwise().sum() - inst.p).norm() +
                (total.colwise().sum().transpose() - inst.q).norm();
  m.equity_viol = (agent_cost.array() - agent_cost.mean()).abs().mean();
  return m;
}

}  // namespace decot
