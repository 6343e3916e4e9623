#include "decot/inner_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "decot/errors.hpp"

namespace decot {

namespace {

void check_qp(const LocalQp& qp) {
  if (qp.op == nullptr || qp.cost == nullptr) {
    throw DimensionMismatch("local QP is missing its operator or cost");
  }
  if (qp.cost->size() != qp.op->cols() || qp.target.size() != qp.op->rows()) {
    throw DimensionMismatch("local QP dimensions do not match its operator");
  }
  if (qp.tau > 0.0 && (qp.z == nullptr || qp.z->size() != qp.op->cols())) {
    throw DimensionMismatch("local QP with tau > 0 needs z of length d");
  }
}

InnerResult projected_gradient(const LocalQp& qp, const Vector& x0, const Vector& y0,
                               const InnerOptions& options) {
  const BlockOperator& op = *qp.op;
  const bool has_y = qp.tau > 0.0;
  const double lipschitz = qp.eta + 2.0 * qp.penalty * op.gram_spectral_bound() +
                           (has_y ? 2.0 / qp.tau : 0.0);
  const double step = 1.0 / lipschitz;

  InnerResult res;
  res.x = x0;
  res.y = has_y ? y0.cwiseMax(0.0) : Vector();
  if (!has_y) res.x = res.x.cwiseMax(0.0);

  Vector ax;
  Vector grad_x;
  Vector grad_y;
  Vector next_x;
  Vector next_y;
  for (int it = 1; it <= options.max_iters; ++it) {
    op.apply(res.x, ax);
    op.apply_transpose(ax - qp.target, grad_x);
    grad_x *= 2.0 * qp.penalty;
    grad_x += *qp.cost + qp.eta * res.x;
    if (has_y) {
      grad_y = (res.y - res.x + qp.tau * *qp.z) / qp.tau;
      grad_x -= grad_y;
      next_x = res.x - step * grad_x;
      next_y = (res.y - step * grad_y).cwiseMax(0.0);
    } else {
      next_x = (res.x - step * grad_x).cwiseMax(0.0);
    }
    // Gradient-mapping norm: zero exactly at a constrained stationary point.
    double mapping = (next_x - res.x).squaredNorm();
    if (has_y) mapping += (next_y - res.y).squaredNorm();
    mapping = std::sqrt(mapping) * lipschitz;
    res.x.swap(next_x);
    if (has_y) res.y.swap(next_y);
    res.iterations = it;
    if (mapping <= options.tol) {
      if (!has_y) res.y = res.x;
      return res;
    }
  }
  throw InnerNoConverge("projected gradient did not reach tolerance " +
                        std::to_string(options.tol) + " in " +
                        std::to_string(options.max_iters) + " iterations");
}

}  // namespace

double LocalQp::objective(const Vector& x, const Vector& y) const {
  const Vector r = op->apply(x) - target;
  double f = cost->dot(x) + 0.5 * eta * x.squaredNorm() + penalty * r.squaredNorm();
  if (tau > 0.0) f += (y - x + tau * *z).squaredNorm() / (2.0 * tau);
  return f;
}

InnerResult solve_nnls(const BlockOperator& op, double scale, const Vector& s,
                       double eta, const Vector& x0, const InnerOptions& options) {
  const int d = op.cols();
  const int m = op.rows();
  if (s.size() != m || x0.size() != d) {
    throw DimensionMismatch("solve_nnls: dimension mismatch");
  }
  const double sqrt_eta = std::sqrt(std::max(eta, 0.0));

  Vector x = x0.cwiseMax(0.0);
  std::vector<char> passive(static_cast<std::size_t>(d), 0);
  for (int j = 0; j < d; ++j) passive[static_cast<std::size_t>(j)] = x[j] > 0.0;

  Vector bx;
  Vector grad;
  Vector col;
  Matrix design;
  Vector rhs;
  std::vector<int> idx;

  // Least squares restricted to the passive set; returns the full-length z.
  auto solve_passive = [&]() {
    idx.clear();
    for (int j = 0; j < d; ++j) {
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    }
    const int k = static_cast<int>(idx.size());
    Vector z = Vector::Zero(d);
    if (k == 0) return z;
    const int extra = sqrt_eta > 0.0 ? k : 0;
    design.setZero(m + extra, k);
    rhs.setZero(m + extra);
    rhs.head(m) = s;
    for (int c = 0; c < k; ++c) {
      op.column(idx[static_cast<std::size_t>(c)], col);
      design.col(c).head(m) = scale * col;
      if (extra > 0) design(m + c, c) = sqrt_eta;
    }
    const Vector sol = design.colPivHouseholderQr().solve(rhs);
    for (int c = 0; c < k; ++c) z[idx[static_cast<std::size_t>(c)]] = sol[c];
    return z;
  };

  op.apply_transpose(s, grad);
  const double grad_scale = std::max(1.0, scale * grad.cwiseAbs().maxCoeff());
  const double dual_tol = options.tol * grad_scale;

  InnerResult res;
  int iters = 0;
  std::vector<char> blocked(static_cast<std::size_t>(d), 0);
  std::optional<Vector> pending;
  bool need_inner = std::any_of(passive.begin(), passive.end(), [](char c) { return c != 0; });
  while (true) {
    // Restore optimality on the passive set while staying feasible.
    while (need_inner) {
      if (++iters > options.max_iters) {
        throw InnerNoConverge("active-set NNLS exceeded " +
                              std::to_string(options.max_iters) + " iterations");
      }
      Vector z = pending ? std::move(*pending) : solve_passive();
      pending.reset();
      double alpha = 1.0;
      int blocking = -1;
      for (int j : idx) {
        if (z[j] > 0.0) continue;
        const double denom = x[j] - z[j];
        const double a = denom > 0.0 ? x[j] / denom : 0.0;
        if (blocking < 0 || a < alpha) {
          alpha = a;
          blocking = j;
        }
      }
      if (blocking < 0) {
        x = std::move(z);
        break;
      }
      x += alpha * (z - x);
      x[blocking] = 0.0;
      for (int j : idx) {
        if (x[j] <= 0.0) {
          x[j] = 0.0;
          passive[static_cast<std::size_t>(j)] = 0;
        }
      }
    }
    // Negative gradient of the objective.
    op.apply(x, bx);
    op.apply_transpose(s - scale * bx, grad);
    grad = scale * grad - eta * x;
    int enter = -1;
    double best = dual_tol;
    for (int j = 0; j < d; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      if (passive[uj] || blocked[uj]) continue;
      if (grad[j] > best) {
        best = grad[j];
        enter = j;
      }
    }
    if (enter < 0) break;
    passive[static_cast<std::size_t>(enter)] = 1;
    Vector z = solve_passive();
    if (z[enter] <= 0.0) {
      // Round-off can make the entering variable come out nonpositive; keep
      // it out until the passive set changes, otherwise LH cycles.
      passive[static_cast<std::size_t>(enter)] = 0;
      blocked[static_cast<std::size_t>(enter)] = 1;
      need_inner = false;
      continue;
    }
    std::fill(blocked.begin(), blocked.end(), 0);
    pending = std::move(z);
    need_inner = true;
  }
  res.x = std::move(x);
  res.y = res.x;
  res.iterations = iters;
  return res;
}

InnerResult solve_local_qp(const LocalQp& qp, const Vector& x0, const Vector& y0,
                           const InnerOptions& options) {
  check_qp(qp);
  InnerMethod method = options.method;
  if (method == InnerMethod::kAuto) {
    method = qp.tau > 0.0 ? InnerMethod::kProjectedGradient : InnerMethod::kActiveSet;
  }
  if (method == InnerMethod::kActiveSet) {
    if (qp.tau > 0.0) {
      throw DimensionMismatch("active-set inner solver requires tau = 0");
    }
    // c^T x + p|Ax - t|^2 = p|Ax - (t - v/(2p))|^2 + const with A^T v = c.
    const Vector v = qp.op->cost_preimage(*qp.cost);
    const double scale = std::sqrt(2.0 * qp.penalty);
    const Vector shifted = qp.target - v / (2.0 * qp.penalty);
    return solve_nnls(*qp.op, scale, scale * shifted, qp.eta, x0, options);
  }
  return projected_gradient(qp, x0, y0, options);
}

}  // namespace decot
