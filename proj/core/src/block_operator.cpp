#include "decot/block_operator.hpp"

#include <cmath>
#include <random>
#include <string>

#include "decot/errors.hpp"

namespace decot {

namespace {

void check_len(Eigen::Index got, int want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + ": expected length " +
                            std::to_string(want) + ", got " + std::to_string(got));
  }
}

}  // namespace

BlockOperator BlockOperator::dot_marginal(int agent, int n) {
  if (n < 1 || agent < 0 || agent >= n) {
    throw DimensionMismatch("dot_marginal: agent index out of range");
  }
  BlockOperator op;
  op.kind_ = Kind::kDotMarginal;
  op.agent_ = agent;
  op.n_ = n;
  op.num_agents_ = n;
  op.rows_ = 2 * n - 1;
  op.cols_ = n;
  return op;
}

BlockOperator BlockOperator::deot_block(
    int agent, int n, int num_agents,
    std::vector<std::pair<int, double>> laplacian_column, Vector cost) {
  if (n < 1 || num_agents < 1 || agent < 0 || agent >= num_agents) {
    throw DimensionMismatch("deot_block: agent index out of range");
  }
  check_len(cost.size(), n * n, "deot_block cost");
  for (const auto& [row, value] : laplacian_column) {
    (void)value;
    if (row < 0 || row >= num_agents - 1) {
      throw DimensionMismatch("deot_block: Laplacian row out of range");
    }
  }
  BlockOperator op;
  op.kind_ = Kind::kDeotBlock;
  op.agent_ = agent;
  op.n_ = n;
  op.num_agents_ = num_agents;
  op.rows_ = 2 * n - 1 + num_agents - 1;
  op.cols_ = n * n;
  op.lap_col_ = std::move(laplacian_column);
  op.cost_ = std::make_shared<const Vector>(std::move(cost));
  op.gram_bound_ = op.estimate_gram_bound();
  return op;
}

void BlockOperator::apply(const Vector& x, Vector& out, OpCounter* ops) const {
  check_len(x.size(), cols_, "apply");
  out.setZero(rows_);
  const int n = n_;
  if (kind_ == Kind::kDotMarginal) {
    double sum = 0.0;
    for (int r = 0; r < n; ++r) {
      out[r] = x[r];
      sum += x[r];
    }
    if (agent_ < n - 1) out[n + agent_] = sum;
    count_ops(ops, 2 * static_cast<std::uint64_t>(n));
    return;
  }
  // Column-major plan: x[j * n + i] = X(i, j).
  double cost_dot = 0.0;
  const Vector& c = *cost_;
  for (int j = 0; j < n; ++j) {
    double col_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = x[j * n + i];
      out[i] += v;
      col_sum += v;
      cost_dot += c[j * n + i] * v;
    }
    if (j < n - 1) out[n + j] = col_sum;
  }
  const int eq0 = 2 * n - 1;
  for (const auto& [row, value] : lap_col_) out[eq0 + row] = value * cost_dot;
  count_ops(ops, 4 * static_cast<std::uint64_t>(n) * n + lap_col_.size());
}

void BlockOperator::apply_transpose(const Vector& v, Vector& out,
                                    OpCounter* ops) const {
  check_len(v.size(), rows_, "apply_transpose");
  out.resize(cols_);
  const int n = n_;
  if (kind_ == Kind::kDotMarginal) {
    const double shift = agent_ < n - 1 ? v[n + agent_] : 0.0;
    for (int r = 0; r < n; ++r) out[r] = v[r] + shift;
    count_ops(ops, static_cast<std::uint64_t>(n));
    return;
  }
  const int eq0 = 2 * n - 1;
  double equity = 0.0;
  for (const auto& [row, value] : lap_col_) equity += value * v[eq0 + row];
  const Vector& c = *cost_;
  for (int j = 0; j < n; ++j) {
    const double col_term = j < n - 1 ? v[n + j] : 0.0;
    for (int i = 0; i < n; ++i) {
      out[j * n + i] = v[i] + col_term + equity * c[j * n + i];
    }
  }
  count_ops(ops, 3 * static_cast<std::uint64_t>(n) * n + 2 * lap_col_.size());
}

void BlockOperator::column(int j, Vector& out) const {
  if (j < 0 || j >= cols_) throw DimensionMismatch("column index out of range");
  out.setZero(rows_);
  const int n = n_;
  if (kind_ == Kind::kDotMarginal) {
    out[j] = 1.0;
    if (agent_ < n - 1) out[n + agent_] = 1.0;
    return;
  }
  const int row = j % n;
  const int col = j / n;
  out[row] = 1.0;
  if (col < n - 1) out[n + col] = 1.0;
  const double cj = (*cost_)[j];
  for (const auto& [r, value] : lap_col_) out[2 * n - 1 + r] = value * cj;
}

Matrix BlockOperator::dense() const {
  if (n_ > kMaxDenseN) {
    throw DimensionMismatch("refusing to materialize a block operator with n = " +
                            std::to_string(n_));
  }
  Matrix out(rows_, cols_);
  Vector col;
  for (int j = 0; j < cols_; ++j) {
    column(j, col);
    out.col(j) = col;
  }
  return out;
}

double BlockOperator::gram_spectral_bound() const {
  if (kind_ == Kind::kDotMarginal) {
    // M~_i^T M~_i = I + 1 1^T for every agent but the last, whose block is I.
    return agent_ < n_ - 1 ? static_cast<double>(n_ + 1) : 1.0;
  }
  return gram_bound_;
}

double BlockOperator::estimate_gram_bound() const {
  std::mt19937_64 rng(0x5eedULL + static_cast<std::uint64_t>(agent_));
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Vector v(cols_);
  for (int j = 0; j < cols_; ++j) v[j] = unif(rng);
  v.normalize();
  Vector av;
  Vector atav;
  double estimate = 0.0;
  for (int it = 0; it < 1000; ++it) {
    apply(v, av);
    apply_transpose(av, atav);
    const double next = atav.norm();
    if (next == 0.0) return 0.0;
    v = atav / next;
    const bool done = it > 10 && std::abs(next - estimate) <= 1e-13 * next;
    estimate = next;
    if (done) break;
  }
  return 1.01 * estimate;
}

Vector BlockOperator::cost_preimage(const Vector& cost) const {
  check_len(cost.size(), cols_, "cost_preimage");
  Vector out = Vector::Zero(rows_);
  if (kind_ == Kind::kDotMarginal) {
    // The first n rows are the identity.
    out.head(n_) = cost;
    return out;
  }
  // cost is parallel to the agent's own cost vector only through the equity
  // block: E^T u = (l^T u) c with l the Laplacian column.
  double l2 = 0.0;
  for (const auto& [row, value] : lap_col_) l2 += value * value;
  const Vector& c = *cost_;
  const double scale = c.squaredNorm();
  if (l2 == 0.0 || scale == 0.0) {
    if (cost.isZero(0.0)) return out;
    throw DimensionMismatch("cost_preimage: cost is not in the row space");
  }
  // Solve for the component of `cost` along c; callers pass c itself, so the
  // residual is zero.
  const double alpha = c.dot(cost) / scale;
  if ((cost - alpha * c).norm() > 1e-12 * (1.0 + cost.norm())) {
    throw DimensionMismatch("cost_preimage: cost is not in the row space");
  }
  const int eq0 = 2 * n_ - 1;
  for (const auto& [row, value] : lap_col_) out[eq0 + row] = alpha * value / l2;
  return out;
}

}  // namespace decot
