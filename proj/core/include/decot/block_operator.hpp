#ifndef DECOT_BLOCK_OPERATOR_HPP_
#define DECOT_BLOCK_OPERATOR_HPP_

#include <memory>
#include <utility>
#include <vector>

#include "decot/types.hpp"

namespace decot {

// Structured per-agent coupling matrix A_i. Never stored densely.
//
// kDotMarginal: the marginal block of agent `agent` for an n-point transport
//   problem, i.e. I_n stacked over the indicator row of the agent's column
//   sum, with the final column-sum row dropped. Shape (2n-1) x n.
//
// kDeotBlock: the reduced marginal operator acting on a column-major
//   vectorized n x n plan, stacked over the equity block
//   L~[:, agent] * cost^T. Shape (2n-1 + N-1) x n^2.
class BlockOperator {
 public:
  enum class Kind { kDotMarginal, kDeotBlock };

  static BlockOperator dot_marginal(int agent, int n);
  // `laplacian_column` holds the nonzero (row, value) entries of column
  // `agent` of the reduced Laplacian; `cost` is the agent's vectorized cost.
  static BlockOperator deot_block(int agent, int n, int num_agents,
                                  std::vector<std::pair<int, double>> laplacian_column,
                                  Vector cost);

  Kind kind() const { return kind_; }
  int agent() const { return agent_; }
  int n() const { return n_; }
  int num_agents() const { return num_agents_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  // out = A x. `out` is resized to rows().
  void apply(const Vector& x, Vector& out, OpCounter* ops = nullptr) const;
  // out = A^T v. `out` is resized to cols().
  void apply_transpose(const Vector& v, Vector& out, OpCounter* ops = nullptr) const;

  Vector apply(const Vector& x) const {
    Vector out;
    apply(x, out);
    return out;
  }
  Vector apply_transpose(const Vector& v) const {
    Vector out;
    apply_transpose(v, out);
    return out;
  }

  // Column j of A, written densely into `out` (length rows()).
  void column(int j, Vector& out) const;

  // Dense copy for tests and small-scale inspection. Throws DimensionMismatch
  // when n > 8: production paths must not materialize these operators.
  Matrix dense() const;

  // Upper bound on lambda_max(A^T A). Exact for kDotMarginal (n+1, or 1 for
  // the last agent); a 1.01-inflated power-iteration estimate otherwise.
  double gram_spectral_bound() const;

  // Row-space preimage of the agent cost: a vector v with A^T v = cost.
  // Exists for both operator kinds, which lets the linear term of the local
  // subproblem be folded into a least-squares residual.
  Vector cost_preimage(const Vector& cost) const;

  static constexpr int kMaxDenseN = 8;

 private:
  BlockOperator() = default;

  Kind kind_ = Kind::kDotMarginal;
  int agent_ = 0;
  int n_ = 0;
  int num_agents_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::pair<int, double>> lap_col_;
  std::shared_ptr<const Vector> cost_;
  double gram_bound_ = 0.0;

  double estimate_gram_bound() const;
};

}  // namespace decot

#endif  // DECOT_BLOCK_OPERATOR_HPP_
