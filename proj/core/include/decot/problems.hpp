#ifndef DECOT_PROBLEMS_HPP_
#define DECOT_PROBLEMS_HPP_

#include <cstdint>
#include <vector>

#include "decot/block_operator.hpp"
#include "decot/topology.hpp"
#include "decot/types.hpp"

namespace decot {

// Discrete transport problem: min <C, X> s.t. X 1 = p, X^T 1 = q, X >= 0.
struct OTInstance {
  int n = 0;
  Matrix cost;  // n x n, nonnegative
  Vector p;     // source marginal
  Vector q;     // target marginal

  // Throws InvalidInstance on shape errors, negative entries or marginals that
  // do not sum to one within 1e-12.
  void validate() const;
};

// Equitable transport: N private cost matrices, a joint plan split into
// per-agent plans X^k, equal per-agent transport costs.
struct EOTInstance {
  int n = 0;
  int num_agents = 0;
  std::vector<Matrix> costs;  // N matrices, n x n, nonnegative
  Vector p;
  Vector q;

  void validate() const;
};

// A generated transport instance together with the point clouds behind its
// squared-distance costs.
struct DotSample {
  OTInstance instance;
  Eigen::Matrix2Xd sources;  // 2 x n
  Eigen::Matrix2Xd targets;  // 2 x n
};

// Sources ~ N((1,1), [[10,1],[1,10]]), targets ~ N((2,2), [[2,-0.2],[-0.2,2]]),
// C_ij = |x_i - y_j|^2, p and q uniform on the simplex. Deterministic per seed.
DotSample sample_dot_instance(int n, std::uint64_t seed);
OTInstance gen_dot_instance(int n, std::uint64_t seed);

// Base cost from the transport generator, then C^k = C_base + noise with
// noise ~ N(0, noise_var) per entry, clamped at zero.
EOTInstance gen_deot_instance(int n, int num_agents, std::uint64_t seed,
                              double noise_var = 10.0);

enum class ProblemKind { kDot, kDeot };

// min sum_i c_i^T x_i  s.t.  sum_i A_i x_i = b,  x_i >= 0.
struct DccoProblem {
  ProblemKind kind = ProblemKind::kDot;
  int num_agents = 0;
  int local_dim = 0;  // d
  int num_rows = 0;   // m
  std::vector<Vector> costs;
  std::vector<BlockOperator> operators;
  Vector rhs;

  double objective(const std::vector<Vector>& x) const;
  // sum_i A_i x_i - b
  Vector residual(const std::vector<Vector>& x) const;
};

// n agents, agent i owns column i of C and of the plan. b = [p; q without its
// last entry].
DccoProblem reformulate_dot(const OTInstance& inst);

// N agents, agent i owns the column-major vectorization of C^i and X^i.
// b = [p; q without its last entry; 0_{N-1}].
DccoProblem reformulate_deot(const EOTInstance& inst, const Graph& g);

// Column-major vectorization of an n x n matrix and its inverse.
Vector vectorize(const Matrix& m);
Matrix unvectorize(const Vector& v, int n);

}  // namespace decot

#endif  // DECOT_PROBLEMS_HPP_
