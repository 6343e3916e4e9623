#include "decot/problems.hpp"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Cholesky>

#include "decot/errors.hpp"

namespace decot {

namespace {

constexpr double kMarginalTol = 1e-12;

void validate_marginal(const Vector& v, int n, const char* name) {
  if (v.size() != n) {
    throw InvalidInstance(std::string(name) + " must have length " + std::to_string(n));
  }
  if (!v.allFinite() || (v.array() < 0.0).any()) {
    throw InvalidInstance(std::string(name) + " must be finite and nonnegative");
  }
  if (std::abs(v.sum() - 1.0) > kMarginalTol) {
    throw InvalidInstance(std::string(name) + " must sum to 1");
  }
}

void validate_cost(const Matrix& c, int n) {
  if (c.rows() != n || c.cols() != n) {
    throw InvalidInstance("cost matrix must be " + std::to_string(n) + " x " +
                          std::to_string(n));
  }
  if (!c.allFinite() || (c.array() < 0.0).any()) {
    throw InvalidInstance("cost matrix must be finite and nonnegative");
  }
}

Eigen::Matrix2Xd sample_gaussian(int n, const Eigen::Vector2d& mean,
                                 const Eigen::Matrix2d& cov, std::mt19937_64& rng) {
  const Eigen::Matrix2d chol = cov.llt().matrixL();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Matrix2Xd pts(2, n);
  for (int i = 0; i < n; ++i) {
    Eigen::Vector2d z;
    z[0] = normal(rng);
    z[1] = normal(rng);
    pts.col(i) = mean + chol * z;
  }
  return pts;
}

Vector sample_simplex(int n, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = expo(rng);
  return v / v.sum();
}

DotSample sample_with(int n, std::mt19937_64& rng) {
  if (n < 1) throw InvalidInstance("instance dimension must be at least 1");
  Eigen::Matrix2d src_cov;
  src_cov << 10.0, 1.0, 1.0, 10.0;
  Eigen::Matrix2d dst_cov;
  dst_cov << 2.0, -0.2, -0.2, 2.0;
  DotSample out;
  out.sources = sample_gaussian(n, Eigen::Vector2d(1.0, 1.0), src_cov, rng);
  out.targets = sample_gaussian(n, Eigen::Vector2d(2.0, 2.0), dst_cov, rng);
  OTInstance& inst = out.instance;
  inst.n = n;
  inst.cost.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      inst.cost(i, j) = (out.sources.col(i) - out.targets.col(j)).squaredNorm();
    }
  }
  inst.p = sample_simplex(n, rng);
  inst.q = sample_simplex(n, rng);
  return out;
}

}  // namespace

void OTInstance::validate() const {
  if (n < 1) throw InvalidInstance("instance dimension must be at least 1");
  validate_cost(cost, n);
  validate_marginal(p, n, "p");
  validate_marginal(q, n, "q");
}

void EOTInstance::validate() const {
  if (n < 1) throw InvalidInstance("instance dimension must be at least 1");
  if (num_agents < 1 || static_cast<int>(costs.size()) != num_agents) {
    throw InvalidInstance("expected one cost matrix per agent");
  }
  for (const Matrix& c : costs) validate_cost(c, n);
  validate_marginal(p, n, "p");
  validate_marginal(q, n, "q");
}

DotSample sample_dot_instance(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_with(n, rng);
}

OTInstance gen_dot_instance(int n, std::uint64_t seed) {
  return sample_dot_instance(n, seed).instance;
}

EOTInstance gen_deot_instance(int n, int num_agents, std::uint64_t seed,
                              double noise_var) {
  if (num_agents < 2) throw InvalidInstance("equitable instance needs N >= 2");
  if (!(noise_var >= 0.0)) throw InvalidInstance("noise variance must be >= 0");
  std::mt19937_64 rng(seed);
  const DotSample base = sample_with(n, rng);
  EOTInstance inst;
  inst.n = n;
  inst.num_agents = num_agents;
  inst.p = base.instance.p;
  inst.q = base.instance.q;
  std::normal_distribution<double> noise(0.0, std::sqrt(noise_var));
  for (int k = 0; k < num_agents; ++k) {
    Matrix c = base.instance.cost;
    if (noise_var > 0.0) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) c(i, j) = std::max(0.0, c(i, j) + noise(rng));
      }
    }
    inst.costs.push_back(std::move(c));
  }
  return inst;
}

double DccoProblem::objective(const std::vector<Vector>& x) const {
  double f = 0.0;
  for (int i = 0; i < num_agents; ++i) f += costs[i].dot(x[i]);
  return f;
}

Vector DccoProblem::residual(const std::vector<Vector>& x) const {
  Vector r = -rhs;
  Vector ax;
  for (int i = 0; i < num_agents; ++i) {
    operators[i].apply(x[i], ax);
    r += ax;
  }
  return r;
}

DccoProblem reformulate_dot(const OTInstance& inst) {
  inst.validate();
  const int n = inst.n;
  DccoProblem prob;
  prob.kind = ProblemKind::kDot;
  prob.num_agents = n;
  prob.local_dim = n;
  prob.num_rows = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    prob.costs.push_back(inst.cost.col(i));
    prob.operators.push_back(BlockOperator::dot_marginal(i, n));
  }
  prob.rhs.resize(2 * n - 1);
  prob.rhs << inst.p, inst.q.head(n - 1);
  return prob;
}

DccoProblem reformulate_deot(const EOTInstance& inst, const Graph& g) {
  inst.validate();
  if (g.num_agents() != inst.num_agents) {
    throw DimensionMismatch("graph has " + std::to_string(g.num_agents()) +
                            " agents but the instance has " +
                            std::to_string(inst.num_agents));
  }
  const int n = inst.n;
  const int big_n = inst.num_agents;
  const ReducedLaplacian lap(g);
  DccoProblem prob;
  prob.kind = ProblemKind::kDeot;
  prob.num_agents = big_n;
  prob.local_dim = n * n;
  prob.num_rows = 2 * n - 1 + big_n - 1;
  for (int i = 0; i < big_n; ++i) {
    Vector c = vectorize(inst.costs[i]);
    prob.operators.push_back(BlockOperator::deot_block(i, n, big_n, lap.column(i), c));
    prob.costs.push_back(std::move(c));
  }
  prob.rhs = Vector::Zero(prob.num_rows);
  prob.rhs.head(n) = inst.p;
  prob.rhs.segment(n, n - 1) = inst.q.head(n - 1);
  return prob;
}

Vector vectorize(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvectorize(const Vector& v, int n) {
  if (v.size() != static_cast<Eigen::Index>(n) * n) {
    throw DimensionMismatch("unvectorize: expected n^2 entries");
  }
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

}  // namespace decot
