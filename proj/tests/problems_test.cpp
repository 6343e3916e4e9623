#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "brute_force.hpp"
#include "decot/errors.hpp"
#include "decot/instance_io.hpp"
#include "decot/oracle.hpp"
#include "decot/problems.hpp"

namespace decot {
namespace {

Vector random_vector(std::mt19937_64& rng, int len) {
  std::normal_distribution<double> normal;
  Vector v(len);
  for (int i = 0; i < len; ++i) v[i] = normal(rng);
  return v;
}

double max_eig(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(m.transpose() * m).eigenvalues().maxCoeff();
}

TEST(GenDot, OnePoint) {
  const OTInstance inst = gen_dot_instance(1, 3);
  EXPECT_DOUBLE_EQ(inst.p[0], 1.0);
  EXPECT_DOUBLE_EQ(inst.q[0], 1.0);
  EXPECT_GE(inst.cost(0, 0), 0.0);
}

TEST(GenDot, MarginalsSumToOne) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const OTInstance inst = gen_dot_instance(2, seed);
    EXPECT_NEAR(inst.p.sum(), 1.0, 1e-12);
    EXPECT_NEAR(inst.q.sum(), 1.0, 1e-12);
    EXPECT_NO_THROW(inst.validate());
  }
}

TEST(GenDot, CostRecomputedFromSamples) {
  const DotSample s = sample_dot_instance(50, 1);
  const Matrix& c = s.instance.cost;
  EXPECT_TRUE(c.allFinite());
  EXPECT_GE(c.minCoeff(), 0.0);
  double mean = 0.0;
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const double dx = s.sources(0, i) - s.targets(0, j);
      const double dy = s.sources(1, i) - s.targets(1, j);
      EXPECT_NEAR(c(i, j), dx * dx + dy * dy, 1e-12);
      mean += dx * dx + dy * dy;
    }
  }
  EXPECT_NEAR(c.mean(), mean / 2500.0, 1e-12);
  EXPECT_EQ(gen_dot_instance(50, 1).cost, c);
}

TEST(GenDot, SampleMomentsFollowTheStatedGaussians) {
  const DotSample s = sample_dot_instance(20000, 9);
  const Eigen::Vector2d ms = s.sources.rowwise().mean();
  const Eigen::Vector2d mt = s.targets.rowwise().mean();
  EXPECT_NEAR(ms[0], 1.0, 0.1);
  EXPECT_NEAR(mt[1], 2.0, 0.05);
  const Eigen::Matrix2Xd cs = s.sources.colwise() - ms;
  const Eigen::Matrix2Xd ct = s.targets.colwise() - mt;
  const Eigen::Matrix2d covs = cs * cs.transpose() / 20000.0;
  const Eigen::Matrix2d covt = ct * ct.transpose() / 20000.0;
  EXPECT_NEAR(covs(0, 0), 10.0, 0.5);
  EXPECT_NEAR(covs(0, 1), 1.0, 0.3);
  EXPECT_NEAR(covt(1, 1), 2.0, 0.1);
  EXPECT_NEAR(covt(0, 1), -0.2, 0.06);
}

TEST(GenDeot, ZeroNoiseCopiesTheBase) {
  const EOTInstance inst = gen_deot_instance(4, 3, 2, 0.0);
  const OTInstance base = gen_dot_instance(4, 2);
  for (const Matrix& c : inst.costs) EXPECT_EQ(c, base.cost);
  EXPECT_EQ(inst.p, base.p);
}

TEST(GenDeot, ClampKeepsCostsNonnegative) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const EOTInstance inst = gen_deot_instance(2, 2, seed);
    for (const Matrix& c : inst.costs) EXPECT_GE(c.minCoeff(), 0.0);
  }
}

TEST(GenDeot, PaperScaleNoiseIsVarianceTen) {
  const EOTInstance a = gen_deot_instance(20, 10, 1);
  const EOTInstance b = gen_deot_instance(20, 10, 1);
  const OTInstance base = gen_dot_instance(20, 1);
  double sum = 0.0;
  double sq = 0.0;
  int count = 0;
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(a.costs[k], b.costs[k]);
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) {
        // Far from zero the clamp never triggers.
        if (base.cost(i, j) < 25.0) continue;
        const double dev = a.costs[k](i, j) - base.cost(i, j);
        sum += dev;
        sq += dev * dev;
        ++count;
      }
    }
  }
  ASSERT_GT(count, 200);
  const double mean = sum / count;
  const double var = sq / count - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.6);
  EXPECT_NEAR(var, 10.0, 2.5);
}

TEST(GenDeot, NeedsTwoAgents) {
  EXPECT_THROW(gen_deot_instance(3, 1, 1), InvalidInstance);
}

TEST(Validate, RejectsBadInstances) {
  OTInstance inst = gen_dot_instance(3, 1);
  inst.p[0] += 1e-9;
  EXPECT_THROW(inst.validate(), InvalidInstance);
  inst = gen_dot_instance(3, 1);
  inst.cost(1, 1) = -1.0;
  EXPECT_THROW(inst.validate(), InvalidInstance);
  inst = gen_dot_instance(3, 1);
  inst.q.resize(2);
  EXPECT_THROW(inst.validate(), InvalidInstance);
}

TEST(ReformulateDot, TwoPoints) {
  OTInstance inst;
  inst.n = 2;
  inst.cost = Matrix::Ones(2, 2);
  inst.p = Vector::Constant(2, 0.5);
  inst.q = Vector::Constant(2, 0.5);
  inst.p << 0.3, 0.7;
  const DccoProblem prob = reformulate_dot(inst);
  Matrix m1(3, 2);
  m1 << 1, 0, 0, 1, 1, 1;
  Matrix m2(3, 2);
  m2 << 1, 0, 0, 1, 0, 0;
  EXPECT_EQ(prob.operators[0].dense(), m1);
  EXPECT_EQ(prob.operators[1].dense(), m2);
  EXPECT_EQ(prob.rhs, (Vector(3) << 0.3, 0.7, 0.5).finished());
  EXPECT_EQ(prob.local_dim, 2);
  EXPECT_EQ(prob.num_rows, 3);
}

TEST(ReformulateDot, OnePoint) {
  const DccoProblem prob = reformulate_dot(gen_dot_instance(1, 1));
  EXPECT_EQ(prob.operators[0].dense(), Matrix::Ones(1, 1));
  EXPECT_EQ(prob.rhs, Vector::Ones(1));
}

TEST(ReformulateDot, ProductPlanSatisfiesCoupling) {
  const OTInstance inst = gen_dot_instance(4, 6);
  const DccoProblem prob = reformulate_dot(inst);
  const Matrix x = inst.p * inst.q.transpose();
  std::vector<Vector> cols;
  for (int i = 0; i < 4; ++i) cols.push_back(x.col(i));
  EXPECT_LT(prob.residual(cols).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(prob.objective(cols), inst.cost.cwiseProduct(x).sum(), 1e-12);
}

TEST(ReformulateDeot, TwoAgentEquityRows) {
  const EOTInstance inst = gen_deot_instance(2, 2, 4);
  const DccoProblem prob = reformulate_deot(inst, path_graph(2));
  const Matrix a1 = prob.operators[0].dense();
  const Matrix a2 = prob.operators[1].dense();
  ASSERT_EQ(a1.rows(), 4);
  EXPECT_EQ(a1.row(3).transpose(), prob.costs[0]);
  EXPECT_EQ(a2.row(3).transpose(), -prob.costs[1]);
  EXPECT_EQ(prob.costs[0], vectorize(inst.costs[0]));
  EXPECT_EQ(prob.rhs.tail(1), Vector::Zero(1));
  EXPECT_EQ(prob.rhs.head(2), inst.p);
  EXPECT_EQ(prob.rhs.segment(2, 1), inst.q.head(1));
}

TEST(ReformulateDeot, PathEquityRowsFromHandMatvec) {
  const EOTInstance inst = gen_deot_instance(2, 3, 4);
  const DccoProblem prob = reformulate_deot(inst, path_graph(3));
  std::vector<Vector> x;
  const double costs[] = {1.0, 2.0, 1.0};
  for (int k = 0; k < 3; ++k) x.push_back(prob.costs[k] * (costs[k] / prob.costs[k].squaredNorm()));
  const Vector r = prob.residual(x) + prob.rhs;
  EXPECT_NEAR(r[3], -1.0, 1e-12);
  EXPECT_NEAR(r[4], 2.0, 1e-12);
}

TEST(ReformulateDeot, EqualCostsGiveZeroEquityRows) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3;
    const int big_n = 2 + trial % 4;
    const EOTInstance inst = gen_deot_instance(n, big_n, static_cast<std::uint64_t>(trial));
    const DccoProblem prob = reformulate_deot(
        inst, random_connected_graph(big_n, 0.5, static_cast<std::uint64_t>(trial)));
    std::vector<Vector> x;
    std::vector<double> cost;
    for (int k = 0; k < big_n; ++k) {
      Vector xk(n * n);
      for (int j = 0; j < n * n; ++j) xk[j] = unif(rng);
      x.push_back(xk);
      cost.push_back(prob.costs[k].dot(xk));
    }
    // Unequal costs: some equity row is nonzero.
    Vector r = prob.residual(x) + prob.rhs;
    EXPECT_GT(r.tail(big_n - 1).cwiseAbs().maxCoeff(), 1e-10);
    for (int k = 0; k < big_n; ++k) x[k] *= 3.0 / cost[k];
    r = prob.residual(x) + prob.rhs;
    EXPECT_LT(r.tail(big_n - 1).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ReformulateDeot, GraphSizeMismatch) {
  EXPECT_THROW(reformulate_deot(gen_deot_instance(3, 3, 1), path_graph(4)), DimensionMismatch);
}

TEST(BlockOperator, DotApplyExamples) {
  const BlockOperator op = BlockOperator::dot_marginal(0, 2);
  EXPECT_EQ(op.apply(Vector::LinSpaced(2, 3, 4)), (Vector(3) << 3, 4, 7).finished());
  EXPECT_EQ(op.apply_transpose(Vector::Ones(3)), (Vector(2) << 2, 2).finished());
}

TEST(BlockOperator, DotApplyCountsTwoTouchesPerEntry) {
  OpCounter ops;
  Vector out;
  BlockOperator::dot_marginal(3, 10).apply(Vector::Ones(10), out, &ops);
  EXPECT_EQ(ops.ops, 20u);
}

TEST(BlockOperator, StructuredMatchesDense) {
  std::mt19937_64 rng(17);
  for (int n = 1; n <= 8; ++n) {
    for (int i = 0; i < n; ++i) {
      const BlockOperator op = BlockOperator::dot_marginal(i, n);
      const Matrix d = op.dense();
      const Vector x = random_vector(rng, n);
      const Vector v = random_vector(rng, 2 * n - 1);
      EXPECT_LT((op.apply(x) - d * x).cwiseAbs().maxCoeff(), 1e-14);
      EXPECT_LT((op.apply_transpose(v) - d.transpose() * v).cwiseAbs().maxCoeff(), 1e-14);
    }
    for (int big_n = 2; big_n <= 5; ++big_n) {
      const EOTInstance inst = gen_deot_instance(n, big_n, static_cast<std::uint64_t>(n));
      const DccoProblem prob = reformulate_deot(inst, random_connected_graph(big_n, 0.5, 2));
      for (const BlockOperator& op : prob.operators) {
        const Matrix d = op.dense();
        const Vector x = random_vector(rng, op.cols());
        const Vector v = random_vector(rng, op.rows());
        const double scale = 1.0 + d.cwiseAbs().maxCoeff();
        EXPECT_LT((op.apply(x) - d * x).cwiseAbs().maxCoeff(), 1e-14 * scale * op.cols());
        EXPECT_LT((op.apply_transpose(v) - d.transpose() * v).cwiseAbs().maxCoeff(),
                  1e-14 * scale * op.rows());
      }
    }
  }
}

TEST(BlockOperator, DenseRefusedAboveEight) {
  EXPECT_THROW(BlockOperator::dot_marginal(0, 9).dense(), DimensionMismatch);
}

TEST(BlockOperator, DimensionChecks) {
  const BlockOperator op = BlockOperator::dot_marginal(0, 3);
  Vector out;
  EXPECT_THROW(op.apply(Vector::Ones(4), out), DimensionMismatch);
  EXPECT_THROW(op.apply_transpose(Vector::Ones(3), out), DimensionMismatch);
  EXPECT_THROW(BlockOperator::dot_marginal(3, 3), DimensionMismatch);
}

TEST(BlockOperator, GramBoundDot) {
  EXPECT_DOUBLE_EQ(BlockOperator::dot_marginal(0, 2).gram_spectral_bound(), 3.0);
  EXPECT_NEAR(max_eig(BlockOperator::dot_marginal(0, 2).dense()), 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(BlockOperator::dot_marginal(1, 2).gram_spectral_bound(), 1.0);
  for (int n = 1; n <= 8; ++n) {
    for (int i = 0; i < n; ++i) {
      const BlockOperator op = BlockOperator::dot_marginal(i, n);
      EXPECT_NEAR(op.gram_spectral_bound(), max_eig(op.dense()), 1e-10);
    }
  }
}

TEST(BlockOperator, GramBoundDeotIsAnUpperBound) {
  for (int n = 2; n <= 4; ++n) {
    for (int big_n = 2; big_n <= 4; ++big_n) {
      const EOTInstance inst = gen_deot_instance(n, big_n, 5);
      const DccoProblem prob = reformulate_deot(inst, path_graph(big_n));
      for (const BlockOperator& op : prob.operators) {
        const double truth = max_eig(op.dense());
        EXPECT_GE(op.gram_spectral_bound(), truth);
        EXPECT_LE(op.gram_spectral_bound(), 1.02 * truth);
      }
    }
  }
}

TEST(BlockOperator, CostPreimage) {
  const DccoProblem dot = reformulate_dot(gen_dot_instance(5, 1));
  for (int i = 0; i < 5; ++i) {
    const Vector v = dot.operators[i].cost_preimage(dot.costs[i]);
    EXPECT_LT((dot.operators[i].apply_transpose(v) - dot.costs[i]).norm(), 1e-12);
  }
  const DccoProblem deot = reformulate_deot(gen_deot_instance(3, 4, 1), star_graph(4));
  for (int i = 0; i < 4; ++i) {
    const Vector v = deot.operators[i].cost_preimage(deot.costs[i]);
    EXPECT_LT((deot.operators[i].apply_transpose(v) - deot.costs[i]).norm(), 1e-10);
  }
  EXPECT_THROW(deot.operators[0].cost_preimage(deot.costs[1]), DimensionMismatch);
}

TEST(BlockOperator, StackedMarginalRank) {
  for (int n = 1; n <= 6; ++n) {
    Matrix stacked(2 * n - 1, n * n);
    for (int i = 0; i < n; ++i) {
      stacked.middleCols(i * n, n) = BlockOperator::dot_marginal(i, n).dense();
    }
    EXPECT_EQ(testing::rank_by_elimination(stacked), 2 * n - 1);
  }
}

TEST(Reformulation, CoupledLpMatchesDirectLp) {
  for (int n = 2; n <= 5; ++n) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const OTInstance inst = gen_dot_instance(n, seed);
      const OtSolution direct = solve_ot_lp(inst);
      const DccoSolution coupled = lp_solve(reformulate_dot(inst));
      EXPECT_NEAR(coupled.objective, direct.objective, 1e-8);
      const Matrix plan = assemble_dot_plan(coupled.x, n);
      EXPECT_NEAR(inst.cost.cwiseProduct(plan).sum(), direct.objective, 1e-8);
      EXPECT_LT((plan.rowwise().sum() - inst.p).norm(), 1e-9);
      EXPECT_LT((plan.colwise().sum().transpose() - inst.q).norm(), 1e-9);
    }
  }
}

TEST(Vectorize, ColumnMajor) {
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  EXPECT_EQ(vectorize(m), (Vector(4) << 1, 3, 2, 4).finished());
  EXPECT_EQ(unvectorize(vectorize(m), 2), m);
  EXPECT_THROW(unvectorize(Vector::Ones(3), 2), DimensionMismatch);
}

TEST(InstanceIo, DotRoundTripIsExact) {
  const OTInstance inst = gen_dot_instance(7, 3);
  std::stringstream s;
  write_instance(s, inst);
  const Instance back = read_instance(s);
  const auto& got = std::get<OTInstance>(back);
  EXPECT_EQ(got.n, 7);
  EXPECT_EQ(got.cost, inst.cost);
  EXPECT_EQ(got.p, inst.p);
  EXPECT_EQ(got.q, inst.q);
}

TEST(InstanceIo, DeotRoundTripIsExact) {
  const EOTInstance inst = gen_deot_instance(4, 3, 8);
  std::stringstream s;
  write_instance(s, inst);
  const auto got = std::get<EOTInstance>(read_instance(s));
  ASSERT_EQ(got.num_agents, 3);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(got.costs[k], inst.costs[k]);
  EXPECT_EQ(got.p, inst.p);
}

TEST(InstanceIo, RowMajorText) {
  OTInstance inst;
  inst.n = 2;
  inst.cost.resize(2, 2);
  inst.cost << 0, 1, 2, 3;
  inst.p = Vector::Constant(2, 0.5);
  inst.q = Vector::Constant(2, 0.5);
  std::stringstream s;
  write_instance(s, inst);
  EXPECT_NE(s.str().find("cost 1\n0 1\n2 3\n"), std::string::npos);
}

TEST(InstanceIo, SubnormalValuesSurvive) {
  OTInstance inst = gen_dot_instance(2, 1);
  inst.cost(0, 1) = 4.9406564584124654e-324;
  std::stringstream s;
  write_instance(s, inst);
  EXPECT_EQ(std::get<OTInstance>(read_instance(s)).cost, inst.cost);
}

TEST(InstanceIo, ParseErrors) {
  std::stringstream bad_magic("hello 1\n");
  EXPECT_THROW(read_instance(bad_magic), ParseError);
  std::stringstream truncated("decot-instance 1\nkind dot\nn 2\nN 1\np 0.5\n");
  EXPECT_THROW(read_instance(truncated), ParseError);
  std::stringstream bad_number("decot-instance 1\nkind dot\nn 1\nN 1\np 1x\n");
  EXPECT_THROW(read_instance(bad_number), ParseError);
}

}  // namespace
}  // namespace decot
