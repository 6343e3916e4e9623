#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "decot/errors.hpp"
#include "decot/oracle.hpp"
#include "decot/problems.hpp"
#include "decot/topology.hpp"

namespace decot::cli {

namespace {

// Returns an empty string on success, otherwise the first failing detail.
using Check = std::function<std::string(int case_index, std::uint64_t seed)>;

struct Property {
  std::string name;
  Check check;
};

std::string fail(const std::string& what, double got, double want) {
  std::ostringstream s;
  s.precision(12);
  s << what << ": got " << got << ", expected " << want;
  return s.str();
}

Vector random_vector(std::mt19937_64& rng, int len) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(len);
  for (int i = 0; i < len; ++i) v[i] = normal(rng);
  return v;
}

std::vector<Property> properties(bool inject_fault) {
  std::vector<Property> props;

  props.push_back({"dot-reformulation-equivalence", [inject_fault](int c, std::uint64_t seed) {
                     const int n = 3 + c % 3;
                     const OTInstance inst = gen_dot_instance(n, seed);
                     DccoProblem prob = reformulate_dot(inst);
                     if (inject_fault) prob.operators[0] = BlockOperator::dot_marginal(1, n);
                     const double direct = solve_ot_lp(inst).objective;
                     double dcco = 0.0;
                     try {
                       dcco = lp_solve(prob).objective;
                     } catch (const Error& e) {
                       return std::string("coupled LP failed: ") + e.what();
                     }
                     if (std::abs(dcco - direct) > 1e-8) return fail("objective", dcco, direct);
                     return std::string();
                   }});

  props.push_back({"deot-reformulation-equivalence", [](int c, std::uint64_t seed) {
                     const int n = 3 + c % 2;
                     const int big_n = 2 + (c / 2) % 2;
                     const Graph g = c % 4 < 2 ? path_graph(big_n) : complete_graph(big_n);
                     const EOTInstance inst = gen_deot_instance(n, big_n, seed);
                     const double direct = solve_eot_lp(inst).objective;
                     const double dcco = lp_solve(reformulate_deot(inst, g)).objective;
                     if (std::abs(dcco - direct) > 1e-8) return fail("objective", dcco, direct);
                     return std::string();
                   }});

  props.push_back({"operator-dense-agreement", [](int c, std::uint64_t seed) {
                     std::mt19937_64 rng(seed);
                     const int n = 2 + c % 4;
                     const int big_n = 2 + c % 3;
                     const EOTInstance inst = gen_deot_instance(n, big_n, seed);
                     std::vector<BlockOperator> ops;
                     for (const BlockOperator& op : reformulate_dot(gen_dot_instance(n, seed)).operators) {
                       ops.push_back(op);
                     }
                     for (const BlockOperator& op :
                          reformulate_deot(inst, random_connected_graph(big_n, 0.5, seed)).operators) {
                       ops.push_back(op);
                     }
                     for (const BlockOperator& op : ops) {
                       const Matrix dense = op.dense();
                       const Vector x = random_vector(rng, op.cols());
                       const Vector v = random_vector(rng, op.rows());
                       const double e1 = (op.apply(x) - dense * x).cwiseAbs().maxCoeff();
                       const double e2 =
                           (op.apply_transpose(v) - dense.transpose() * v).cwiseAbs().maxCoeff();
                       if (e1 > 1e-12 || e2 > 1e-12) return fail("max deviation", std::max(e1, e2), 0.0);
                     }
                     return std::string();
                   }});

  props.push_back({"equity-encoding", [](int c, std::uint64_t seed) {
                     std::mt19937_64 rng(seed);
                     const int n = 2 + c % 3;
                     const int big_n = 2 + c % 4;
                     const EOTInstance inst = gen_deot_instance(n, big_n, seed);
                     const DccoProblem prob =
                         reformulate_deot(inst, random_connected_graph(big_n, 0.5, seed));
                     std::uniform_real_distribution<double> unif(0.0, 1.0);
                     for (bool equal : {true, false}) {
                       std::vector<Vector> x;
                       for (int k = 0; k < big_n; ++k) {
                         Vector xk(n * n);
                         for (int j = 0; j < n * n; ++j) xk[j] = unif(rng);
                         if (equal) xk *= 1.0 / prob.costs[k].dot(xk);
                         x.push_back(xk);
                       }
                       const Vector r = prob.residual(x) + prob.rhs;
                       const double eq = r.tail(big_n - 1).cwiseAbs().maxCoeff();
                       if (equal && eq > 1e-10) return fail("equity rows", eq, 0.0);
                       if (!equal && eq <= 1e-10) return std::string("unequal costs gave zero equity rows");
                     }
                     return std::string();
                   }});

  props.push_back({"simplex-projection", [](int c, std::uint64_t seed) {
                     std::mt19937_64 rng(seed);
                     const Vector v = 2.0 * random_vector(rng, 1 + c % 12);
                     const double radius = 0.5 + (c % 5);
                     const Vector u = project_simplex(v, radius);
                     if (std::abs(u.sum() - radius) > 1e-12) return fail("sum", u.sum(), radius);
                     if (u.minCoeff() < 0.0) return fail("min entry", u.minCoeff(), 0.0);
                     // KKT: v - u is constant on the support and dominates v elsewhere.
                     double theta = 0.0;
                     for (Eigen::Index i = 0; i < u.size(); ++i) {
                       if (u[i] > 0.0) theta = v[i] - u[i];
                     }
                     for (Eigen::Index i = 0; i < u.size(); ++i) {
                       if (u[i] > 0.0 && std::abs(v[i] - u[i] - theta) > 1e-12) {
                         return std::string("support shift is not constant");
                       }
                       if (u[i] == 0.0 && v[i] > theta + 1e-12) {
                         return std::string("zeroed entry above the threshold");
                       }
                     }
                     return std::string();
                   }});

  props.push_back({"rounding", [](int c, std::uint64_t seed) {
                     std::mt19937_64 rng(seed);
                     const int n = 2 + c % 6;
                     const OTInstance inst = gen_dot_instance(n, seed);
                     std::uniform_real_distribution<double> unif(0.0, 2.0 / (n * n));
                     Matrix x(n, n);
                     for (int j = 0; j < n; ++j) {
                       for (int i = 0; i < n; ++i) x(i, j) = unif(rng);
                     }
                     const Matrix r = round_to_feasible(x, inst.p, inst.q);
                     const double row = (r.rowwise().sum() - inst.p).cwiseAbs().maxCoeff();
                     const double col = (r.colwise().sum().transpose() - inst.q).cwiseAbs().maxCoeff();
                     if (row > 1e-12 || col > 1e-12) return fail("marginal error", std::max(row, col), 0.0);
                     const double bound = 2.0 * ((x.rowwise().sum() - inst.p).lpNorm<1>() +
                                                 (x.colwise().sum().transpose() - inst.q).lpNorm<1>());
                     const double moved = (r - x).lpNorm<1>();
                     if (moved > bound + 1e-12) return fail("l1 change", moved, bound);
                     return std::string();
                   }});

  props.push_back({"lp-optimality", [](int c, std::uint64_t seed) {
                     std::mt19937_64 rng(seed);
                     const int n = 2 + c % 4;
                     const OTInstance inst = gen_dot_instance(n, seed);
                     const OtSolution sol = solve_ot_lp(inst);
                     const double row = (sol.plan.rowwise().sum() - inst.p).cwiseAbs().maxCoeff();
                     const double col =
                         (sol.plan.colwise().sum().transpose() - inst.q).cwiseAbs().maxCoeff();
                     if (row > 1e-9 || col > 1e-9 || sol.plan.minCoeff() < 0.0) {
                       return std::string("LP plan is not feasible");
                     }
                     std::uniform_real_distribution<double> unif(0.0, 1.0);
                     for (int t = 0; t < 100; ++t) {
                       Matrix x = inst.p * inst.q.transpose();
                       for (int j = 0; j < n; ++j) {
                         for (int i = 0; i < n; ++i) x(i, j) *= 2.0 * unif(rng);
                       }
                       const Matrix f = round_to_feasible(x, inst.p, inst.q);
                       const double cost = inst.cost.cwiseProduct(f).sum();
                       if (cost < sol.objective - 1e-9) return fail("random feasible cost", cost, sol.objective);
                     }
                     return std::string();
                   }});
  return props;
}

}  // namespace

int run_verify(const RunConfig& cfg, std::ostream& out) {
  if (cfg.verify_cases < 1) throw ParseError("verify needs at least one case");
  bool all_ok = true;
  for (const Property& prop : properties(cfg.inject_fault)) {
    std::string detail;
    int failed_case = -1;
    for (int c = 0; c < cfg.verify_cases && detail.empty(); ++c) {
      const std::uint64_t seed = cfg.instance_seed + static_cast<std::uint64_t>(c);
      try {
        detail = prop.check(c, seed);
      } catch (const Error& e) {
        detail = std::string("error: ") + e.what();
      }
      if (!detail.empty()) failed_case = c;
    }
    if (detail.empty()) {
      out << "PASS " << prop.name << " (" << cfg.verify_cases << " cases)\n";
    } else {
      all_ok = false;
      out << "FAIL " << prop.name << " case " << failed_case << ": " << detail << '\n';
    }
  }
  return all_ok ? 0 : kExitError;
}

}  // namespace decot::cli
