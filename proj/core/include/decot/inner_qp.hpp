#ifndef DECOT_INNER_QP_HPP_
#define DECOT_INNER_QP_HPP_

#include "decot/block_operator.hpp"
#include "decot/types.hpp"

namespace decot {

enum class InnerMethod {
  kAuto,               // active set when tau = 0, projected gradient otherwise
  kProjectedGradient,  // fixed 1/L step, L from gram_spectral_bound
  kActiveSet,          // Lawson-Hanson on the least-squares form (tau = 0 only)
};

struct InnerOptions {
  InnerMethod method = InnerMethod::kAuto;
  int max_iters = 10000;
  double tol = 1e-10;
};

// One agent's local problem:
//
//   min  c^T x + (eta/2)|x|^2 + penalty |A x - target|^2
//        + (1/(2 tau)) |y - x + tau z|^2
//
// over x free and y >= 0 when tau > 0, or over x >= 0 (no y) when tau = 0.
struct LocalQp {
  const BlockOperator* op = nullptr;
  const Vector* cost = nullptr;
  double eta = 0.0;
  double penalty = 0.0;
  Vector target;
  double tau = 0.0;
  const Vector* z = nullptr;  // required when tau > 0

  double objective(const Vector& x, const Vector& y) const;
};

struct InnerResult {
  Vector x;
  Vector y;  // equals x when tau = 0
  int iterations = 0;
};

// Minimizes `qp` starting from (x0, y0). Throws InnerNoConverge when the
// iteration cap is hit before the stationarity measure drops below tol.
InnerResult solve_local_qp(const LocalQp& qp, const Vector& x0, const Vector& y0,
                           const InnerOptions& options);

// Lawson-Hanson nonnegative least squares with a warm start:
//   min (1/2)|B x - s|^2 + (eta/2)|x|^2,  x >= 0,  B = scale * op.
// The support of x0 seeds the passive set.
InnerResult solve_nnls(const BlockOperator& op, double scale, const Vector& s,
                       double eta, const Vector& x0, const InnerOptions& options);

}  // namespace decot

#endif  // DECOT_INNER_QP_HPP_
