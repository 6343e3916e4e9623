#ifndef DECOT_METRICS_HPP_
#define DECOT_METRICS_HPP_

namespace decot {

// Approximation quality of a candidate plan: optimality gap, marginal
// violation and (equitable problems only) equity violation.
struct Metrics {
  double obj_gap = 0.0;
  double feas_viol = 0.0;
  double equity_viol = 0.0;

  double total() const { return obj_gap + feas_viol + equity_viol; }
};

}  // namespace decot

#endif  // DECOT_METRICS_HPP_
