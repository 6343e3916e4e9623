#ifndef DECOT_TYPES_HPP_
#define DECOT_TYPES_HPP_

#include <cstdint>

#include <Eigen/Core>

namespace decot {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Tally of scalar arithmetic operations. Used to check per-iteration cost
// claims; callers that do not care pass nullptr.
struct OpCounter {
  std::uint64_t ops = 0;
  void add(std::uint64_t n) { ops += n; }
};

inline void count_ops(OpCounter* counter, std::uint64_t n) {
  if (counter != nullptr) counter->add(n);
}

}  // namespace decot

#endif  // DECOT_TYPES_HPP_
