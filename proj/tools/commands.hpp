#ifndef DECOT_TOOLS_COMMANDS_HPP_
#define DECOT_TOOLS_COMMANDS_HPP_

#include <iosfwd>

#include "run_config.hpp"

namespace decot::cli {

inline constexpr int kExitReached = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitMaxIters = 2;

inline constexpr const char* kCsvHeader =
    "iter,objective,obj_gap,feas_viol,equity_viol,xy_gap,messages_sent,wall_ms";

// Generates (or loads) the instance named by cfg.problem, runs the solver and
// streams the CSV log to cfg.output (or `out` when empty). The last line on
// `out` is a '#'-prefixed summary. Returns kExitReached or kExitMaxIters;
// library errors propagate.
int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Reformulation, operator and oracle property checks at n <= 5. Prints one
// PASS/FAIL line per property. cfg.inject_fault swaps one agent's marginal
// block for a wrong one before the equivalence check.
int run_verify(const RunConfig& cfg, std::ostream& out);

// Writes a generated instance to cfg.output.
int run_gen(const RunConfig& cfg, std::ostream& out);

}  // namespace decot::cli

#endif  // DECOT_TOOLS_COMMANDS_HPP_
