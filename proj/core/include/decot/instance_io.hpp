#ifndef DECOT_INSTANCE_IO_HPP_
#define DECOT_INSTANCE_IO_HPP_

#include <iosfwd>
#include <string>
#include <variant>

#include "decot/problems.hpp"

namespace decot {

using Instance = std::variant<OTInstance, EOTInstance>;

// Self-describing text format. Example for a 2-point transport instance:
//
//   decot-instance 1
//   kind dot
//   n 2
//   N 1
//   p 0.5 0.5
//   q 0.5 0.5
//   cost 1
//   0 1
//   1 0
//
// Equitable instances use "kind deot" and carry N "cost k" blocks. Matrices
// are written row-major; every value uses 17 significant digits so a
// write/read round trip is exact.
void write_instance(std::ostream& out, const OTInstance& inst);
void write_instance(std::ostream& out, const EOTInstance& inst);
Instance read_instance(std::istream& in);

void save_instance(const std::string& path, const Instance& inst);
Instance load_instance(const std::string& path);

}  // namespace decot

#endif  // DECOT_INSTANCE_IO_HPP_
