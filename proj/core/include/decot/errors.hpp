#ifndef DECOT_ERRORS_HPP_
#define DECOT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace decot {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidEdge : public Error {
 public:
  using Error::Error;
};

class DisconnectedGraph : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidInstance : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Inner subproblem solver hit its iteration cap. Usually means the step
// sizes or the inner tolerance are misconfigured.
class InnerNoConverge : public Error {
 public:
  using Error::Error;
};

class StepSizeViolation : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

class Unbounded : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

}  // namespace decot

#endif  // DECOT_ERRORS_HPP_
