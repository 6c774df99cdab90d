#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace almlab {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Operand dimensions do not match.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A matrix required to be symmetric positive definite is not.
class NotSpdError : public Error {
 public:
  using Error::Error;
};

// Malformed user input (bad config values, schema violations, oracle bugs).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// An iterative scheme ran out of iterations; carries the best estimate so far.
class SpectralConvergenceError : public Error {
 public:
  SpectralConvergenceError(const std::string& msg, double best)
      : Error(msg), best_estimate(best) {}
  double best_estimate;
};

// Dykstra failed to settle, likely an empty intersection; carries the last iterate.
class DykstraError : public Error {
 public:
  DykstraError(const std::string& msg, std::vector<double> last)
      : Error(msg), last_iterate(std::move(last)) {}
  std::vector<double> last_iterate;
};

// A point required to be feasible is not.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace almlab
