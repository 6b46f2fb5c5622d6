#pragma once

#include <stdexcept>
#include <string>

namespace lvr {

// Precondition violated by the caller (bad p, N, index, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numeric routine could not deliver its contract: non-convergence,
// branch-cut proximity, singular systems, quadrature failure.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Enumeration or dimension ceiling exceeded.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace lvr
