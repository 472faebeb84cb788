#pragma once

#include <stdexcept>
#include <string>

namespace hpl {

/// Invalid argument: out-of-range coordinate, negative time, bad exponent.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested exact computation exceeds the enumeration cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A numerical routine failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ParameterError(what);
}

}  // namespace detail
}  // namespace hpl
