#pragma once

#include <stdexcept>
#include <string>

namespace lawrisk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad parameters, malformed input).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A function value left the representable range of double.
class OutOfRange : public Error {
public:
  using Error::Error;
};

/// Adaptive quadrature failed to stabilize; the target integral is treated as infinite.
class Divergence : public Error {
public:
  using Error::Error;
};

/// A convergence experiment was refused because neither moment hypothesis holds.
class GateRefusal : public Error {
public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

} // namespace detail
} // namespace lawrisk
