#pragma once

#include <stdexcept>
#include <string>

namespace mlbie {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (e.g. Y_m at x <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Result not representable in double precision.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Kernel evaluated at (or too close to) its singular point.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Linear system too ill-conditioned to trust.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent problem description (sizes, radii ordering, odd grid sizes, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An iterative search stopped at its cap without meeting its target.
class CapReachedError : public Error {
 public:
  using Error::Error;
};

}  // namespace mlbie
