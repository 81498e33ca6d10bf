#pragma once

#include <stdexcept>
#include <string>

namespace nctorus {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live over different noncommutative tori.
class ContextError : public Error {
 public:
  using Error::Error;
};

/// An argument violates a documented precondition (wrong size, out of range, not skew, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical computation is too ill-conditioned to return a trustworthy answer.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// Cohomology was requested for a connection with nonzero curvature.
class NonFlatError : public Error {
 public:
  using Error::Error;
};

/// Exact integer arithmetic left the representable range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace nctorus
