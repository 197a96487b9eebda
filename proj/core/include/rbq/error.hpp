#pragma once

#include <stdexcept>
#include <string>

namespace rbq {

// Base of everything the library throws. Subclasses let callers (notably the
// CLI) map failures onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (negative s,
// probability vector that does not sum to one, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// D-operator applied to a transform with F*(lambda) == 1.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Inverse D-operator with gamma outside (0, inf).
class InvalidDensityError : public Error {
 public:
  using Error::Error;
};

class InstabilityError : public Error {
 public:
  using Error::Error;
};

// Solver or quadrature failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Tail ratio >= 1 or truncated mass too large to normalize.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace rbq
