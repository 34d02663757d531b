#pragma once

#include <stdexcept>
#include <string>

namespace permorb {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite entries, malformed values, out-of-range parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Shapes of the operands do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive enumeration would exceed the configured budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A construction cannot be carried out for the given input.
class ConstructionImpossible : public Error {
 public:
  using Error::Error;
};

/// The hypothesis of a bound does not hold, so the bound says nothing.
class Inapplicable : public Error {
 public:
  using Error::Error;
};

/// The direction matrix is not in the form an algorithm requires.
class UnsupportedForm : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace permorb
