#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blowup {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (log map beyond
/// the injectivity radius, delta >= 1 in a log branch, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A resource bound (quadrature budget, packing room) is too small.
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what, std::size_t minimal_budget = 0)
      : Error(what), minimal_budget_(minimal_budget) {}

  /// Smallest budget that would have succeeded, 0 when not applicable.
  std::size_t minimal_budget() const noexcept { return minimal_budget_; }

 private:
  std::size_t minimal_budget_;
};

/// Caller broke a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Inputs are inconsistent with each other (mismatched model kinds, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Degenerate input for which the requested object does not exist.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace blowup
