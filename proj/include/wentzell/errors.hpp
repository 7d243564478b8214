#pragma once

#include <stdexcept>
#include <string>

namespace wentzell {

/// Violated precondition on a caller-supplied argument.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A quantity requested outside the regime where it is defined
/// (e.g. the surface Weyl constant in one space dimension).
class NotDefined : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Linear solve, factorization or iteration that failed to deliver.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite state produced by time stepping.
class DivergenceError : public NumericFailure {
 public:
  DivergenceError(const std::string& what, double time)
      : NumericFailure(what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace wentzell
