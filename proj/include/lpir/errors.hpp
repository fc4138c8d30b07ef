#pragma once

#include <stdexcept>
#include <string>

namespace lpir {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A control outside U(x), or a policy of the wrong length.
class InvalidPolicy : public Error {
 public:
  using Error::Error;
};

/// H produced a non-finite value.
class ModelEvaluationError : public Error {
 public:
  using Error::Error;
};

/// Malformed model data (empty control set, bad probabilities, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// An argument outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A linear solve whose residual exceeded the accepted threshold.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure hit its iteration cap before its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A proven invariant was observed to fail. Signals a bug or a broken model.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// The regression design was rank deficient.
class FitError : public Error {
 public:
  using Error::Error;
};

/// The feedback-linearizing law hit cos(z) ~ 0.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// The greedy subproblem had an empty feasible set.
class ControlError : public Error {
 public:
  using Error::Error;
};

/// An artifact or input file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lpir
