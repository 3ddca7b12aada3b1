#pragma once

#include <stdexcept>
#include <string>

namespace icmaxent {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violated a documented domain (probability outside [0,1], non-finite input, bad index).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The model has no populated normalizer or is otherwise unusable.
class InvalidModelError : public Error {
 public:
  using Error::Error;
};

/// Problem size exceeds the dense-enumeration ceiling.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A conditioning event has zero probability (P(x) > 0 is required for every x).
class PositivityError : public Error {
 public:
  using Error::Error;
};

/// An interventional quantity was requested for a set that the structure does not license.
class IdentifiabilityError : public Error {
 public:
  using Error::Error;
};

/// The objective produced NaN.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// More than one single-variable constraint competes for the same variable's score.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

/// ROC requested with only one label class present.
class DegenerateLabelsError : public Error {
 public:
  using Error::Error;
};

/// An empirical average was requested for a configuration with no supporting rows.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace icmaxent
