#pragma once

#include <stdexcept>
#include <string>

namespace rotnum {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix handed to the projective machinery is not in SL(2,R).
class InvalidMatrix : public Error {
 public:
  using Error::Error;
};

/// A numeric parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Lift continuation across a parameter grid could not be resolved.
class ContinuityFailure : public Error {
 public:
  ContinuityFailure(const std::string& what, double e_lo, double e_hi)
      : Error(what), e_lo_(e_lo), e_hi_(e_hi) {}
  double e_lo() const noexcept { return e_lo_; }
  double e_hi() const noexcept { return e_hi_; }

 private:
  double e_lo_;
  double e_hi_;
};

class NumericOverflow : public Error {
 public:
  using Error::Error;
};

/// Fiber maps are not monotone in the parameter at some sampled point.
class MonotonicityViolation : public Error {
 public:
  MonotonicityViolation(const std::string& what, double omega, double y, double e)
      : Error(what), omega_(omega), y_(y), e_(e) {}
  double omega() const noexcept { return omega_; }
  double y() const noexcept { return y_; }
  double energy() const noexcept { return e_; }

 private:
  double omega_;
  double y_;
  double e_;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Objects that must share structure (bases, grids) do not.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class InsufficientSignal : public Error {
 public:
  using Error::Error;
};

class RootFindingError : public Error {
 public:
  using Error::Error;
};

}  // namespace rotnum
