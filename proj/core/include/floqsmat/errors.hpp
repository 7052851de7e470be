#pragma once

#include <stdexcept>
#include <string>

namespace floqsmat {

// Base of every error raised by the library. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

// Adaptive integrator could not make progress; time() is where it stalled.
class StiffnessError : public Error {
 public:
  StiffnessError(const std::string& what, double t) : Error(what), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

// Monodromy matrix not diagonalizable to working precision (exceptional point).
class DegenerateFloquetError : public Error {
 public:
  using Error::Error;
};

// A Floquet multiplier with |mu| > 1: the effective generator is not passive.
class PassivityViolationError : public Error {
 public:
  using Error::Error;
};

class InsufficientHarmonicsError : public Error {
 public:
  using Error::Error;
};

class ResolventSingularError : public Error {
 public:
  using Error::Error;
};

class DerivativeUnavailableError : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature did not reach its tolerance; estimate() is the best value found.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double estimate, double error)
      : Error(what), estimate_(estimate), error_(error) {}
  double estimate() const noexcept { return estimate_; }
  double error() const noexcept { return error_; }

 private:
  double estimate_;
  double error_;
};

// Time-domain window too short for the transients to die out.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double bound) : Error(what), bound_(bound) {}
  double bound() const noexcept { return bound_; }

 private:
  double bound_;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace floqsmat
