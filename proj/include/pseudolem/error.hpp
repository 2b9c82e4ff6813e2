#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pseudolem {

using Complex = std::complex<double>;

// Base of everything the library throws. CLI maps PreconditionError to exit
// code 2 and NumericalError to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

// Caller violated a documented precondition (bad input, degenerate geometry).
class PreconditionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precondition"; }
};

// A numerical procedure failed to meet its tolerance or iteration budget.
class NumericalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numerical"; }
};

class RootFindingError : public NumericalError {
 public:
  RootFindingError(const std::string& what, std::vector<Complex> best)
      : NumericalError(what), best_iterate(std::move(best)) {}
  std::vector<Complex> best_iterate;
};

// Tracing ran into (or too close to) a zero of f'.
class CriticalPointError : public NumericalError {
 public:
  CriticalPointError(const std::string& what, Complex where)
      : NumericalError(what), location(where) {}
  Complex location;
};

// A point is closer to a curve than the near-hit threshold allows.
class NearHitError : public PreconditionError {
 public:
  NearHitError(const std::string& what, double distance, Complex nearest)
      : PreconditionError(what), distance(distance), nearest(nearest) {}
  double distance;
  Complex nearest;
};

}  // namespace pseudolem
