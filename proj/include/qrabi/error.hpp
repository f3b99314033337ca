#pragma once

#include <stdexcept>
#include <string>

namespace qrabi {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, grids or options supplied by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A cutoff-doubling sequence reached its ceiling without settling.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double coupling = 0.0)
      : Error(what), coupling_(coupling) {}
  double coupling() const noexcept { return coupling_; }

 private:
  double coupling_;
};

/// The requested point lies where the Hamiltonian is unbounded from below
/// (no quartic term and g2 beyond the collapse coupling).
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// The LAPACK eigensolver reported failure.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Ground state too close to degenerate for a finite-difference derivative.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// A sampled maximum sits on the edge of its grid.
class PeakAtEndpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace qrabi
