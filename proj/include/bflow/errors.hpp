#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bflow {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix expected to be hermitian (up to tolerance) is not.
class NotHermitian : public Error {
 public:
  using Error::Error;
};

/// Operands have incompatible dimensions.
class DimMismatch : public Error {
 public:
  using Error::Error;
};

/// Two tangent vectors do not share a base point (up to projective scale).
class BasePointMismatch : public Error {
 public:
  using Error::Error;
};

/// A coefficient matrix fails the conditioning gate for a section basis.
class BasisSingular : public Error {
 public:
  using Error::Error;
};

/// The quadrature self-check (grid doubling) moved the result by more than
/// the grid tolerance: the requested grid cannot certify the integral.
class QuadratureUnderResolved : public Error {
 public:
  using Error::Error;
};

/// Closed-form radial moment requested outside its convergence range.
class DivergentIntegral : public Error {
 public:
  using Error::Error;
};

/// Backtracking halvings were exhausted without a residual decrease
/// (quadrature noise floor reached, or the iterate sits at a critical point).
class LineSearchFailed : public Error {
 public:
  using Error::Error;
};

/// The balancing iteration hit its iteration cap. Carries the residual trace
/// accumulated so far so callers can inspect the convergence history.
class MaxIterExceeded : public Error {
 public:
  MaxIterExceeded(const std::string& what, std::vector<double> trace)
      : Error(what), residual_trace(std::move(trace)) {}
  std::vector<double> residual_trace;
};

/// The Gram matrix lost positive definiteness (numerical breakdown).
class GramNotPositive : public Error {
 public:
  using Error::Error;
};

/// The quadratic-form spectrum is degenerate where it should not be, or the
/// asserted kernel dimension does not match the measured one.
class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

/// Malformed user input (unreadable file, bad JSON shape, invalid flag data).
/// Maps to the CLI validation exit code.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace bflow
