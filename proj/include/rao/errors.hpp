#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rao {

// Root of every error the library throws. The CLI maps the subclasses onto
// exit codes: StructuralError/DomainError/DataError -> data error (3),
// everything numerical -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or symmetry violations of matrix inputs.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A scalar argument outside its admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed input files (CSV, scenario files, R0 files).
class DataError : public Error {
 public:
  using Error::Error;
};

// Base for failures of the numerics themselves.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Cholesky of a covariance/correlation matrix failed.
class FactorizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Zero-variance columns, kappa0 <= 0, and similar collapses of the data.
class DegeneracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A fitted quantity left its admissible set (e.g. equicorrelation outside
// (-1/(p-1), 1)).
class ValidityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Singular sample correlation matrix where a determinant is required.
class RankError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Fixed-point iteration hit max_iterations. Carries the per-iteration
// residuals so callers can see whether it was creeping or oscillating.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
      : NumericalError(what), trace_(std::move(trace)) {}

  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

}  // namespace rao
