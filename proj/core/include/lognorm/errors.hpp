#pragma once

#include <stdexcept>
#include <string>

namespace lognorm {

/// Base class for all numeric/domain failures raised by this library.
/// Precondition violations throw std::invalid_argument instead.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative scheme failed to reach its tolerance within its budget.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual(residual) {}
  double residual;
};

/// Raised when a Lyapunov solve has no positive definite solution,
/// i.e. the matrix is not Hurwitz (or has an eigenvalue pair summing to zero).
struct NotHurwitzError : Error {
  explicit NotHurwitzError(const std::string& what) : Error(what) {}
};

struct NotPositiveDefiniteError : Error {
  explicit NotPositiveDefiniteError(const std::string& what) : Error(what) {}
};

}  // namespace lognorm
