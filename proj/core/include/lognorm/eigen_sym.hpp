#pragma once

#include "lognorm/matrix.hpp"

namespace lognorm::linalg {

struct EigResult {
  Vector eigenvalues;    // sorted ascending
  std::size_t rotations = 0;
  double residual = 0.0;  // off-diagonal Frobenius mass at exit

  double max_eigenvalue() const { return eigenvalues.back(); }
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations with
/// threshold sweeps. Iterates until the off-diagonal Frobenius mass drops
/// below `tol` (at most `max_sweeps` full sweeps). Already-diagonal input
/// is returned without any rotation, so diagonal spectra are exact.
///
/// Input must satisfy ||S - S^T|| <= 1e-12 * ||S||; throws
/// std::invalid_argument otherwise and ConvergenceError on sweep exhaustion.
EigResult sym_eig_max(const Matrix& s, double tol = 1e-12,
                      std::size_t max_sweeps = 50);

}  // namespace lognorm::linalg
