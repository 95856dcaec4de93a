#pragma once

#include "lognorm/matrix.hpp"

namespace lognorm::linalg {

/// Solve A^T H + H A = -2 I for the symmetric positive definite H that
/// exists exactly when A is Hurwitz. Solved densely over the n^2
/// vectorized unknown; the residual is kept below 1e-10 * n (Frobenius).
/// Throws NotHurwitzError when the system is singular or H fails the
/// Cholesky test.
Matrix lyapunov_solve(const Matrix& a);

/// Logarithmic norm of a Hurwitz A in the norm weighted by its Lyapunov
/// solution H: -1 / lambda_max(H). Always negative; agrees with
/// log_norm(A, NormKind::weighted(H)) to within 1e-9.
double mu_weighted_hurwitz(const Matrix& a);

}  // namespace lognorm::linalg
