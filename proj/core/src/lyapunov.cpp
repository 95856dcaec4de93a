#include "lognorm/lyapunov.hpp"

#include <cmath>
#include <stdexcept>

#include "lognorm/eigen_sym.hpp"
#include "lognorm/errors.hpp"

namespace lognorm::linalg {

Matrix lyapunov_solve(const Matrix& a) {
  if (!a.square()) throw std::invalid_argument("lyapunov_solve: matrix must be square");
  const std::size_t n = a.rows();

  // Column-stacked vectorization: (I (x) A^T + A^T (x) I) vec(H) = vec(-2I).
  const Matrix at = a.transpose();
  Matrix sys(n * n, n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t row = j * n + i;
      for (std::size_t k = 0; k < n; ++k) {
        sys(row, j * n + k) += at(i, k);   // I (x) A^T
        sys(row, k * n + i) += at(j, k);   // A^T (x) I
      }
    }

  Vector rhs(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) rhs[i * n + i] = -2.0;

  LuFactor lu(sys);
  if (lu.singular())
    throw NotHurwitzError(
        "lyapunov_solve: singular Lyapunov operator (eigenvalue pair sums to zero)");
  const Vector h_vec = lu.solve(rhs);

  Matrix h(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) h(i, j) = h_vec[j * n + i];
  // The solution is symmetric by uniqueness; symmetrize away roundoff.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (h(i, j) + h(j, i));
      h(i, j) = v;
      h(j, i) = v;
    }

  Matrix residual = at * h + h * Matrix(a) + 2.0 * Matrix::identity(n);
  if (residual.frobenius_norm() > 1e-10 * static_cast<double>(n))
    throw Error("lyapunov_solve: residual exceeds tolerance");

  try {
    cholesky_lower(h);
  } catch (const NotPositiveDefiniteError&) {
    throw NotHurwitzError("lyapunov_solve: solution is not positive definite (A not Hurwitz)");
  }
  return h;
}

double mu_weighted_hurwitz(const Matrix& a) {
  const Matrix h = lyapunov_solve(a);
  const double lam = sym_eig_max(h).max_eigenvalue();
  return -1.0 / lam;
}

}  // namespace lognorm::linalg
