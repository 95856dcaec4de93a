#include "lognorm/eigen_sym.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lognorm/errors.hpp"

namespace lognorm::linalg {

namespace {

double off_diagonal_mass(const Matrix& a) {
  double s = 0.0;
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigResult sym_eig_max(const Matrix& s, double tol, std::size_t max_sweeps) {
  if (!s.square()) throw std::invalid_argument("sym_eig_max: matrix must be square");
  if (!(tol > 0.0)) throw std::invalid_argument("sym_eig_max: tol must be positive");

  const std::size_t n = s.rows();
  const double scale = s.frobenius_norm();
  {
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        asym = std::max(asym, std::abs(s(i, j) - s(j, i)));
    if (asym > 1e-12 * std::max(1.0, scale))
      throw std::invalid_argument("sym_eig_max: matrix is not symmetric");
  }

  Matrix a = s;
  // Enforce exact symmetry so the rotation updates stay consistent.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }

  EigResult result;
  double off = off_diagonal_mass(a);
  std::size_t sweep = 0;
  // Rotations below this size cannot move the off-diagonal mass above the
  // floating floor; skipping them avoids endless denormal churn.
  const double rotation_floor = 1e-300;

  while (off > tol && sweep < max_sweeps) {
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= rotation_floor) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        const double tau = sn / (1.0 + c);

        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = arp - sn * (arq + tau * arp);
          a(p, r) = a(r, p);
          a(r, q) = arq + sn * (arp - tau * arq);
          a(q, r) = a(r, q);
        }
        ++result.rotations;
      }
    }
    off = off_diagonal_mass(a);
  }

  result.residual = off;
  if (off > tol)
    throw ConvergenceError("sym_eig_max: Jacobi sweeps exhausted, residual " +
                               std::to_string(off),
                           off);

  result.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.eigenvalues[i] = a(i, i);
  std::sort(result.eigenvalues.begin(), result.eigenvalues.end());
  return result;
}

}  // namespace lognorm::linalg
