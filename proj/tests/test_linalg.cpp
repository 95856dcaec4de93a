#include <doctest.h>

#include <cmath>
#include <random>

#include "lognorm/errors.hpp"
#include "lognorm/eigen_sym.hpp"
#include "lognorm/lyapunov.hpp"
#include "lognorm/matrix.hpp"
#include "lognorm/norms.hpp"

using lognorm::ConvergenceError;
using lognorm::NotHurwitzError;
using lognorm::linalg::Matrix;
using lognorm::linalg::NormKind;
using lognorm::linalg::Vector;
using lognorm::linalg::log_norm;
using lognorm::linalg::log_norm_limit;
using lognorm::linalg::lyapunov_solve;
using lognorm::linalg::mat_induced_norm;
using lognorm::linalg::mu_weighted_hurwitz;
using lognorm::linalg::sym_eig_max;
using lognorm::linalg::vec_norm;

namespace {

const Matrix kA1{{-11, 10}, {2, -3}};
const Matrix kA2{{-11, 2}, {10, -3}};
const Matrix kA3{{-1, 3}, {-3, -2}};

constexpr double kTol = 1e-9;

Matrix random_matrix(std::mt19937_64& rng, std::size_t n, double lo = -10.0,
                     double hi = 10.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = dist(rng);
  return a;
}

Vector random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  Vector x(n);
  for (double& v : x) v = dist(rng);
  return x;
}

// Oracle: eigenvalue real-part maximum of a 2x2 matrix by the quadratic
// formula (independent of the Jacobi path).
double spectral_abscissa_2x2(const Matrix& a) {
  const double tr = a(0, 0) + a(1, 1);
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const double disc = tr * tr - 4.0 * det;
  if (disc < 0.0) return 0.5 * tr;
  return 0.5 * (tr + std::sqrt(disc));
}

const std::array<NormKind, 3> kKinds = {NormKind::one(), NormKind::two(),
                                        NormKind::inf()};

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("vector norms on pinned values") {
  const Vector a{3, 4};
  CHECK(vec_norm(a, NormKind::two()) == doctest::Approx(5.0).epsilon(1e-15));
  const Vector b{1, -2, 3};
  CHECK(vec_norm(b, NormKind::one()) == 6.0);
  CHECK(vec_norm(b, NormKind::inf()) == 3.0);
  CHECK(vec_norm(Vector{0, 0, 0}, NormKind::two()) == 0.0);
}

TEST_CASE("vector norm rejects bad input") {
  CHECK_THROWS_AS(vec_norm(Vector{}, NormKind::one()), std::invalid_argument);
  CHECK_THROWS_AS(vec_norm(Vector{std::nan("")}, NormKind::one()),
                  std::invalid_argument);
  const NormKind weighted = NormKind::weighted(Matrix::identity(2));
  CHECK_THROWS_AS(vec_norm(Vector{1, 2, 3}, weighted), std::invalid_argument);
}

TEST_CASE("induced norms on pinned values") {
  const Matrix eye = Matrix::identity(2);
  for (const auto& kind : kKinds)
    CHECK(mat_induced_norm(eye, kind) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mat_induced_norm(eye, NormKind::weighted(Matrix{{2, 0}, {0, 5}})) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // max(11 + 2, 10 + 3) by the column-sum formula
  CHECK(mat_induced_norm(kA1, NormKind::one()) == 13.0);

  const Matrix d = Matrix::diagonal(Vector{3, -5});
  CHECK(std::abs(mat_induced_norm(d, NormKind::two()) - 5.0) < kTol);
}

TEST_CASE("log norms match the worked 2x2 values") {
  // mu_1, mu_2, mu_inf of A1, A2, A3; the 0.2111 reference values are
  // quoted to four digits, hence the 5e-5 window.
  CHECK(log_norm(kA1, NormKind::one()) == 7.0);
  CHECK(std::abs(log_norm(kA1, NormKind::two()) - 0.2111) < 5e-5);
  CHECK(log_norm(kA1, NormKind::inf()) == -1.0);

  CHECK(log_norm(kA2, NormKind::one()) == -1.0);
  CHECK(std::abs(log_norm(kA2, NormKind::two()) - 0.2111) < 5e-5);
  CHECK(log_norm(kA2, NormKind::inf()) == 7.0);

  CHECK(log_norm(kA3, NormKind::one()) == 2.0);
  CHECK(std::abs(log_norm(kA3, NormKind::two()) - (-1.0)) < kTol);
  CHECK(log_norm(kA3, NormKind::inf()) == 2.0);

  const Matrix zero(2, 2);
  for (const auto& kind : kKinds) CHECK(log_norm(zero, kind) == 0.0);
}

TEST_CASE("limit definition agrees with the closed forms") {
  const Vector schedule{1e-2, 1e-3, 1e-4};

  auto lim = log_norm_limit(kA1, NormKind::inf(), schedule);
  CHECK(std::abs(lim.value - (-1.0)) < 1e-6);

  lim = log_norm_limit(kA3, NormKind::two(), schedule);
  CHECK(std::abs(lim.value - (-1.0)) < 1e-5);

  // ||I + h I|| = 1 + h exactly, any schedule
  lim = log_norm_limit(Matrix::identity(2), NormKind::two(), Vector{0.5, 0.25, 0.125});
  CHECK(std::abs(lim.value - 1.0) < 1e-12);

  CHECK_THROWS_AS(log_norm_limit(kA1, NormKind::one(), Vector{1e-3, 1e-2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(log_norm_limit(kA1, NormKind::one(), Vector{0.0}),
                  std::invalid_argument);
}

TEST_CASE("symmetric eigensolver: pinned spectra") {
  auto r = sym_eig_max(Matrix::diagonal(Vector{1, 5, -2}));
  CHECK(r.max_eigenvalue() == 5.0);
  CHECK(r.rotations == 0);  // already diagonal, no sweep needed
  CHECK(r.eigenvalues == Vector{-2, 1, 5});

  // 2x2 quadratic-formula oracle: mean +- sqrt(((a-d)/2)^2 + b^2)
  const Matrix s{{-11, 6}, {6, -3}};
  const double expected = -7.0 + std::sqrt(52.0);
  r = sym_eig_max(s);
  CHECK(std::abs(r.max_eigenvalue() - expected) < 1e-12);
  CHECK(std::abs(expected - 0.21110) < 5e-6);
  CHECK(r.residual <= 1e-12);

  r = sym_eig_max(Matrix{{0, 1}, {1, 0}});
  CHECK(std::abs(r.max_eigenvalue() - 1.0) < 1e-12);

  CHECK_THROWS_AS(sym_eig_max(Matrix{{0, 1}, {2, 0}}), std::invalid_argument);
}

TEST_CASE("symmetric eigensolver vs 2x2 oracle on random input") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix s = random_matrix(rng, 2);
    s(1, 0) = s(0, 1);
    const double mean = 0.5 * (s(0, 0) + s(1, 1));
    const double rad =
        std::sqrt(0.25 * (s(0, 0) - s(1, 1)) * (s(0, 0) - s(1, 1)) + s(0, 1) * s(0, 1));
    const auto r = sym_eig_max(s);
    CHECK(std::abs(r.eigenvalues[0] - (mean - rad)) < 1e-10);
    CHECK(std::abs(r.eigenvalues[1] - (mean + rad)) < 1e-10);
  }
}

TEST_CASE("lyapunov solve: pinned cases") {
  const Matrix h = lyapunov_solve(-1.0 * Matrix::identity(2));
  CHECK(std::abs(h(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(h(1, 1) - 1.0) < 1e-12);
  CHECK(std::abs(h(0, 1)) < 1e-12);

  CHECK_THROWS_AS(lyapunov_solve(Matrix::identity(2)), NotHurwitzError);
}

TEST_CASE("lyapunov solve vs independent dense oracle") {
  // Oracle: assemble the 4x4 Kronecker system by hand and run a local
  // Gauss-Jordan elimination, then check positive definiteness via the
  // 2x2 leading-minor signs. None of this touches the library LU path.
  const Matrix a{{0, 1}, {-2, -3}};
  double sys[4][5] = {};  // [row][col], col 4 = rhs of A^T H + H A = -2 I
  // unknowns ordered h11, h12(=h21), h22
  // row for (i,j) of A^T H + H A
  const double at[2][2] = {{a(0, 0), a(1, 0)}, {a(0, 1), a(1, 1)}};
  // (A^T H)_{ij} = sum_k at[i][k] h[k][j], (H A)_{ij} = sum_k h[i][k] a[k][j]
  auto hindex = [](int i, int j) { return (i == 0 && j == 0) ? 0 : (i == 1 && j == 1) ? 2 : 1; };
  int row = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j, ++row) {
      for (int k = 0; k < 2; ++k) {
        sys[row][hindex(k, j)] += at[i][k];
        sys[row][hindex(i, k)] += a(k, j);
      }
      sys[row][4] = (i == j) ? -2.0 : 0.0;
    }
  // 3 equations, 3 unknowns; eliminate
  for (int c = 0; c < 3; ++c) {
    int p = c;
    for (int r2 = c + 1; r2 < 3; ++r2)
      if (std::abs(sys[r2][c]) > std::abs(sys[p][c])) p = r2;
    for (int k = 0; k < 5; ++k) std::swap(sys[c][k], sys[p][k]);
    for (int r2 = 0; r2 < 3; ++r2) {
      if (r2 == c) continue;
      const double f = sys[r2][c] / sys[c][c];
      for (int k = 0; k < 5; ++k) sys[r2][k] -= f * sys[c][k];
    }
  }
  const double h11 = sys[0][4] / sys[0][0];
  const double h12 = sys[1][4] / sys[1][1];
  const double h22 = sys[2][4] / sys[2][2];
  REQUIRE(h11 > 0.0);
  REQUIRE(h11 * h22 - h12 * h12 > 0.0);

  const Matrix h = lyapunov_solve(a);
  CHECK(std::abs(h(0, 0) - h11) < 1e-12);
  CHECK(std::abs(h(0, 1) - h12) < 1e-12);
  CHECK(std::abs(h(1, 1) - h22) < 1e-12);

  const Matrix residual =
      a.transpose() * h + h * a + 2.0 * Matrix::identity(2);
  CHECK(residual.frobenius_norm() <= 1e-10 * 2);
}

TEST_CASE("weighted log norm of a Hurwitz matrix") {
  CHECK(std::abs(mu_weighted_hurwitz(-1.0 * Matrix::identity(2)) - (-1.0)) < 1e-12);

  // dual-route check: -1/lambda_max(H) against the generalized-pencil path
  for (const Matrix& a : {kA3, kA1}) {
    const double direct = mu_weighted_hurwitz(a);
    const Matrix h = lyapunov_solve(a);
    const double via_norm = log_norm(a, NormKind::weighted(h));
    CHECK(direct < 0.0);
    CHECK(std::abs(direct - via_norm) < 1e-9);
  }
  // A1 has mu_2 > 0 yet a negative weighted log norm
  CHECK(log_norm(kA1, NormKind::two()) > 0.0);
}

TEST_CASE("property: -||A|| <= mu[A] <= ||A||") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> dim(2, 6);
  for (int trial = 0; trial < 1000; ++trial) {
    const Matrix a = random_matrix(rng, dim(rng));
    for (const auto& kind : kKinds) {
      const double norm = mat_induced_norm(a, kind);
      const double mu = log_norm(a, kind);
      CHECK(mu <= norm + kTol);
      CHECK(mu >= -norm - kTol);
    }
  }
}

TEST_CASE("property: spectral abscissa <= mu[A]") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 400; ++trial) {
    const Matrix a = random_matrix(rng, 2);
    const double abscissa = spectral_abscissa_2x2(a);
    for (const auto& kind : kKinds) CHECK(abscissa <= log_norm(a, kind) + kTol);
  }
  std::uniform_int_distribution<std::size_t> dim(2, 6);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix s = random_matrix(rng, dim(rng));
    s += s.transpose();
    s *= 0.5;
    const double abscissa = sym_eig_max(s).max_eigenvalue();
    for (const auto& kind : kKinds) CHECK(abscissa <= log_norm(s, kind) + kTol);
  }
}

TEST_CASE("property: |mu[A] - mu[B]| <= ||A - B||") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> dim(2, 6);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = dim(rng);
    const Matrix a = random_matrix(rng, n);
    const Matrix b = random_matrix(rng, n);
    for (const auto& kind : kKinds) {
      const double lhs = std::abs(log_norm(a, kind) - log_norm(b, kind));
      CHECK(lhs <= mat_induced_norm(a - b, kind) + kTol);
    }
  }
}

TEST_CASE("property: closed form within the limit's error bound") {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<std::size_t> dim(2, 5);
  const Vector schedule{1e-2, 1e-3, 1e-4};
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix a = random_matrix(rng, dim(rng), -3.0, 3.0);
    for (const auto& kind : kKinds) {
      const auto lim = log_norm_limit(a, kind, schedule);
      CHECK(std::abs(log_norm(a, kind) - lim.value) <= lim.error_bound + kTol);
    }
  }
}

TEST_CASE("property: norm equivalence chain") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::size_t> dim(1, 8);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = dim(rng);
    const Vector x = random_vector(rng, n);
    const double n1 = vec_norm(x, NormKind::one());
    const double n2 = vec_norm(x, NormKind::two());
    const double ninf = vec_norm(x, NormKind::inf());
    const double root_n = std::sqrt(static_cast<double>(n));
    CHECK(ninf <= n2 + 1e-12);
    CHECK(n2 <= n1 + 1e-12);
    CHECK(n1 <= root_n * n2 + 1e-12);
    CHECK(root_n * n2 <= static_cast<double>(n) * ninf + 1e-12);
  }
}

TEST_CASE("property: norm axioms (homogeneity, triangle)") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> scale(-5.0, 5.0);
  const NormKind weighted = NormKind::weighted(Matrix{{4, 1}, {1, 3}});
  for (int trial = 0; trial < 300; ++trial) {
    const Vector x = random_vector(rng, 2);
    const Vector y = random_vector(rng, 2);
    const double c = scale(rng);
    std::array<NormKind, 4> kinds = {NormKind::one(), NormKind::two(),
                                     NormKind::inf(), weighted};
    for (const auto& kind : kinds) {
      CHECK(std::abs(vec_norm(lognorm::linalg::vec_scale(c, x), kind) - std::abs(c) * vec_norm(x, kind)) < kTol);
      CHECK(vec_norm(lognorm::linalg::vec_add(x, y), kind) <= vec_norm(x, kind) + vec_norm(y, kind) + kTol);
    }
  }
}

TEST_CASE("property: weighted identity for random Hurwitz matrices") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> dim(2, 6);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  int built = 0;
  while (built < 100) {
    const std::size_t n = dim(rng);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = entry(rng);
    // shift the diagonal until each row is strictly dominant and negative
    for (std::size_t i = 0; i < n; ++i) {
      double off = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) off += std::abs(a(i, j));
      a(i, i) = -(off + 1.0 + std::abs(a(i, i)));
    }
    Matrix h(1, 1);
    CHECK_NOTHROW(h = lyapunov_solve(a));  // Hurwitz by construction
    const double direct = mu_weighted_hurwitz(a);
    const double via_norm = log_norm(a, NormKind::weighted(h));
    CHECK(std::abs(direct - via_norm) < 1e-8);
    CHECK(direct < 0.0);
    ++built;
  }
}

TEST_CASE("weighted norm kind validation") {
  CHECK_THROWS_AS(NormKind::weighted(Matrix{{1, 2}, {0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(NormKind::weighted(Matrix{{-1, 0}, {0, 1}}),
                  lognorm::NotPositiveDefiniteError);
}

}  // TEST_SUITE
