#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace lognorm::linalg {

using Vector = std::vector<double>;

/// Dense real matrix, row-major, sized for small systems (n <= 16 is the
/// supported regime for the norm/eigen kernels; storage itself is unbounded).
/// Constructors taking entries reject NaN/Inf.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);  // zero-initialized
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_ && rows_ > 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  Matrix transpose() const;
  double frobenius_norm() const;
  bool all_finite() const;

  Vector apply(std::span<const double> x) const;  // A * x

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;

  void check_finite() const;
};

/// LU factorization with partial pivoting of a square matrix.
class LuFactor {
 public:
  explicit LuFactor(const Matrix& a);

  bool singular() const { return singular_; }
  double min_pivot() const { return min_pivot_; }
  double determinant() const;

  Vector solve(std::span<const double> b) const;
  Matrix solve(const Matrix& b) const;  // column-wise

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
  bool singular_ = false;
  double min_pivot_ = 0.0;
};

/// Lower Cholesky factor of a symmetric positive definite matrix.
/// Throws NotPositiveDefiniteError if a pivot is not strictly positive.
Matrix cholesky_lower(const Matrix& s);

/// Solve L * x = b (forward) or L^T * x = b (backward) for lower-triangular L.
Vector solve_lower(const Matrix& l, std::span<const double> b);
Vector solve_lower_transposed(const Matrix& l, std::span<const double> b);

// Small vector helpers shared across modules.
Vector vec_add(const Vector& a, const Vector& b);
Vector vec_sub(const Vector& a, const Vector& b);
Vector vec_scale(double s, const Vector& a);

}  // namespace lognorm::linalg
