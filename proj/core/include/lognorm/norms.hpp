#pragma once

#include <memory>
#include <span>
#include <string>

#include "lognorm/matrix.hpp"

namespace lognorm::linalg {

enum class NormFamily { One, Two, Inf, Weighted };

/// Selects a vector norm (and with it the induced matrix norm and the
/// logarithmic norm): l1, l2, l-infinity, or the H-weighted norm
/// sqrt(x^T H x) for a symmetric positive definite H.
class NormKind {
 public:
  static NormKind one() { return NormKind(NormFamily::One); }
  static NormKind two() { return NormKind(NormFamily::Two); }
  static NormKind inf() { return NormKind(NormFamily::Inf); }

  /// H must be symmetric within 1e-12 (relative) and positive definite;
  /// validated here, with the Cholesky factor cached for reuse.
  static NormKind weighted(const Matrix& h);

  /// Parse "1" | "2" | "inf". Weighted kinds are built programmatically.
  static NormKind parse(const std::string& label);

  NormFamily family() const { return family_; }
  const Matrix& weight() const;
  const Matrix& weight_cholesky() const;  // lower factor L, H = L L^T
  std::string label() const;

 private:
  explicit NormKind(NormFamily f) : family_(f) {}
  NormFamily family_;
  std::shared_ptr<const Matrix> weight_;
  std::shared_ptr<const Matrix> chol_;
};

/// Vector norm per `kind`; zero iff x == 0. Rejects NaN entries and
/// weighted-norm dimension mismatches.
double vec_norm(std::span<const double> x, const NormKind& kind);

/// Induced matrix norm: max column-abs-sum / sqrt(lambda_max(A^T A)) /
/// max row-abs-sum; weighted case is || L^T A L^-T ||_2.
double mat_induced_norm(const Matrix& a, const NormKind& kind);

/// Logarithmic norm mu[A], closed-form per kind:
///   one:  max_j ( a_jj + sum_{i!=j} |a_ij| )
///   two:  1/2 lambda_max(A + A^T)
///   inf:  max_i ( a_ii + sum_{j!=i} |a_ij| )
///   weighted: mu_2 of L^T A L^-T (generalized-pencil reduction via Cholesky)
/// May be negative.
double log_norm(const Matrix& a, const NormKind& kind);

struct LimitEstimate {
  double value;        // extrapolated limit of (||I + hA|| - 1) / h
  double error_bound;  // extrapolation delta plus a roundoff allowance
};

/// Classical difference-quotient definition of the logarithmic norm,
/// evaluated on a strictly decreasing positive step schedule and
/// extrapolated to h -> 0 by a Neville (Richardson-style) tableau.
LimitEstimate log_norm_limit(const Matrix& a, const NormKind& kind,
                             std::span<const double> h_schedule);

}  // namespace lognorm::linalg
