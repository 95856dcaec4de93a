#include "lognorm/norms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lognorm/eigen_sym.hpp"
#include "lognorm/errors.hpp"

namespace lognorm::linalg {

namespace {

// L^T A L^-T where H = L L^T: the l2-isometric image of A under the
// H-inner-product, so weighted norms reduce to plain l2 quantities.
Matrix weighted_similarity(const Matrix& a, const NormKind& kind) {
  const Matrix& l = kind.weight_cholesky();
  const std::size_t n = a.rows();
  if (n != l.rows())
    throw std::invalid_argument("weighted norm: dimension mismatch");
  // Y = A L^-T, solved column-wise from L^T acting on rows: Y^T = L^-1 A^T.
  const Matrix at = a.transpose();
  Matrix yt(n, n);
  Vector col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = at(i, j);
    Vector sol = solve_lower(l, col);
    for (std::size_t i = 0; i < n; ++i) yt(i, j) = sol[i];
  }
  return l.transpose() * yt.transpose();
}

double spectral_norm(const Matrix& a) {
  const Matrix gram = a.transpose() * a;
  const double lam = sym_eig_max(gram).max_eigenvalue();
  return std::sqrt(std::max(lam, 0.0));
}

double log_norm_two(const Matrix& a) {
  Matrix s = a + a.transpose();
  return 0.5 * sym_eig_max(s).max_eigenvalue();
}

void require_square_finite(const Matrix& a, const char* who) {
  if (!a.square()) throw std::invalid_argument(std::string(who) + ": matrix must be square");
  if (!a.all_finite()) throw std::invalid_argument(std::string(who) + ": non-finite entry");
}

}  // namespace

NormKind NormKind::weighted(const Matrix& h) {
  if (!h.square()) throw std::invalid_argument("NormKind::weighted: H must be square");
  const double scale = std::max(1.0, h.frobenius_norm());
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = i + 1; j < h.cols(); ++j)
      if (std::abs(h(i, j) - h(j, i)) > 1e-12 * scale)
        throw std::invalid_argument("NormKind::weighted: H must be symmetric");
  NormKind k(NormFamily::Weighted);
  k.weight_ = std::make_shared<Matrix>(h);
  k.chol_ = std::make_shared<Matrix>(cholesky_lower(h));  // throws if not PD
  return k;
}

NormKind NormKind::parse(const std::string& label) {
  if (label == "1" || label == "one") return one();
  if (label == "2" || label == "two") return two();
  if (label == "inf" || label == "infinity") return inf();
  throw std::invalid_argument("NormKind::parse: unknown norm kind '" + label + "'");
}

const Matrix& NormKind::weight() const {
  if (!weight_) throw std::logic_error("NormKind::weight: not a weighted kind");
  return *weight_;
}

const Matrix& NormKind::weight_cholesky() const {
  if (!chol_) throw std::logic_error("NormKind::weight_cholesky: not a weighted kind");
  return *chol_;
}

std::string NormKind::label() const {
  switch (family_) {
    case NormFamily::One: return "1";
    case NormFamily::Two: return "2";
    case NormFamily::Inf: return "inf";
    case NormFamily::Weighted: return "H";
  }
  return "?";
}

double vec_norm(std::span<const double> x, const NormKind& kind) {
  if (x.empty()) throw std::invalid_argument("vec_norm: empty vector");
  for (double v : x)
    if (std::isnan(v)) throw std::invalid_argument("vec_norm: NaN entry");

  switch (kind.family()) {
    case NormFamily::One: {
      double s = 0.0;
      for (double v : x) s += std::abs(v);
      return s;
    }
    case NormFamily::Two: {
      double s = 0.0;
      for (double v : x) s += v * v;
      return std::sqrt(s);
    }
    case NormFamily::Inf: {
      double m = 0.0;
      for (double v : x) m = std::max(m, std::abs(v));
      return m;
    }
    case NormFamily::Weighted: {
      const Matrix& l = kind.weight_cholesky();
      if (x.size() != l.rows())
        throw std::invalid_argument("vec_norm: weighted dimension mismatch");
      // ||x||_H = || L^T x ||_2
      double s = 0.0;
      for (std::size_t j = 0; j < l.cols(); ++j) {
        double acc = 0.0;
        for (std::size_t i = j; i < l.rows(); ++i) acc += l(i, j) * x[i];
        s += acc * acc;
      }
      return std::sqrt(s);
    }
  }
  return 0.0;
}

double mat_induced_norm(const Matrix& a, const NormKind& kind) {
  require_square_finite(a, "mat_induced_norm");
  const std::size_t n = a.rows();
  switch (kind.family()) {
    case NormFamily::One: {
      double m = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::abs(a(i, j));
        m = std::max(m, s);
      }
      return m;
    }
    case NormFamily::Two:
      return spectral_norm(a);
    case NormFamily::Inf: {
      double m = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += std::abs(a(i, j));
        m = std::max(m, s);
      }
      return m;
    }
    case NormFamily::Weighted:
      return spectral_norm(weighted_similarity(a, kind));
  }
  return 0.0;
}

double log_norm(const Matrix& a, const NormKind& kind) {
  require_square_finite(a, "log_norm");
  const std::size_t n = a.rows();
  switch (kind.family()) {
    case NormFamily::One: {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        double s = a(j, j);
        for (std::size_t i = 0; i < n; ++i)
          if (i != j) s += std::abs(a(i, j));
        m = std::max(m, s);
      }
      return m;
    }
    case NormFamily::Two:
      return log_norm_two(a);
    case NormFamily::Inf: {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        double s = a(i, i);
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) s += std::abs(a(i, j));
        m = std::max(m, s);
      }
      return m;
    }
    case NormFamily::Weighted:
      return log_norm_two(weighted_similarity(a, kind));
  }
  return 0.0;
}

LimitEstimate log_norm_limit(const Matrix& a, const NormKind& kind,
                             std::span<const double> h_schedule) {
  require_square_finite(a, "log_norm_limit");
  if (h_schedule.empty())
    throw std::invalid_argument("log_norm_limit: empty step schedule");
  for (std::size_t i = 0; i < h_schedule.size(); ++i) {
    if (!(h_schedule[i] > 0.0))
      throw std::invalid_argument("log_norm_limit: steps must be positive");
    if (i > 0 && !(h_schedule[i] < h_schedule[i - 1]))
      throw std::invalid_argument("log_norm_limit: steps must be strictly decreasing");
  }

  const std::size_t m = h_schedule.size();
  const Matrix eye = Matrix::identity(a.rows());
  Vector quotient(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double h = h_schedule[i];
    const Matrix shifted = eye + h * Matrix(a);
    quotient[i] = (mat_induced_norm(shifted, kind) - 1.0) / h;
  }

  // Neville tableau in h, evaluated at h = 0.
  Vector tab(quotient);
  double last = tab[m - 1];
  double delta = 0.0;
  for (std::size_t level = 1; level < m; ++level) {
    for (std::size_t i = 0; i + level < m; ++i) {
      const double h_lo = h_schedule[i + level];
      const double h_hi = h_schedule[i];
      tab[i] = (h_hi * tab[i + 1] - h_lo * tab[i]) / (h_hi - h_lo);
    }
    delta = std::abs(tab[0] - last);
    last = tab[0];
  }

  // Cancellation in (||I + hA|| - 1) costs about eps/h at the smallest step.
  const double roundoff =
      64.0 * std::numeric_limits<double>::epsilon() / h_schedule[m - 1];
  return {tab[0], (m > 1 ? delta : std::abs(tab[0])) + roundoff};
}

}  // namespace lognorm::linalg
