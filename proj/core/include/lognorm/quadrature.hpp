#pragma once

#include <functional>
#include <vector>

#include "lognorm/model.hpp"
#include "lognorm/norms.hpp"

namespace lognorm::quad {

struct IntegrateResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool max_depth_reached = false;  // partial result flag
  std::size_t evaluations = 0;
};

/// Adaptive Simpson with recursive bisection. The per-interval acceptance
/// test is the classic |S2 - S1| / 15 estimate; `tol` is an absolute
/// target for the whole interval and is split across bisections.
IntegrateResult integrate(const std::function<double(double)>& f, double a,
                          double b, double tol = 1e-9, int max_depth = 40);

/// Running integral I(t_i) ~= int_0^{t_i} f on a uniform grid; I(0) = 0 and
/// I(t_i) = I(t_{i-1}) + int_{t_{i-1}}^{t_i} f.
struct CumulativeIntegral {
  std::vector<double> ts;
  std::vector<double> values;
  std::vector<double> interval_errors;
  bool converged = true;

  double total_error() const;
  /// Linear interpolation between grid nodes; throws outside the range.
  double value_at(double t) const;
};

CumulativeIntegral cumulative(const std::function<double(double)>& f, double start,
                              double horizon, std::size_t steps, double tol = 1e-9);

/// Cumulative integral of t -> mu[A(t)] in the given norm over [0, horizon].
CumulativeIntegral cumulative_mu(const model::MatrixFunction& mf,
                                 const linalg::NormKind& kind, double horizon,
                                 std::size_t steps, double tol = 1e-9);

}  // namespace lognorm::quad
