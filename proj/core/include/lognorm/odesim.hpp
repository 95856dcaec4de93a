#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "lognorm/matrix.hpp"
#include "lognorm/model.hpp"

namespace lognorm::ode {

struct IntegratorSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0 = choose automatically
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 4'000'000;
};

enum class SolveStatus { Ok, StepUnderflow, MaxStepsExceeded };
const char* status_label(SolveStatus s);

using Rhs = std::function<void(double t, std::span<const double> x,
                               std::span<double> dx)>;

/// Accepted-step samples of an ODE solution. Dense output between steps is
/// cubic Hermite on the stored states and derivatives (locally O(h^4),
/// consistent with the step tolerances used here).
struct Trajectory {
  std::size_t dimension = 0;
  std::vector<double> ts;                    // strictly increasing from t0
  std::vector<linalg::Vector> states;
  std::vector<linalg::Vector> derivatives;   // rhs at each accepted step
  SolveStatus status = SolveStatus::Ok;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  double max_error_estimate = 0.0;           // scaled local error, max over steps

  linalg::Vector sample(double t) const;
  double end_time() const { return ts.back(); }
  const linalg::Vector& final_state() const { return states.back(); }
};

/// Embedded Dormand-Prince 4(5) with PI step-size control. Integrates from
/// t0 to tf >= t0 (tf == t0 yields the single initial sample). Step
/// underflow and step-budget exhaustion return the partial trajectory with
/// the corresponding status instead of throwing.
Trajectory integrate_ode(const Rhs& rhs, const linalg::Vector& x0, double t0,
                         double tf, const IntegratorSettings& settings = {});

/// Fundamental matrix solution of X' = A(t) X with X(0) = I, integrated
/// column-wise and sampled on `t_grid` (increasing from 0). Each sample is
/// checked against Liouville's theorem: a vanishing determinant or an
/// extreme condition estimate is flagged.
struct FundamentalMatrix {
  std::vector<double> ts;
  std::vector<linalg::Matrix> values;
  SolveStatus status = SolveStatus::Ok;
  double min_abs_determinant = 0.0;
  double max_condition_estimate = 0.0;
  bool near_singular = false;
};

FundamentalMatrix fundamental_matrix(const model::MatrixFunction& mf,
                                     std::span<const double> t_grid,
                                     const IntegratorSettings& settings = {});

/// State-transition matrix Phi(t) Phi(tau)^-1 for grid times tau <= t,
/// formed by a dense LU solve rather than an explicit inverse.
linalg::Matrix transition_matrix(const FundamentalMatrix& phi, double t, double tau);

/// CSV with header `t,x1,...,xn`, one row per output-grid point, 17
/// significant digits; optional trailing `envelope` column.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          std::span<const double> out_grid,
                          std::span<const double> envelope = {});

}  // namespace lognorm::ode
