#include "lognorm/odesim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "lognorm/errors.hpp"

namespace lognorm::ode {

using linalg::Matrix;
using linalg::Vector;

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;

// 5th-minus-4th order error weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// PI controller constants (classic dopri5 values).
constexpr double safety = 0.9;
constexpr double pi_beta = 0.04;
constexpr double expo1 = 0.2 - pi_beta * 0.75;
constexpr double max_increase = 5.0;   // h may grow at most 5x
constexpr double max_decrease = 0.1;   // and shrink at most 10x

double scaled_rms(std::span<const double> v, std::span<const double> scale) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double q = v[i] / scale[i];
    s += q * q;
  }
  return std::sqrt(s / static_cast<double>(v.size()));
}

double initial_step_guess(const Rhs& rhs, double t0, const Vector& y0,
                          const Vector& f0, double tf,
                          const IntegratorSettings& st) {
  const std::size_t n = y0.size();
  Vector scale(n);
  for (std::size_t i = 0; i < n; ++i)
    scale[i] = st.abs_tol + st.rel_tol * std::abs(y0[i]);

  const double d0 = scaled_rms(y0, scale);
  const double d1 = scaled_rms(f0, scale);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * (d0 / d1);
  h0 = std::min(h0, tf - t0);

  Vector y1(n), f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h0 * f0[i];
  rhs(t0 + h0, y1, f1);
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = (f1[i] - f0[i]) / scale[i];
    d2 += q * q;
  }
  d2 = std::sqrt(d2 / static_cast<double>(n)) / h0;

  double h1;
  const double dm = std::max(d1, d2);
  if (dm <= 1e-15)
    h1 = std::max(1e-6, h0 * 1e-3);
  else
    h1 = std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, st.max_step, tf - t0});
}

}  // namespace

const char* status_label(SolveStatus s) {
  switch (s) {
    case SolveStatus::Ok: return "ok";
    case SolveStatus::StepUnderflow: return "step-underflow";
    case SolveStatus::MaxStepsExceeded: return "max-steps-exceeded";
  }
  return "?";
}

Trajectory integrate_ode(const Rhs& rhs, const Vector& x0, double t0, double tf,
                         const IntegratorSettings& settings) {
  if (!(tf >= t0)) throw std::invalid_argument("integrate_ode: need tf >= t0");
  if (!(settings.rel_tol > 0.0) || !(settings.abs_tol > 0.0))
    throw std::invalid_argument("integrate_ode: tolerances must be positive");
  const std::size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("integrate_ode: empty state");

  Trajectory traj;
  traj.dimension = n;

  Vector y = x0, f(n);
  rhs(t0, y, f);
  traj.ts.push_back(t0);
  traj.states.push_back(y);
  traj.derivatives.push_back(f);
  if (tf == t0) return traj;

  double h = settings.initial_step > 0.0
                 ? std::min(settings.initial_step, tf - t0)
                 : initial_step_guess(rhs, t0, y, f, tf, settings);
  double t = t0;
  double facold = 1e-4;
  bool last_rejected = false;

  Vector k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n),
      scale(n);

  while (t < tf) {
    if (traj.accepted_steps + traj.rejected_steps >= settings.max_steps) {
      traj.status = SolveStatus::MaxStepsExceeded;
      return traj;
    }
    h = std::min(h, settings.max_step);
    if (t + h > tf) h = tf - t;
    if (!(h > std::abs(t) * 1e-15 + 1e-300)) {
      traj.status = SolveStatus::StepUnderflow;
      return traj;
    }

    const Vector& k1 = f;  // FSAL
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                            a75 * k5[i] + a76 * k6[i]);
    rhs(t + h, ynew, k7);

    for (std::size_t i = 0; i < n; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                    e6 * k6[i] + e7 * k7[i]);
      scale[i] = settings.abs_tol +
                 settings.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
    }
    double err_norm = scaled_rms(err, scale);
    // A non-finite stage (NaN/Inf from the rhs) counts as a huge error, so
    // the controller backs off until the step underflows.
    if (!std::isfinite(err_norm)) err_norm = 1e6;

    const double fac11 = std::pow(std::max(err_norm, 1e-32), expo1);
    if (err_norm <= 1.0) {
      // Accept.
      double fac = fac11 / std::pow(facold, pi_beta);
      fac = std::clamp(safety / fac, max_decrease, max_increase);
      double hnew = h * fac;
      if (last_rejected) hnew = std::min(hnew, h);
      facold = std::max(err_norm, 1e-4);
      last_rejected = false;

      t += h;
      y = ynew;
      f = k7;
      traj.ts.push_back(t);
      traj.states.push_back(y);
      traj.derivatives.push_back(f);
      ++traj.accepted_steps;
      traj.max_error_estimate = std::max(traj.max_error_estimate, err_norm);
      h = hnew;
    } else {
      h *= std::clamp(safety / fac11, max_decrease, 1.0);
      ++traj.rejected_steps;
      last_rejected = true;
    }
  }
  return traj;
}

Vector Trajectory::sample(double t) const {
  if (ts.empty()) throw std::logic_error("Trajectory::sample: empty trajectory");
  if (t < ts.front() || t > ts.back())
    throw std::domain_error("Trajectory::sample: t outside computed range");
  auto it = std::lower_bound(ts.begin(), ts.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - ts.begin());
  if (hi == 0 || ts[hi] == t) return states[hi];
  const std::size_t lo = hi - 1;

  const double h = ts[hi] - ts[lo];
  const double s = (t - ts[lo]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;

  Vector out(dimension);
  for (std::size_t i = 0; i < dimension; ++i)
    out[i] = h00 * states[lo][i] + h * h10 * derivatives[lo][i] +
             h01 * states[hi][i] + h * h11 * derivatives[hi][i];
  return out;
}

FundamentalMatrix fundamental_matrix(const model::MatrixFunction& mf,
                                     std::span<const double> t_grid,
                                     const IntegratorSettings& settings) {
  if (t_grid.empty() || t_grid.front() != 0.0)
    throw std::invalid_argument("fundamental_matrix: grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("fundamental_matrix: grid must be increasing");

  const std::size_t n = mf.dimension();
  const double tf = t_grid.back();
  Rhs rhs = [&mf](double t, std::span<const double> x, std::span<double> dx) {
    const Matrix a = mf.at(t);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
      dx[i] = s;
    }
  };

  FundamentalMatrix out;
  out.ts.assign(t_grid.begin(), t_grid.end());
  out.values.assign(t_grid.size(), Matrix(n, n));

  for (std::size_t col = 0; col < n; ++col) {
    Vector e(n, 0.0);
    e[col] = 1.0;
    Trajectory traj = integrate_ode(rhs, e, 0.0, tf, settings);
    if (traj.status != SolveStatus::Ok) {
      out.status = traj.status;
      return out;
    }
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      const Vector v = traj.sample(t_grid[k]);
      for (std::size_t i = 0; i < n; ++i) out.values[k](i, col) = v[i];
    }
  }

  out.min_abs_determinant = std::numeric_limits<double>::infinity();
  for (const Matrix& phi : out.values) {
    linalg::LuFactor lu(phi);
    const double det = lu.singular() ? 0.0 : lu.determinant();
    out.min_abs_determinant = std::min(out.min_abs_determinant, std::abs(det));
    double cond = std::numeric_limits<double>::infinity();
    if (!lu.singular()) {
      const Matrix inv = lu.solve(Matrix::identity(n));
      cond = phi.frobenius_norm() * inv.frobenius_norm();
    }
    out.max_condition_estimate = std::max(out.max_condition_estimate, cond);
  }
  out.near_singular =
      out.min_abs_determinant == 0.0 || out.max_condition_estimate > 1e12;
  return out;
}

Matrix transition_matrix(const FundamentalMatrix& phi, double t, double tau) {
  auto locate = [&phi](double x) -> std::size_t {
    for (std::size_t i = 0; i < phi.ts.size(); ++i)
      if (std::abs(phi.ts[i] - x) <= 1e-9 * std::max(1.0, std::abs(x))) return i;
    throw std::invalid_argument("transition_matrix: time not on the sampled grid");
  };
  const std::size_t it = locate(t);
  const std::size_t itau = locate(tau);
  if (it < itau) throw std::invalid_argument("transition_matrix: need t >= tau");

  // Phi_trans = Phi(t) Phi(tau)^-1  <=>  Phi(tau)^T Phi_trans^T = Phi(t)^T.
  linalg::LuFactor lu(phi.values[itau].transpose());
  if (lu.singular()) throw Error("transition_matrix: Phi(tau) is singular");
  return lu.solve(phi.values[it].transpose()).transpose();
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          std::span<const double> out_grid,
                          std::span<const double> envelope) {
  if (!envelope.empty() && envelope.size() != out_grid.size())
    throw std::invalid_argument("write_trajectory_csv: envelope size mismatch");
  os << "t";
  for (std::size_t i = 1; i <= traj.dimension; ++i) os << ",x" << i;
  if (!envelope.empty()) os << ",envelope";
  os << "\n";
  char buf[32];
  for (std::size_t k = 0; k < out_grid.size(); ++k) {
    const Vector x = traj.sample(out_grid[k]);
    std::snprintf(buf, sizeof buf, "%.17g", out_grid[k]);
    os << buf;
    for (double v : x) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << ',' << buf;
    }
    if (!envelope.empty()) {
      std::snprintf(buf, sizeof buf, "%.17g", envelope[k]);
      os << ',' << buf;
    }
    os << "\n";
  }
}

}  // namespace lognorm::ode
