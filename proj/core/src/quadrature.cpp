#include "lognorm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lognorm::quad {

namespace {

struct AdaptiveState {
  const std::function<double(double)>* f;
  int max_depth;
  std::size_t evaluations = 0;
  double error_estimate = 0.0;
  bool max_depth_reached = false;
};

double simpson(double h, double fa, double fm, double fb) {
  return (fa + 4.0 * fm + fb) * (h / 6.0);
}

double adapt(AdaptiveState& st, double a, double m, double b, double fa,
             double fm, double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = (*st.f)(lm);
  const double frm = (*st.f)(rm);
  st.evaluations += 2;

  const double left = simpson(m - a, fa, flm, fm);
  const double right = simpson(b - m, fm, frm, fb);
  const double err = (left + right - whole) / 15.0;

  if (std::abs(err) <= tol || depth >= st.max_depth) {
    if (std::abs(err) > tol) st.max_depth_reached = true;
    st.error_estimate += std::abs(err);
    return left + right + err;
  }
  return adapt(st, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         adapt(st, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

IntegrateResult integrate(const std::function<double(double)>& f, double a,
                          double b, double tol, int max_depth) {
  if (!(a <= b)) throw std::invalid_argument("integrate: need a <= b");
  if (!(tol > 0.0)) throw std::invalid_argument("integrate: tol must be positive");
  if (a == b) return {0.0, 0.0, false, 0};

  AdaptiveState st{&f, max_depth};
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  st.evaluations = 3;
  const double whole = simpson(b - a, fa, fm, fb);
  const double value = adapt(st, a, m, b, fa, fm, fb, whole, tol, 0);
  return {value, st.error_estimate, st.max_depth_reached, st.evaluations};
}

double CumulativeIntegral::total_error() const {
  double s = 0.0;
  for (double e : interval_errors) s += e;
  return s;
}

double CumulativeIntegral::value_at(double t) const {
  if (ts.empty()) throw std::logic_error("CumulativeIntegral: empty");
  if (t < ts.front() || t > ts.back())
    throw std::domain_error("CumulativeIntegral::value_at: t outside grid");
  auto it = std::lower_bound(ts.begin(), ts.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - ts.begin());
  if (hi == 0 || ts[hi] == t) return values[hi];
  const std::size_t lo = hi - 1;
  const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
  return values[lo] + w * (values[hi] - values[lo]);
}

CumulativeIntegral cumulative(const std::function<double(double)>& f, double start,
                              double horizon, std::size_t steps, double tol) {
  if (!(horizon > start)) throw std::invalid_argument("cumulative: need horizon > start");
  if (steps < 2) throw std::invalid_argument("cumulative: need steps >= 2");

  CumulativeIntegral out;
  out.ts.resize(steps + 1);
  out.values.resize(steps + 1);
  out.interval_errors.resize(steps);
  out.ts[0] = start;
  out.values[0] = 0.0;

  const double span = horizon - start;
  const double per_interval_tol = tol / static_cast<double>(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t0 = start + span * static_cast<double>(i) / static_cast<double>(steps);
    const double t1 = (i + 1 == steps)
                          ? horizon
                          : start + span * static_cast<double>(i + 1) / static_cast<double>(steps);
    const IntegrateResult r = integrate(f, t0, t1, per_interval_tol);
    out.ts[i + 1] = t1;
    out.values[i + 1] = out.values[i] + r.value;
    out.interval_errors[i] = r.error_estimate;
    if (r.max_depth_reached) out.converged = false;
  }
  return out;
}

CumulativeIntegral cumulative_mu(const model::MatrixFunction& mf,
                                 const linalg::NormKind& kind, double horizon,
                                 std::size_t steps, double tol) {
  auto mu = [&mf, &kind](double t) { return linalg::log_norm(mf.at(t), kind); };
  return cumulative(mu, 0.0, horizon, steps, tol);
}

}  // namespace lognorm::quad
