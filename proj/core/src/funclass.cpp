#include "lognorm/funclass.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "lognorm/quadrature.hpp"

namespace lognorm::funclass {

using linalg::Vector;

double needle_peak_time(int n) {
  if (n < 1) throw std::invalid_argument("needle_peak_time: n must be >= 1");
  return (n - 1) + 0.5 / n;
}

double needle(double t) {
  if (!(t >= 0.0)) throw std::domain_error("needle: t must be >= 0");
  const double base = std::floor(t);
  const double n = base + 1.0;
  // Exact by Sterbenz since base <= t < 2*base for all spikes past the first.
  const double s = t - base;
  const double u = 0.5 / n;
  if (t == base + u) return 1.0;  // representable peak maps to the exact peak
  if (s < u) return 2.0 * n * s;
  if (s < 2.0 * u) return 2.0 * (1.0 - n * s);
  return 0.0;
}

double needle_window_integral(double a, double b) {
  if (!(a >= 0.0) || !(b >= a))
    throw std::invalid_argument("needle_window_integral: need 0 <= a <= b");
  if (a == b) return 0.0;

  double total = 0.0;
  const long kmin = static_cast<long>(std::floor(a)) + 1;
  const long kmax = static_cast<long>(std::floor(b)) + 1;
  for (long k = kmin; k <= kmax; ++k) {
    const double base = static_cast<double>(k - 1);
    const double kd = static_cast<double>(k);
    const double u = 0.5 / kd;
    const double lo = std::max(a, base);
    const double hi = std::min(b, base + 2.0 * u);
    if (hi <= lo) continue;
    if (lo <= base && hi >= base + 2.0 * u) {
      total += 0.5 / kd;  // whole spike: triangle area
      continue;
    }
    const double s_lo = lo - base;
    const double s_hi = hi - base;
    const double r0 = std::min(s_lo, u), r1 = std::min(s_hi, u);
    if (r1 > r0) total += kd * (r1 * r1 - r0 * r0);
    const double f0 = std::max(s_lo, u), f1 = std::min(s_hi, 2.0 * u);
    if (f1 > f0) total += 2.0 * (f1 - f0) - kd * (f1 * f1 - f0 * f0);
  }
  return total;
}

VectorSignal oscillatory_signal() {
  VectorSignal s;
  s.dimension = 2;
  s.tag = "oscillatory";
  s.eval = [](double t, std::span<double> out) {
    const double e = std::exp(t);
    out[0] = std::sin(e);
    out[1] = std::cos(e);
  };
  return s;
}

VectorSignal needle_signal() {
  VectorSignal s;
  s.dimension = 1;
  s.tag = "needle";
  s.eval = [](double t, std::span<double> out) { out[0] = needle(t); };
  s.exact_abs_integral = [](double a, double b) {
    return needle_window_integral(a, b);
  };
  s.exact_integral = [](double a, double b, std::span<double> out) {
    out[0] = needle_window_integral(a, b);
  };
  return s;
}

VectorSignal zero_signal(std::size_t n) {
  VectorSignal s;
  s.dimension = n;
  s.tag = "zero";
  s.eval = [](double, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  s.exact_abs_integral = [](double, double) { return 0.0; };
  s.exact_integral = [](double, double, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  return s;
}

VectorSignal perturbation_signal(const model::Perturbation& p) {
  if (!p.has_envelope())
    throw std::invalid_argument("perturbation_signal: perturbation has no majorant");
  VectorSignal s;
  s.dimension = p.dimension();
  s.tag = p.tag();
  s.eval = [p](double t, std::span<double> out) {
    const Vector w = p.majorant(t);
    std::copy(w.begin(), w.end(), out.begin());
  };
  return s;
}

const char* verdict_label(Verdict v) {
  switch (v) {
    case Verdict::TendsToZero: return "tends-to-zero";
    case Verdict::BoundedAway: return "bounded-away";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

TrendResult classify_trend(std::span<const double> ts,
                           std::span<const double> values,
                           const TrendRule& rule) {
  if (ts.size() != values.size() || ts.empty())
    throw std::invalid_argument("classify_trend: mismatched or empty series");

  const std::size_t k = ts.size();
  const std::size_t start = k >= 4 ? k / 2 : 0;

  double min_last = std::numeric_limits<double>::infinity();
  for (std::size_t i = start; i < k; ++i) min_last = std::min(min_last, values[i]);
  const double last = values[k - 1];

  // Log-log least squares over the last half, positive samples only.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = start; i < k; ++i) {
    if (!(ts[i] > 0.0) || !(values[i] > 0.0)) continue;
    const double x = std::log(ts[i]);
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  bool fit_ok = false;
  double slope = 0.0;
  if (m >= 2) {
    const double denom = m * sxx - sx * sx;
    if (denom > 0.0) {
      slope = (m * sxy - sx * sy) / denom;
      fit_ok = true;
    }
  }

  TrendResult result;
  result.slope = slope;
  if (last < rule.eps_abs && (!fit_ok || slope < 0.0))
    result.verdict = Verdict::TendsToZero;
  else if (min_last > rule.delta)
    result.verdict = Verdict::BoundedAway;
  else
    result.verdict = Verdict::Inconclusive;
  return result;
}

namespace {

void check_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("probe: empty grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0)) throw std::invalid_argument("probe: grid must be >= 0");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("probe: grid must be increasing");
  }
}

void finalize(ProbeSeries& series, const TrendRule& rule) {
  const TrendResult tr = classify_trend(series.ts, series.values, rule);
  series.verdict = tr.verdict;
  series.trend_slope = tr.slope;
}

// Signed componentwise integral of the signal over [a, b].
Vector component_integral(const VectorSignal& h, double a, double b, double tol,
                          bool* flagged) {
  Vector out(h.dimension, 0.0);
  if (h.exact_integral) {
    h.exact_integral(a, b, out);
    return out;
  }
  Vector buf(h.dimension);
  for (std::size_t c = 0; c < h.dimension; ++c) {
    auto component = [&h, &buf, c](double t) {
      h.eval(t, buf);
      return buf[c];
    };
    const quad::IntegrateResult r = quad::integrate(component, a, b, tol);
    if (r.max_depth_reached && flagged) *flagged = true;
    out[c] = r.value;
  }
  return out;
}

}  // namespace

ProbeSeries probe_v(const VectorSignal& h, std::span<const double> t_grid,
                    const linalg::NormKind& kind, const TrendRule& rule) {
  check_grid(t_grid);
  ProbeSeries series;
  series.klass = "V";
  series.ts.assign(t_grid.begin(), t_grid.end());
  series.values.reserve(t_grid.size());
  Vector buf(h.dimension);
  for (double t : t_grid) {
    h.eval(t, buf);
    series.values.push_back(linalg::vec_norm(buf, kind));
  }
  finalize(series, rule);
  return series;
}

ProbeSeries probe_ad(const VectorSignal& h, std::span<const double> t_grid,
                     const linalg::NormKind& kind, const TrendRule& rule,
                     double tol) {
  check_grid(t_grid);
  ProbeSeries series;
  series.klass = "AD";
  series.ts.assign(t_grid.begin(), t_grid.end());
  series.values.reserve(t_grid.size());
  std::size_t flagged = 0;
  Vector buf(h.dimension);
  for (double t : t_grid) {
    double d;
    if (h.exact_abs_integral) {
      d = h.exact_abs_integral(t, t + 1.0);
    } else {
      auto norm_of_h = [&h, &buf, &kind](double s) {
        h.eval(s, buf);
        return linalg::vec_norm(buf, kind);
      };
      const quad::IntegrateResult r = quad::integrate(norm_of_h, t, t + 1.0, tol);
      if (r.max_depth_reached) ++flagged;
      d = r.value;
    }
    series.values.push_back(d);
  }
  if (flagged) series.params["windows_flagged"] = static_cast<double>(flagged);
  finalize(series, rule);
  return series;
}

ProbeSeries probe_d(const VectorSignal& h, std::span<const double> t_grid,
                    std::size_t eta_grid_size, const linalg::NormKind& kind,
                    const TrendRule& rule, double tol) {
  check_grid(t_grid);
  if (eta_grid_size < 16)
    throw std::invalid_argument("probe_d: eta grid must have >= 16 points");

  ProbeSeries series;
  series.klass = "D";
  series.ts.assign(t_grid.begin(), t_grid.end());
  series.values.reserve(t_grid.size());
  series.params["eta_grid"] = static_cast<double>(eta_grid_size);

  const std::size_t m = eta_grid_size;
  const double sub_tol = tol / static_cast<double>(m);
  bool flagged = false;

  for (double t : t_grid) {
    // Accumulate C(eta_j) = int_t^{t+eta_j} h once, reuse across eta.
    std::vector<Vector> cumulative(m + 1, Vector(h.dimension, 0.0));
    for (std::size_t j = 0; j < m; ++j) {
      const double a = t + static_cast<double>(j) / static_cast<double>(m);
      const double b = t + static_cast<double>(j + 1) / static_cast<double>(m);
      const Vector inc = component_integral(h, a, b, sub_tol, &flagged);
      for (std::size_t c = 0; c < h.dimension; ++c)
        cumulative[j + 1][c] = cumulative[j][c] + inc[c];
    }
    double best = 0.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j <= m; ++j) {
      const double v = linalg::vec_norm(cumulative[j], kind);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    // One midpoint refinement on both sides of the maximizer.
    const double dm = static_cast<double>(m);
    for (int side = -1; side <= 1; side += 2) {
      if (side < 0 && best_j == 0) continue;
      if (side > 0 && best_j == m) continue;
      const std::size_t anchor = side < 0 ? best_j - 1 : best_j;
      const double a = t + static_cast<double>(anchor) / dm;
      const double mid = a + 0.5 / dm;
      const Vector inc = component_integral(h, a, mid, sub_tol, &flagged);
      Vector c = cumulative[anchor];
      for (std::size_t k = 0; k < h.dimension; ++k) c[k] += inc[k];
      best = std::max(best, linalg::vec_norm(c, kind));
    }
    series.values.push_back(best);
  }
  if (flagged) series.params["windows_flagged"] = 1.0;
  finalize(series, rule);
  return series;
}

void write_probe_csv(std::ostream& os, const ProbeSeries& series) {
  os << "t,value\n";
  char buf[32];
  for (std::size_t i = 0; i < series.ts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", series.ts[i]);
    os << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", series.values[i]);
    os << buf << '\n';
  }
}

std::string probe_verdict_json(const ProbeSeries& series) {
  nlohmann::json j;
  j["class"] = series.klass;
  j["verdict"] = verdict_label(series.verdict);
  j["trend_slope"] = series.trend_slope;
  j["params"] = series.params;
  return j.dump(2);
}

}  // namespace lognorm::funclass
