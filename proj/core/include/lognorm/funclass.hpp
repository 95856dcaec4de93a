#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lognorm/model.hpp"
#include "lognorm/norms.hpp"

namespace lognorm::funclass {

/// Continuous h: [0, inf) -> R^n fed to the class probes. Signals may carry
/// exact window integrators; the probes prefer those over quadrature (the
/// needle's spikes are far narrower than any sane quadrature resolution).
struct VectorSignal {
  std::size_t dimension = 0;
  std::string tag;
  std::function<void(double t, std::span<double> out)> eval;
  // exact int_a^b ||h||, valid for every norm kind (single-component signals)
  std::function<double(double a, double b)> exact_abs_integral;
  // exact componentwise signed int_a^b h
  std::function<void(double a, double b, std::span<double> out)> exact_integral;
};

VectorSignal oscillatory_signal();            // [sin e^t, cos e^t]
VectorSignal needle_signal();                 // [needle(t)]
VectorSignal zero_signal(std::size_t n = 2);
/// Time-only signal from a perturbation's majorant.
VectorSignal perturbation_signal(const model::Perturbation& p);

/// Piecewise-linear spike train: the spike indexed n >= 1 rises on
/// [n-1, n-1+1/(2n)), falls on [n-1+1/(2n), n-1+1/n), and is zero
/// elsewhere; its peak value is exactly 1 at t = n-1+1/(2n).
double needle(double t);
/// Representable peak abscissa of spike n; needle() maps it to exactly 1.
double needle_peak_time(int n);
/// Exact integral of the needle train over [a, b] (spikes are nonnegative,
/// so this is also the integral of |h| in any norm). Fully contained spikes
/// contribute their closed-form area 1/(2n).
double needle_window_integral(double a, double b);

enum class Verdict { TendsToZero, BoundedAway, Inconclusive };
const char* verdict_label(Verdict v);

/// Finite-horizon stand-in for "d(t) -> 0": tends-to-zero iff the final
/// value is below eps_abs and the log-log least-squares slope over the last
/// half of the grid is negative (exact zeros are excluded from the fit; a
/// series that dies out entirely passes outright). Bounded-away iff the
/// last-half minimum exceeds delta. Anything else is inconclusive. The
/// thresholds are diagnostics configuration, not a claim about the limit.
struct TrendRule {
  double eps_abs = 1e-3;
  double delta = 1e-2;
};

struct TrendResult {
  Verdict verdict = Verdict::Inconclusive;
  double slope = 0.0;
};

TrendResult classify_trend(std::span<const double> ts,
                           std::span<const double> values,
                           const TrendRule& rule = {});

struct ProbeSeries {
  std::string klass;  // "V", "AD", or "D"
  std::vector<double> ts;
  std::vector<double> values;
  Verdict verdict = Verdict::Inconclusive;
  double trend_slope = 0.0;
  std::map<std::string, double> params;
};

/// Class V probe: d_k = ||h(t_k)||.
ProbeSeries probe_v(const VectorSignal& h, std::span<const double> t_grid,
                    const linalg::NormKind& kind, const TrendRule& rule = {});

/// Class AD probe: d_k = int_{t_k}^{t_k+1} ||h(s)|| ds.
ProbeSeries probe_ad(const VectorSignal& h, std::span<const double> t_grid,
                     const linalg::NormKind& kind, const TrendRule& rule = {},
                     double tol = 1e-10);

/// Class D probe: d_k = sup over eta in [0,1] of || int_{t_k}^{t_k+eta} h ||,
/// the sup taken over a uniform eta grid (>= 16 points) with one midpoint
/// refinement around the maximizer. Component integrals are accumulated
/// once per window and reused across eta.
ProbeSeries probe_d(const VectorSignal& h, std::span<const double> t_grid,
                    std::size_t eta_grid_size, const linalg::NormKind& kind,
                    const TrendRule& rule = {}, double tol = 1e-10);

/// CSV body `t,value`; the verdict goes in a JSON sidecar.
void write_probe_csv(std::ostream& os, const ProbeSeries& series);
std::string probe_verdict_json(const ProbeSeries& series);

}  // namespace lognorm::funclass
