#include "lognorm/certify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lognorm/errors.hpp"

namespace lognorm::certify {

using linalg::Matrix;
using linalg::NormKind;
using linalg::Vector;

const char* verdict_label(Verdict v) {
  switch (v) {
    case Verdict::HoldsOnHorizon: return "holds-on-horizon";
    case Verdict::Fails: return "fails";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

const char* overall_label(Overall o) {
  switch (o) {
    case Overall::CertifiedOnHorizon: return "certified-on-horizon";
    case Overall::NotCertified: return "not-certified";
    case Overall::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

std::size_t auto_mu_steps(double horizon, std::size_t requested) {
  if (requested >= 2) return requested;
  const double proposed = 20.0 * horizon;
  return static_cast<std::size_t>(std::clamp(proposed, 64.0, 4096.0));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Least-squares slope of log(v) vs log(t) over the last half of the series,
// skipping non-positive samples. Returns false if no fit is possible.
bool loglog_slope(std::span<const double> ts, std::span<const double> vs,
                  double* slope) {
  const std::size_t k = ts.size();
  const std::size_t start = k >= 4 ? k / 2 : 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = start; i < k; ++i) {
    if (!(ts[i] > 0.0) || !(vs[i] > 0.0)) continue;
    const double x = std::log(ts[i]);
    const double y = std::log(vs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return false;
  const double denom = m * sxx - sx * sx;
  if (!(denom > 0.0)) return false;
  *slope = (m * sxy - sx * sy) / denom;
  return true;
}

}  // namespace

A1Result check_a1(const model::MatrixFunction& mf, const NormKind& kind,
                  double horizon, double divergence_threshold,
                  std::size_t steps, double tol) {
  if (!(horizon > 0.0)) throw std::invalid_argument("check_a1: horizon must be > 0");
  A1Result result;
  result.verdict.id = "A1";
  result.verdict.rule =
      "cumulative mu <= -" + fmt(divergence_threshold) +
      " at the horizon and nonincreasing over the final quarter of the grid";
  try {
    result.evidence =
        quad::cumulative_mu(mf, kind, horizon, auto_mu_steps(horizon, steps), tol);
  } catch (const std::exception& e) {
    result.verdict.verdict = Verdict::Inconclusive;
    result.verdict.detail = std::string("evaluation failed: ") + e.what();
    return result;
  }

  const auto& values = result.evidence.values;
  const double final_value = values.back();
  const double slack = 1e-12 * (1.0 + std::abs(final_value));
  bool tail_nonincreasing = true;
  for (std::size_t i = (values.size() * 3) / 4; i + 1 < values.size(); ++i)
    if (values[i + 1] - values[i] > slack) {
      tail_nonincreasing = false;
      break;
    }

  const bool deep_enough = final_value <= -divergence_threshold;
  result.verdict.verdict = (deep_enough && tail_nonincreasing && result.evidence.converged)
                               ? Verdict::HoldsOnHorizon
                               : Verdict::Fails;
  if (!result.evidence.converged) result.verdict.verdict = Verdict::Inconclusive;
  result.verdict.detail = "integral(horizon) = " + fmt(final_value) +
                          (tail_nonincreasing ? ", tail nonincreasing" : ", tail increases");
  return result;
}

A2Result check_a2(const model::MatrixFunction& mf, const NormKind& kind,
                  double t_lo, double t_hi, std::size_t samples) {
  if (!(t_lo >= 0.0) || !(t_hi > t_lo))
    throw std::invalid_argument("check_a2: need 0 <= t_lo < t_hi");
  samples = std::max<std::size_t>(samples, 512);

  A2Result result;
  result.verdict.id = "A2";
  result.verdict.rule = "max sampled mu < 0 on the tail window [" + fmt(t_lo) +
                        ", " + fmt(t_hi) + "]";
  result.ts.resize(samples);
  result.mu_values.resize(samples);
  double worst = -std::numeric_limits<double>::infinity();
  try {
    for (std::size_t i = 0; i < samples; ++i) {
      const double t =
          t_lo + (t_hi - t_lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
      result.ts[i] = t;
      result.mu_values[i] = linalg::log_norm(mf.at(t), kind);
      worst = std::max(worst, result.mu_values[i]);
    }
  } catch (const std::exception& e) {
    result.verdict.verdict = Verdict::Inconclusive;
    result.verdict.detail = std::string("evaluation failed: ") + e.what();
    return result;
  }
  result.verdict.verdict = worst < 0.0 ? Verdict::HoldsOnHorizon : Verdict::Fails;
  result.verdict.detail = "max mu on window = " + fmt(worst);
  return result;
}

A3Result check_a3(const model::Perturbation* perturbation,
                  const model::MatrixFunction& mf, const NormKind& kind,
                  double horizon, const Config& config) {
  if (!(horizon > 0.0)) throw std::invalid_argument("check_a3: horizon must be > 0");
  A3Result result;
  result.verdict.id = "A3";
  result.verdict.rule =
      "trailing-window envelopes of |w~/mu|: lower envelope ends below " +
      fmt(config.a3_level_threshold) +
      " with negative log-log trend, upper envelope trend negative";

  if (perturbation == nullptr) {
    // No disturbance at all: the ratio is identically zero.
    result.verdict.verdict = Verdict::HoldsOnHorizon;
    result.verdict.detail = "unperturbed system, ratio identically 0";
    return result;
  }
  if (!perturbation->has_envelope()) {
    result.verdict.verdict = Verdict::Inconclusive;
    result.verdict.detail = "no bound envelope w~ available for the perturbation";
    return result;
  }

  const double tail_start = config.tail_start_fraction * horizon;
  const std::size_t samples = std::max<std::size_t>(config.a3_samples, 64);
  result.ratio_ts.resize(samples);
  result.ratio_values.resize(samples);
  try {
    for (std::size_t i = 0; i < samples; ++i) {
      const double t = tail_start + (horizon - tail_start) * static_cast<double>(i) /
                                        static_cast<double>(samples - 1);
      const double mu = linalg::log_norm(mf.at(t), kind);
      if (!(mu < 0.0)) {
        result.verdict.verdict = Verdict::Inconclusive;
        result.verdict.detail =
            "mu[A(t)] = " + fmt(mu) + " >= 0 at t = " + fmt(t) +
            " on the tail; the ratio w~/mu is not meaningful there";
        return result;
      }
      result.ratio_ts[i] = t;
      result.ratio_values[i] = perturbation->envelope_norm(t, kind) / std::abs(mu);
    }
  } catch (const std::exception& e) {
    result.verdict.verdict = Verdict::Inconclusive;
    result.verdict.detail = std::string("evaluation failed: ") + e.what();
    return result;
  }

  double ratio_max = 0.0;
  for (double r : result.ratio_values) ratio_max = std::max(ratio_max, r);
  if (ratio_max <= 1e-12) {
    result.verdict.verdict = Verdict::HoldsOnHorizon;
    result.verdict.detail = "ratio identically 0 on the tail";
    return result;
  }

  // De-oscillate: extrema of the ratio over a trailing window, anchored on
  // [tail_start + window, horizon].
  const double window = config.a3_window_fraction * (horizon - tail_start);
  const std::size_t anchors = std::max<std::size_t>(config.a3_anchors, 8);
  result.lower_envelope.klass = "A3";
  result.lower_envelope.ts.resize(anchors);
  result.lower_envelope.values.resize(anchors);
  result.upper_envelope.resize(anchors);
  for (std::size_t a = 0; a < anchors; ++a) {
    const double t_anchor = tail_start + window +
                            (horizon - tail_start - window) * static_cast<double>(a) /
                                static_cast<double>(anchors - 1);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const double t = result.ratio_ts[i];
      if (t < t_anchor - window || t > t_anchor) continue;
      lo = std::min(lo, result.ratio_values[i]);
      hi = std::max(hi, result.ratio_values[i]);
    }
    result.lower_envelope.ts[a] = t_anchor;
    result.lower_envelope.values[a] = lo;
    result.upper_envelope[a] = hi;
  }

  funclass::TrendRule rule;
  rule.eps_abs = config.a3_level_threshold;
  rule.delta = config.a3_bounded_away_threshold;
  const funclass::TrendResult lower =
      funclass::classify_trend(result.lower_envelope.ts, result.lower_envelope.values, rule);
  result.lower_envelope.verdict = lower.verdict;
  result.lower_envelope.trend_slope = lower.slope;
  double upper_slope = 0.0;
  const bool upper_fit =
      loglog_slope(result.lower_envelope.ts, result.upper_envelope, &upper_slope);
  result.upper_slope = upper_slope;

  const double last_lower = result.lower_envelope.values.back();
  if (lower.verdict == funclass::Verdict::TendsToZero && upper_fit && upper_slope < 0.0)
    result.verdict.verdict = Verdict::HoldsOnHorizon;
  else if (lower.verdict == funclass::Verdict::BoundedAway &&
           (!upper_fit || upper_slope >= 0.0))
    result.verdict.verdict = Verdict::Fails;
  else
    result.verdict.verdict = Verdict::Inconclusive;

  result.verdict.detail = "lower envelope at horizon = " + fmt(last_lower) +
                          ", lower slope = " + fmt(lower.slope) +
                          ", upper slope = " + fmt(upper_slope);
  return result;
}

EnvelopeSeries envelope_bound(const model::Scenario& scenario, const NormKind& kind,
                              std::span<const double> t_grid, double x0_norm,
                              double tol) {
  (void)tol;
  if (t_grid.empty() || t_grid.front() != 0.0)
    throw std::invalid_argument("envelope_bound: grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("envelope_bound: grid must be increasing");
  const bool perturbed =
      scenario.perturbation.has_value() && scenario.perturbation->has_envelope();
  if (scenario.perturbation.has_value() && !scenario.perturbation->has_envelope())
    throw std::invalid_argument("envelope_bound: perturbation lacks a bound envelope");

  auto mu = [&scenario, &kind](double t) {
    return linalg::log_norm(scenario.matrix.at(t), kind);
  };
  auto env = [&scenario, &kind, perturbed](double t) {
    return perturbed ? scenario.perturbation->envelope_norm(t, kind) : 0.0;
  };

  EnvelopeSeries out;
  out.ts.assign(t_grid.begin(), t_grid.end());
  out.values.resize(t_grid.size());
  out.values[0] = x0_norm;

  constexpr int panels = 8;
  double cumulative = 0.0;  // I(t_i)
  double conv = 0.0;        // int_0^{t_i} e^{I(t_i) - I(tau)} env(tau) dtau

  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
    const double t0 = t_grid[i];
    const double t1 = t_grid[i + 1];
    const double hp = (t1 - t0) / panels;

    // Local cumulative of mu at panel boundaries and midpoints (Simpson on
    // half-panels), then Simpson for the weighted envelope integral.
    double local_i[2 * panels + 1];
    local_i[0] = 0.0;
    double mu_prev = mu(t0);
    for (int p = 0; p < panels; ++p) {
      const double a = t0 + p * hp;
      const double m1 = mu(a + 0.25 * hp);
      const double mm = mu(a + 0.5 * hp);
      const double m3 = mu(a + 0.75 * hp);
      const double mu_next = mu(std::min(a + hp, t1));
      local_i[2 * p + 1] = local_i[2 * p] + (hp / 12.0) * (mu_prev + 4.0 * m1 + mm);
      local_i[2 * p + 2] = local_i[2 * p + 1] + (hp / 12.0) * (mm + 4.0 * m3 + mu_next);
      mu_prev = mu_next;
    }
    const double delta_i = local_i[2 * panels];

    double c = 0.0;
    if (perturbed) {
      auto g = [&](int node) {  // node indexes half-panel points
        const double tau = t0 + 0.5 * hp * node;
        return std::exp(delta_i - local_i[node]) * env(tau);
      };
      for (int p = 0; p < panels; ++p)
        c += (hp / 6.0) * (g(2 * p) + 4.0 * g(2 * p + 1) + g(2 * p + 2));
    }

    conv = std::exp(delta_i) * conv + c;
    cumulative += delta_i;
    out.values[i + 1] = x0_norm * std::exp(cumulative) + conv;
  }
  return out;
}

Overall combine(const std::array<AssumptionVerdict, 3>& assumptions) {
  bool all_hold = true;
  bool any_fails = false;
  for (const auto& a : assumptions) {
    all_hold = all_hold && a.verdict == Verdict::HoldsOnHorizon;
    any_fails = any_fails || a.verdict == Verdict::Fails;
  }
  if (all_hold) return Overall::CertifiedOnHorizon;
  if (any_fails) return Overall::NotCertified;
  return Overall::Inconclusive;
}

CertificateReport certify_scenario(const model::Scenario& scenario,
                                   const NormKind& kind, const Config& config) {
  const double horizon =
      config.horizon > 0.0 ? config.horizon : scenario.default_horizon;

  CertificateReport report;
  report.scenario = scenario.name;
  report.kind = kind.label();

  A1Result a1 = check_a1(scenario.matrix, kind, horizon,
                         config.a1_divergence_threshold, config.mu_steps,
                         config.quad_tol);
  A2Result a2 = check_a2(scenario.matrix, kind, config.tail_start_fraction * horizon,
                         horizon, config.a2_samples);
  const model::Perturbation* p =
      scenario.perturbation.has_value() ? &*scenario.perturbation : nullptr;
  A3Result a3 = check_a3(p, scenario.matrix, kind, horizon, config);

  const std::string stem = scenario.name + "_" + kind.label() + "_";
  a1.verdict.evidence_ref = stem + "a1_cumulative.csv";
  a2.verdict.evidence_ref = stem + "a2_mu.csv";
  a3.verdict.evidence_ref = stem + "a3_ratio.csv";

  report.assumptions = {a1.verdict, a2.verdict, a3.verdict};
  report.a1_evidence = std::move(a1.evidence);
  report.a2_ts = std::move(a2.ts);
  report.a2_mu = std::move(a2.mu_values);
  report.a3_evidence = std::move(a3);
  report.overall = combine(report.assumptions);

  if (config.run_simulation) {
    SimulationSummary sim;
    sim.performed = true;
    sim.sim_horizon = std::min(horizon, scenario.default_sim_horizon);

    Vector x0 = config.sim_x0.empty() ? Vector(scenario.n, 1.0) : config.sim_x0;
    if (x0.size() != scenario.n)
      throw std::invalid_argument("certify: x0 dimension mismatch");

    ode::Rhs rhs = [&scenario](double t, std::span<const double> x,
                               std::span<double> dx) {
      const Matrix a = scenario.matrix.at(t);
      for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        dx[i] = s;
      }
      if (scenario.perturbation.has_value()) {
        Vector w(scenario.n);
        scenario.perturbation->eval(t, x, w);
        for (std::size_t i = 0; i < w.size(); ++i) dx[i] += w[i];
      }
    };
    const ode::Trajectory traj =
        ode::integrate_ode(rhs, x0, 0.0, sim.sim_horizon, config.ode);
    sim.status = traj.status;

    if (traj.status == ode::SolveStatus::Ok) {
      const std::size_t points = std::max<std::size_t>(config.sim_output_points, 16);
      std::vector<double> grid(points);
      for (std::size_t i = 0; i < points; ++i)
        grid[i] = sim.sim_horizon * static_cast<double>(i) / static_cast<double>(points - 1);
      const EnvelopeSeries bound =
          envelope_bound(scenario, kind, grid, linalg::vec_norm(x0, kind), config.quad_tol);
      sim.envelope_satisfied = true;
      for (std::size_t i = 0; i < points; ++i) {
        const Vector x = traj.sample(grid[i]);
        const double nx = linalg::vec_norm(x, kind);
        const double ratio = nx / std::max(bound.values[i], 1e-300);
        sim.max_envelope_ratio = std::max(sim.max_envelope_ratio, ratio);
        if (ratio > 1.0 + config.sim_envelope_slack) sim.envelope_satisfied = false;
      }
      sim.tail_norm = linalg::vec_norm(traj.final_state(), kind);
    }
    report.simulation = sim;
  }
  return report;
}

std::vector<CertificateReport> certify_scenario(const model::Scenario& scenario,
                                                std::span<const NormKind> kinds,
                                                const Config& config) {
  std::vector<CertificateReport> reports;
  reports.reserve(kinds.size());
  for (const NormKind& k : kinds)
    reports.push_back(certify_scenario(scenario, k, config));
  return reports;
}

std::string report_to_json(const CertificateReport& report) {
  nlohmann::json j;
  j["scenario"] = report.scenario;
  j["kind"] = report.kind;
  nlohmann::json assumptions = nlohmann::json::array();
  for (const auto& a : report.assumptions) {
    assumptions.push_back({{"id", a.id},
                           {"verdict", verdict_label(a.verdict)},
                           {"rule", a.rule},
                           {"detail", a.detail},
                           {"evidence_ref", a.evidence_ref}});
  }
  j["assumptions"] = assumptions;
  j["overall"] = overall_label(report.overall);
  j["simulation"] = {{"performed", report.simulation.performed},
                     {"max_envelope_ratio", report.simulation.max_envelope_ratio},
                     {"tail_norm", report.simulation.tail_norm}};
  if (report.simulation.performed) {
    j["simulation"]["envelope_satisfied"] = report.simulation.envelope_satisfied;
    j["simulation"]["sim_horizon"] = report.simulation.sim_horizon;
    j["simulation"]["status"] = ode::status_label(report.simulation.status);
  }
  return j.dump(2);
}

SpotcheckReport envelope_spotcheck(const model::Perturbation& perturbation,
                                   std::size_t n, std::size_t sample_count,
                                   std::pair<double, double> t_range,
                                   double x_radius, const NormKind& kind,
                                   std::uint64_t seed) {
  if (!perturbation.has_envelope())
    throw std::invalid_argument("envelope_spotcheck: perturbation has no envelope");
  if (!(t_range.second >= t_range.first) || !(t_range.first >= 0.0))
    throw std::invalid_argument("envelope_spotcheck: bad time range");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SpotcheckReport report;
  report.samples = sample_count;
  Vector x(n), w(n);
  for (std::size_t s = 0; s < sample_count; ++s) {
    const double t = t_range.first + (t_range.second - t_range.first) * unit(rng);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = gauss(rng);
      norm2 += x[i] * x[i];
    }
    norm2 = std::sqrt(norm2);
    const double r =
        x_radius * std::pow(unit(rng), 1.0 / static_cast<double>(std::max<std::size_t>(n, 1)));
    for (double& v : x) v *= (norm2 > 0.0 ? r / norm2 : 0.0);

    perturbation.eval(t, x, w);
    const double lhs = linalg::vec_norm(w, kind);
    const double rhs = perturbation.envelope_norm(t, kind);
    const double excess = lhs - rhs;
    if (excess > report.worst_excess) {
      report.worst_excess = excess;
      report.witness_t = t;
      report.witness_x = x;
    }
    if (excess > 1e-12 * std::max(1.0, rhs)) {
      report.passed = false;
      return report;
    }
  }
  return report;
}

}  // namespace lognorm::certify
