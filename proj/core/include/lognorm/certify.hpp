#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lognorm/funclass.hpp"
#include "lognorm/model.hpp"
#include "lognorm/norms.hpp"
#include "lognorm/odesim.hpp"
#include "lognorm/quadrature.hpp"

namespace lognorm::certify {

enum class Verdict { HoldsOnHorizon, Fails, Inconclusive };
enum class Overall { CertifiedOnHorizon, NotCertified, Inconclusive };
const char* verdict_label(Verdict v);
const char* overall_label(Overall o);

struct AssumptionVerdict {
  std::string id;      // "A1" | "A2" | "A3"
  Verdict verdict = Verdict::Inconclusive;
  std::string rule;    // the documented decision rule, human-readable
  std::string detail;  // numbers the rule was applied to
  std::string evidence_ref;
};

struct Config {
  double horizon = 0.0;     // 0 -> scenario default
  std::size_t mu_steps = 0;  // 0 -> 20 per time unit, clamped to [64, 4096]
  double quad_tol = 1e-9;

  // A1: on-horizon stand-in for the divergence of the cumulative integral.
  double a1_divergence_threshold = 50.0;

  // A2/A3 act on the horizon tail ("t sufficiently large").
  double tail_start_fraction = 0.25;
  std::size_t a2_samples = 512;

  // A3: the ratio is de-oscillated through trailing-window lower/upper
  // envelopes before the trend rule is applied (see check_a3).
  std::size_t a3_samples = 1024;
  std::size_t a3_anchors = 64;
  double a3_window_fraction = 0.25;  // trailing window, fraction of tail span
  double a3_level_threshold = 1.0;
  double a3_bounded_away_threshold = 1e-2;

  bool run_simulation = false;
  linalg::Vector sim_x0;  // empty -> all-ones
  double sim_envelope_slack = 1e-3;
  std::size_t sim_output_points = 512;
  ode::IntegratorSettings ode;

  std::uint64_t seed = 0;
};

struct A1Result {
  AssumptionVerdict verdict;
  quad::CumulativeIntegral evidence;
};

struct A2Result {
  AssumptionVerdict verdict;
  std::vector<double> ts;
  std::vector<double> mu_values;
};

struct A3Result {
  AssumptionVerdict verdict;
  funclass::ProbeSeries lower_envelope;  // headline evidence series
  std::vector<double> upper_envelope;    // aligned with lower_envelope.ts
  std::vector<double> ratio_ts;
  std::vector<double> ratio_values;      // raw |envelope / mu| samples
  double upper_slope = 0.0;
};

/// Assumption 1: cumulative mu must reach -threshold by the horizon and be
/// nonincreasing over the final quarter of the grid.
A1Result check_a1(const model::MatrixFunction& mf, const linalg::NormKind& kind,
                  double horizon, double divergence_threshold,
                  std::size_t steps = 0, double tol = 1e-9);

/// Assumption 2: mu[A(t)] sampled densely (>= 512 points by default) on
/// [t_lo, t_hi]; holds iff the maximum sample is strictly negative.
A2Result check_a2(const model::MatrixFunction& mf, const linalg::NormKind& kind,
                  double t_lo, double t_hi, std::size_t samples = 512);

/// Assumption 3: the ratio |w~(t)| / |mu[A(t)]| must vanish. On a finite
/// horizon the raw ratio may oscillate (example2 swings between ~0.65 and
/// ~5 at t = 20), so the verdict is taken on its trailing-window lower and
/// upper envelopes: holds iff the lower envelope ends below
/// a3_level_threshold with negative log-log trend and the upper envelope
/// trend is negative too; fails iff the lower envelope stays above
/// a3_bounded_away_threshold with a non-decreasing upper envelope.
/// Requires mu < 0 on the whole tail grid, else inconclusive.
A3Result check_a3(const model::Perturbation* perturbation,
                  const model::MatrixFunction& mf, const linalg::NormKind& kind,
                  double horizon, const Config& config = {});

struct EnvelopeSeries {
  std::vector<double> ts;
  std::vector<double> values;
};

/// Variation-of-constants bound
///   B(t) = ||x(0)|| e^{I(t)} + int_0^t e^{I(t) - I(tau)} ||w~(tau)|| dtau,
/// I(t) = int_0^t mu[A], evaluated on the grid with one cumulative-mu pass.
/// Exponentials only ever see within-step exponent differences, so a very
/// negative I cannot overflow the convolution weights.
EnvelopeSeries envelope_bound(const model::Scenario& scenario,
                              const linalg::NormKind& kind,
                              std::span<const double> t_grid, double x0_norm,
                              double tol = 1e-9);

struct SimulationSummary {
  bool performed = false;
  bool envelope_satisfied = false;
  double max_envelope_ratio = 0.0;  // max ||x(t)|| / B(t)
  double tail_norm = 0.0;           // ||x(T_sim)||
  double sim_horizon = 0.0;
  ode::SolveStatus status = ode::SolveStatus::Ok;
};

struct CertificateReport {
  std::string scenario;
  std::string kind;
  std::array<AssumptionVerdict, 3> assumptions;
  Overall overall = Overall::Inconclusive;
  SimulationSummary simulation;

  quad::CumulativeIntegral a1_evidence;
  std::vector<double> a2_ts, a2_mu;
  A3Result a3_evidence;
};

/// Recompute the overall verdict from the three assumption verdicts:
/// certified iff all hold, not-certified iff any fails, else inconclusive.
Overall combine(const std::array<AssumptionVerdict, 3>& assumptions);

CertificateReport certify_scenario(const model::Scenario& scenario,
                                   const linalg::NormKind& kind,
                                   const Config& config = {});
std::vector<CertificateReport> certify_scenario(
    const model::Scenario& scenario, std::span<const linalg::NormKind> kinds,
    const Config& config = {});

std::string report_to_json(const CertificateReport& report);

struct SpotcheckReport {
  bool passed = true;
  std::size_t samples = 0;
  double worst_excess = 0.0;  // max ||w(x,t)|| - envelope(t), > 0 means violation
  double witness_t = 0.0;
  linalg::Vector witness_x;
};

/// Monte Carlo check of ||w(x,t)|| <= ||w~(t)||: samples (x, t) with x in
/// the l2 ball of radius x_radius, t uniform in t_range; fails on the first
/// violation beyond 1e-12 slack and reports the witness.
SpotcheckReport envelope_spotcheck(const model::Perturbation& perturbation,
                                   std::size_t n, std::size_t sample_count,
                                   std::pair<double, double> t_range,
                                   double x_radius, const linalg::NormKind& kind,
                                   std::uint64_t seed = 0);

}  // namespace lognorm::certify
