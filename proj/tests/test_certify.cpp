#include <doctest.h>

#include <cmath>
#include <random>

#include "lognorm/certify.hpp"
#include "lognorm/model.hpp"

using lognorm::certify::A1Result;
using lognorm::certify::A2Result;
using lognorm::certify::A3Result;
using lognorm::certify::CertificateReport;
using lognorm::certify::Config;
using lognorm::certify::EnvelopeSeries;
using lognorm::certify::Overall;
using lognorm::certify::SpotcheckReport;
using lognorm::certify::Verdict;
using lognorm::certify::certify_scenario;
using lognorm::certify::check_a1;
using lognorm::certify::check_a2;
using lognorm::certify::check_a3;
using lognorm::certify::combine;
using lognorm::certify::envelope_bound;
using lognorm::certify::envelope_spotcheck;
using lognorm::certify::report_to_json;
using lognorm::linalg::Matrix;
using lognorm::linalg::NormKind;
using lognorm::linalg::Vector;
using lognorm::model::MatrixFunction;
using lognorm::model::Perturbation;
using lognorm::model::Scenario;
using lognorm::model::builtin_scenario;

namespace {

std::vector<double> linspace(double a, double b, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

double norm2(const Vector& x) { return lognorm::linalg::vec_norm(x, NormKind::two()); }

}  // namespace

TEST_SUITE("certify") {

TEST_CASE("assumption 1 on the worked scenarios") {
  const Scenario s2 = builtin_scenario("example2");

  const A1Result euclid = check_a1(s2.matrix, NormKind::two(), 20.0, 50.0);
  CHECK(euclid.verdict.verdict == Verdict::HoldsOnHorizon);
  CHECK(std::abs(euclid.evidence.values.back() - (-220.0)) <= 220.0 * 1e-6);

  // beta = t^4 poisons the column/row-sum log norms
  const A1Result l1 = check_a1(s2.matrix, NormKind::one(), 20.0, 50.0);
  CHECK(l1.verdict.verdict == Verdict::Fails);
  const A1Result linf = check_a1(s2.matrix, NormKind::inf(), 20.0, 50.0);
  CHECK(linf.verdict.verdict == Verdict::Fails);

  const auto zero = MatrixFunction::constant(Matrix(2, 2));
  CHECK(check_a1(zero, NormKind::two(), 20.0, 50.0).verdict.verdict ==
        Verdict::Fails);
}

TEST_CASE("assumption 2 on the worked scenarios") {
  const Scenario s2 = builtin_scenario("example2");
  const A2Result a2 = check_a2(s2.matrix, NormKind::two(), 0.0, 20.0);
  CHECK(a2.verdict.verdict == Verdict::HoldsOnHorizon);
  // mu_2[A(t)] = -(t+1) exactly at every sample
  for (std::size_t i = 0; i < a2.ts.size(); ++i)
    CHECK(a2.mu_values[i] == -(a2.ts[i] + 1.0));

  const Scenario s3 = builtin_scenario("example3", {{"lambda", 1.0}});
  const A2Result b = check_a2(s3.matrix, NormKind::two(), 0.0, 10.0);
  CHECK(b.verdict.verdict == Verdict::HoldsOnHorizon);
  for (double v : b.mu_values) CHECK(std::abs(v - (-1.0)) < 1e-12);

  const auto a1mat = MatrixFunction::constant(Matrix{{-11, 10}, {2, -3}});
  CHECK(check_a2(a1mat, NormKind::two(), 0.0, 5.0).verdict.verdict ==
        Verdict::Fails);
}

TEST_CASE("assumption 3: example2 certifies, example3 does not") {
  const Scenario s2 = builtin_scenario("example2");
  const A3Result holds =
      check_a3(&*s2.perturbation, s2.matrix, NormKind::two(), 20.0);
  CHECK(holds.verdict.verdict == Verdict::HoldsOnHorizon);
  // the de-oscillated ratio evidence ends below 0.7 with a negative trend
  CHECK(holds.lower_envelope.values.back() < 0.7);
  CHECK(holds.lower_envelope.trend_slope < 0.0);
  CHECK(holds.upper_slope < 0.0);

  const Scenario s3 = builtin_scenario("example3", {{"lambda", 1.0}});
  const A3Result fails =
      check_a3(&*s3.perturbation, s3.matrix, NormKind::two(), 60.0);
  CHECK(fails.verdict.verdict == Verdict::Fails);
  // ratio is identically lambda / lambda = 1
  for (double r : fails.ratio_values) CHECK(std::abs(r - 1.0) < 1e-12);

  // no perturbation at all: ratio identically zero
  CHECK(check_a3(nullptr, s2.matrix, NormKind::two(), 20.0).verdict.verdict ==
        Verdict::HoldsOnHorizon);

  // a perturbation without a stored majorant cannot be assessed
  const Perturbation bare = Perturbation::make(
      2, "bare",
      [](double, std::span<const double>, std::span<double> out) {
        out[0] = out[1] = 0.0;
      });
  CHECK(check_a3(&bare, s2.matrix, NormKind::two(), 20.0).verdict.verdict ==
        Verdict::Inconclusive);

  // positive mu on the tail makes the ratio meaningless
  const auto a1mat = MatrixFunction::constant(Matrix{{-11, 10}, {2, -3}});
  CHECK(check_a3(&*s2.perturbation, a1mat, NormKind::two(), 20.0)
            .verdict.verdict == Verdict::Inconclusive);
}

TEST_CASE("envelope bound: unperturbed decay is the pure exponential") {
  const Scenario bare = builtin_scenario("example2").without_perturbation();
  const auto grid = linspace(0.0, 6.0, 61);
  const EnvelopeSeries b = envelope_bound(bare, NormKind::two(), grid, 1.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const double expected = std::exp(-(t * t / 2.0 + t));
    CHECK(std::abs(b.values[i] - expected) <= 1e-9 * std::max(expected, 1e-12));
  }
}

TEST_CASE("envelope bound: example3 convolution is tight") {
  const Scenario s3 = builtin_scenario("example3", {{"lambda", 1.0}});
  const auto grid = linspace(0.0, 4.0, 201);
  const EnvelopeSeries b = envelope_bound(s3, NormKind::two(), grid, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(b.values[i] - (1.0 - std::exp(-grid[i]))) < 1e-6);
}

TEST_CASE("envelope bound: example2 stays finite and shrinks over the tail") {
  const Scenario s2 = builtin_scenario("example2");
  const auto grid = linspace(0.0, 5.0, 101);
  const EnvelopeSeries b =
      envelope_bound(s2, NormKind::two(), grid, norm2(Vector{-5.0, 2.0}));
  for (double v : b.values) CHECK(std::isfinite(v));
  CHECK(b.values.back() < b.values[grid.size() / 2]);
}

TEST_CASE("certify: example2 in the Euclidean norm") {
  const Scenario s2 = builtin_scenario("example2");
  const CertificateReport report = certify_scenario(s2, NormKind::two());
  CHECK(report.overall == Overall::CertifiedOnHorizon);
  for (const auto& a : report.assumptions)
    CHECK(a.verdict == Verdict::HoldsOnHorizon);
  CHECK(combine(report.assumptions) == report.overall);
}

TEST_CASE("certify: example2 fails in the l1 and linf norms") {
  const Scenario s2 = builtin_scenario("example2");
  for (const NormKind& kind : {NormKind::one(), NormKind::inf()}) {
    const CertificateReport report = certify_scenario(s2, kind);
    CHECK(report.overall == Overall::NotCertified);
    CHECK(report.assumptions[0].verdict == Verdict::Fails);  // A1
  }
}

TEST_CASE("certify: example3 is rejected on assumption 3") {
  const Scenario s3 = builtin_scenario("example3", {{"lambda", 1.0}});
  const CertificateReport report = certify_scenario(s3, NormKind::two());
  CHECK(report.overall == Overall::NotCertified);
  CHECK(report.assumptions[0].verdict == Verdict::HoldsOnHorizon);  // A1
  CHECK(report.assumptions[1].verdict == Verdict::HoldsOnHorizon);  // A2
  CHECK(report.assumptions[2].verdict == Verdict::Fails);           // A3
}

TEST_CASE("certify: simulation cross-check on example2") {
  const Scenario s2 = builtin_scenario("example2");
  Config config;
  config.run_simulation = true;
  config.sim_x0 = Vector{-5.0, 2.0};
  const CertificateReport report = certify_scenario(s2, NormKind::two(), config);
  REQUIRE(report.simulation.performed);
  CHECK(report.simulation.status == lognorm::ode::SolveStatus::Ok);
  CHECK(report.simulation.envelope_satisfied);
  CHECK(report.simulation.max_envelope_ratio <= 1.0 + 1e-3);
  CHECK(report.simulation.tail_norm < 1.5);
}

TEST_CASE("property: simulated norms stay under the certified envelope") {
  const Scenario s2 = builtin_scenario("example2");
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> coord(-7.0, 7.0);
  for (int trial = 0; trial < 10; ++trial) {
    Vector x0{coord(rng), coord(rng)};
    if (norm2(x0) > 10.0) x0 = lognorm::linalg::vec_scale(10.0 / norm2(x0), x0);
    Config config;
    config.run_simulation = true;
    config.sim_x0 = x0;
    const CertificateReport report = certify_scenario(s2, NormKind::two(), config);
    CHECK(report.simulation.envelope_satisfied);
  }
}

TEST_CASE("property: unperturbed example2 decays under e^{-(t^2/2 + t)}") {
  const Scenario bare = builtin_scenario("example2").without_perturbation();
  lognorm::ode::Rhs rhs = [&bare](double t, std::span<const double> x,
                                  std::span<double> dx) {
    const Matrix a = bare.matrix.at(t);
    dx[0] = a(0, 0) * x[0] + a(0, 1) * x[1];
    dx[1] = a(1, 0) * x[0] + a(1, 1) * x[1];
  };
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  for (int trial = 0; trial < 3; ++trial) {
    const Vector x0{coord(rng), coord(rng)};
    lognorm::ode::IntegratorSettings st;
    st.abs_tol = 1e-14;
    const auto traj = lognorm::ode::integrate_ode(rhs, x0, 0.0, 5.0, st);
    REQUIRE(traj.status == lognorm::ode::SolveStatus::Ok);
    for (double t = 0.0; t <= 5.0; t += 0.25) {
      const double bound =
          norm2(x0) * std::exp(-(t * t / 2.0 + t)) * (1.0 + 1e-3);
      CHECK(norm2(traj.sample(t)) <= bound + 1e-300);
    }
  }
}

TEST_CASE("reports are deterministic and internally consistent") {
  const Scenario s2 = builtin_scenario("example2");
  Config config;
  config.run_simulation = true;
  config.sim_x0 = Vector{-5.0, 2.0};
  const std::string once = report_to_json(certify_scenario(s2, NormKind::two(), config));
  const std::string twice = report_to_json(certify_scenario(s2, NormKind::two(), config));
  CHECK(once == twice);
  CHECK(once.find("certified-on-horizon") != std::string::npos);
}

TEST_CASE("envelope spotcheck") {
  const Scenario s2 = builtin_scenario("example2");
  const SpotcheckReport ok = envelope_spotcheck(
      *s2.perturbation, 2, 500, {0.0, 20.0}, 5.0, NormKind::two(), 123);
  CHECK(ok.passed);
  CHECK(ok.worst_excess <= 0.0 + 1e-12);

  // |sin(x1)| <= 1 keeps e^{-t} sin(x1) under the e^{-t} envelope
  const Perturbation damped = Perturbation::make(
      2, "damped-sine",
      [](double t, std::span<const double> x, std::span<double> out) {
        out[0] = std::exp(-t) * std::sin(x[0]);
        out[1] = 0.0;
      },
      [](double t, std::span<double> out) {
        out[0] = std::exp(-t);
        out[1] = 0.0;
      });
  CHECK(envelope_spotcheck(damped, 2, 500, {0.0, 10.0}, 3.0, NormKind::two(), 7)
            .passed);

  // w(x, t) = x against a unit envelope must fail with a witness outside
  // the unit ball
  const Perturbation identity = Perturbation::make(
      2, "identity",
      [](double, std::span<const double> x, std::span<double> out) {
        out[0] = x[0];
        out[1] = x[1];
      },
      [](double, std::span<double> out) {
        out[0] = 1.0;
        out[1] = 0.0;
      });
  const SpotcheckReport bad =
      envelope_spotcheck(identity, 2, 500, {0.0, 1.0}, 2.0, NormKind::two(), 99);
  CHECK_FALSE(bad.passed);
  CHECK(norm2(bad.witness_x) > 1.0);
}

}  // TEST_SUITE
