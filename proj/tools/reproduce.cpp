#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "commands.hpp"
#include "helpers.hpp"
#include "lognorm/certify.hpp"
#include "lognorm/funclass.hpp"
#include "lognorm/lyapunov.hpp"
#include "lognorm/odesim.hpp"

namespace cli {

using lognorm::linalg::Matrix;
using lognorm::linalg::NormKind;
using lognorm::linalg::Vector;
using nlohmann::json;

namespace {

struct CheckRow {
  std::string name;
  std::string expected;
  std::string computed;
  bool pass = false;
};

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void check_close(std::vector<CheckRow>& rows, const std::string& name,
                 double expected, double computed, double tol) {
  rows.push_back({name, fmt6(expected), fmt6(computed),
                  std::abs(computed - expected) <= tol});
}

void check_true(std::vector<CheckRow>& rows, const std::string& name,
                const std::string& expected, const std::string& computed,
                bool pass) {
  rows.push_back({name, expected, computed, pass});
}

int finish(const GlobalOptions& g, const std::string& item,
           const std::vector<CheckRow>& rows) {
  const auto dir = ensure_out_dir(g, "reproduce_" + item);
  json summary = json::array();
  bool all_pass = true;
  for (const auto& r : rows) {
    summary.push_back({{"name", r.name},
                       {"expected", r.expected},
                       {"computed", r.computed},
                       {"pass", r.pass}});
    all_pass = all_pass && r.pass;
    if (!g.json)
      std::printf("%-44s expected %-14s computed %-14s %s\n", r.name.c_str(),
                  r.expected.c_str(), r.computed.c_str(),
                  r.pass ? "PASS" : "FAIL");
  }
  std::ofstream out(dir / "summary.json");
  out << summary.dump(2) << "\n";
  if (g.json) std::printf("%s\n", summary.dump(2).c_str());
  if (!g.json)
    std::printf("%s: %s (summary in %s)\n", item.c_str(),
                all_pass ? "all checks passed" : "CHECKS FAILED",
                (dir / "summary.json").string().c_str());
  return all_pass ? kExitOk : kExitNumeric;
}

lognorm::ode::Trajectory simulate_scenario(const lognorm::model::Scenario& s,
                                           const Vector& x0, double tf,
                                           const lognorm::ode::IntegratorSettings& st) {
  lognorm::ode::Rhs rhs = [&s](double t, std::span<const double> x,
                               std::span<double> dx) {
    const Matrix a = s.matrix.at(t);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
      dx[i] = acc;
    }
    if (s.perturbation.has_value()) {
      Vector w(s.n);
      s.perturbation->eval(t, x, w);
      for (std::size_t i = 0; i < w.size(); ++i) dx[i] += w[i];
    }
  };
  return lognorm::ode::integrate_ode(rhs, x0, 0.0, tf, st);
}

int reproduce_example1(const GlobalOptions& g) {
  std::vector<CheckRow> rows;
  const Matrix a1{{-11, 10}, {2, -3}};
  const Matrix a2{{-11, 2}, {10, -3}};
  const Matrix a3{{-1, 3}, {-3, -2}};

  struct Item {
    const char* label;
    const Matrix* m;
    double mu1, mu2, muinf;
  };
  const Item items[] = {{"A1", &a1, 7.0, 0.2111, -1.0},
                        {"A2", &a2, -1.0, 0.2111, 7.0},
                        {"A3", &a3, 2.0, -1.0, 2.0}};
  for (const auto& item : items) {
    check_close(rows, std::string("mu_1[") + item.label + "]", item.mu1,
                lognorm::linalg::log_norm(*item.m, NormKind::one()), 5e-5);
    check_close(rows, std::string("mu_2[") + item.label + "]", item.mu2,
                lognorm::linalg::log_norm(*item.m, NormKind::two()), 5e-5);
    check_close(rows, std::string("mu_inf[") + item.label + "]", item.muinf,
                lognorm::linalg::log_norm(*item.m, NormKind::inf()), 5e-5);
  }

  // every Hurwitz matrix admits a negative log norm in its Lyapunov-weighted
  // norm, computed two independent ways
  for (const auto& item : items) {
    const double direct = lognorm::linalg::mu_weighted_hurwitz(*item.m);
    const Matrix h = lognorm::linalg::lyapunov_solve(*item.m);
    const double via = lognorm::linalg::log_norm(*item.m, NormKind::weighted(h));
    check_true(rows, std::string("mu_H[") + item.label + "] negative", "< 0",
               fmt6(direct), direct < 0.0 && std::abs(direct - via) <= 1e-9);
  }
  return finish(g, "example1", rows);
}

int reproduce_example2(const GlobalOptions& g) {
  std::vector<CheckRow> rows;
  const auto dir = ensure_out_dir(g, "reproduce_example2");
  const auto scenario = lognorm::model::builtin_scenario("example2");

  lognorm::certify::Config config;
  config.horizon = 20.0;
  const auto euclid =
      lognorm::certify::certify_scenario(scenario, NormKind::two(), config);
  check_true(rows, "certify(euclidean) overall", "certified-on-horizon",
             lognorm::certify::overall_label(euclid.overall),
             euclid.overall == lognorm::certify::Overall::CertifiedOnHorizon);
  check_close(rows, "cumulative mu at T=20", -220.0,
              euclid.a1_evidence.values.back(), 220.0 * 1e-6);
  double worst_mu_dev = 0.0;
  for (std::size_t i = 0; i < euclid.a2_ts.size(); ++i)
    worst_mu_dev = std::max(
        worst_mu_dev, std::abs(euclid.a2_mu[i] - (-(euclid.a2_ts[i] + 1.0))));
  check_close(rows, "max |mu_2(t) + (t+1)| at samples", 0.0, worst_mu_dev, 0.0);
  const auto& a3 = euclid.a3_evidence;
  check_true(rows, "A3 ratio evidence at t=20", "< 0.7",
             fmt6(a3.lower_envelope.values.back()),
             a3.lower_envelope.values.back() < 0.7);
  check_true(rows, "A3 trend", "negative", fmt6(a3.lower_envelope.trend_slope),
             a3.lower_envelope.trend_slope < 0.0 && a3.upper_slope < 0.0);

  for (const NormKind& kind : {NormKind::one(), NormKind::inf()}) {
    const auto rep = lognorm::certify::certify_scenario(scenario, kind, config);
    check_true(rows, "certify(l" + kind.label() + ", beta=t^4) A1", "fails",
               lognorm::certify::verdict_label(rep.assumptions[0].verdict),
               rep.assumptions[0].verdict == lognorm::certify::Verdict::Fails &&
                   rep.overall == lognorm::certify::Overall::NotCertified);
  }

  // reference run: x(0) = [-5, 2], beta = t^4, horizon 5
  lognorm::ode::IntegratorSettings st;
  st.rel_tol = g.rel_tol;
  st.abs_tol = g.abs_tol;
  const Vector x0{-5.0, 2.0};
  const auto traj = simulate_scenario(scenario, x0, 5.0, st);
  check_true(rows, "simulation status", "ok",
             lognorm::ode::status_label(traj.status),
             traj.status == lognorm::ode::SolveStatus::Ok);

  const auto grid = linspace(0.0, 5.0, 401);
  const auto bound = lognorm::certify::envelope_bound(
      scenario, NormKind::two(), grid,
      lognorm::linalg::vec_norm(x0, NormKind::two()));
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double nx =
        lognorm::linalg::vec_norm(traj.sample(grid[i]), NormKind::two());
    worst_ratio = std::max(worst_ratio, nx / std::max(bound.values[i], 1e-300));
  }
  check_true(rows, "||x(t)||_2 under envelope", "<= 1 + 1e-3", fmt6(worst_ratio),
             worst_ratio <= 1.0 + 1e-3);
  const double tail =
      lognorm::linalg::vec_norm(traj.final_state(), NormKind::two());
  check_true(rows, "||x(5)||_2", "< 1.5", fmt6(tail), tail < 1.5);

  std::ofstream csv(dir / "trajectory.csv");
  lognorm::ode::write_trajectory_csv(csv, traj, grid, bound.values);

  // the perturbation leaves class D: windowed partial integrals blow up
  const auto w_signal =
      lognorm::funclass::perturbation_signal(*scenario.perturbation);
  const auto d_probe = lognorm::funclass::probe_d(w_signal, linspace(0.0, 20.0, 21),
                                                  64, NormKind::two());
  check_true(rows, "perturbation class D probe", "bounded-away",
             lognorm::funclass::verdict_label(d_probe.verdict),
             d_probe.verdict == lognorm::funclass::Verdict::BoundedAway);

  return finish(g, "example2", rows);
}

int reproduce_example3(const GlobalOptions& g) {
  std::vector<CheckRow> rows;
  const auto dir = ensure_out_dir(g, "reproduce_example3");
  const auto scenario =
      lognorm::model::builtin_scenario("example3", {{"lambda", 1.0}});

  lognorm::ode::IntegratorSettings st;
  st.rel_tol = g.rel_tol;
  st.abs_tol = g.abs_tol;
  const auto traj = simulate_scenario(scenario, Vector{0.0, 0.0}, 4.0, st);
  const auto grid = linspace(0.0, 4.0, 401);
  double worst_dev = 0.0;
  for (double t : grid) {
    const double nx = lognorm::linalg::vec_norm(traj.sample(t), NormKind::two());
    worst_dev = std::max(worst_dev, std::abs(nx - (1.0 - std::exp(-t))));
  }
  check_true(rows, "max | ||x*(t)||_2 - (1 - e^-t) |", "<= 1e-3",
             fmt6(worst_dev), worst_dev <= 1e-3);

  std::ofstream csv(dir / "trajectory.csv");
  lognorm::ode::write_trajectory_csv(csv, traj, grid);

  const auto phigrid = linspace(0.0, 4.0, 41);
  const auto phi = lognorm::ode::fundamental_matrix(scenario.matrix, phigrid, st);
  // normalize the analytic fundamental solution to Phi(0) = I
  lognorm::linalg::LuFactor lu0(scenario.analytic_fundamental(0.0).transpose());
  double worst_entry = 0.0;
  for (std::size_t k = 0; k < phigrid.size(); ++k) {
    const Matrix expected =
        lu0.solve(scenario.analytic_fundamental(phigrid[k]).transpose()).transpose();
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        worst_entry = std::max(worst_entry,
                               std::abs(phi.values[k](i, j) - expected(i, j)));
  }
  check_true(rows, "fundamental matrix vs analytic", "<= 1e-4",
             fmt6(worst_entry), worst_entry <= 1e-4);

  double worst_trans = 0.0;
  for (std::size_t j = 0; j < phigrid.size(); j += 8)
    for (std::size_t i = j; i < phigrid.size(); i += 8) {
      const Matrix tr = lognorm::ode::transition_matrix(phi, phigrid[i], phigrid[j]);
      const double norm = lognorm::linalg::mat_induced_norm(tr, NormKind::two());
      worst_trans = std::max(
          worst_trans, std::abs(norm - std::exp(-(phigrid[i] - phigrid[j]))));
    }
  check_true(rows, "transition norm vs e^{-(t-tau)}", "<= 1e-4",
             fmt6(worst_trans), worst_trans <= 1e-4);

  lognorm::certify::Config config;
  config.horizon = 60.0;
  const auto rep =
      lognorm::certify::certify_scenario(scenario, NormKind::two(), config);
  check_true(rows, "certify(euclidean) overall", "not-certified",
             lognorm::certify::overall_label(rep.overall),
             rep.overall == lognorm::certify::Overall::NotCertified);
  check_true(rows, "assumption 3 verdict", "fails",
             lognorm::certify::verdict_label(rep.assumptions[2].verdict),
             rep.assumptions[2].verdict == lognorm::certify::Verdict::Fails);

  // the variation-of-constants bound is tight here: B(t) = 1 - e^{-t}
  const auto bound =
      lognorm::certify::envelope_bound(scenario, NormKind::two(), grid, 0.0);
  double worst_bound = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst_bound = std::max(
        worst_bound, std::abs(bound.values[i] - (1.0 - std::exp(-grid[i]))));
  check_true(rows, "envelope equals exact ||x*||_2", "<= 1e-6",
             fmt6(worst_bound), worst_bound <= 1e-6);

  return finish(g, "example3", rows);
}

int reproduce_lemma2(const GlobalOptions& g) {
  std::vector<CheckRow> rows;
  const auto dir = ensure_out_dir(g, "reproduce_lemma2");

  const auto oscillatory = lognorm::funclass::oscillatory_signal();
  const auto osc_grid = linspace(0.0, 9.0, 50);
  const auto osc_ad =
      lognorm::funclass::probe_ad(oscillatory, osc_grid, NormKind::two());
  double worst = 0.0;
  for (double v : osc_ad.values) worst = std::max(worst, std::abs(v - 1.0));
  check_true(rows, "oscillatory AD windows equal 1", "<= 1e-6", fmt6(worst),
             worst <= 1e-6);
  check_true(rows, "oscillatory AD verdict", "bounded-away",
             lognorm::funclass::verdict_label(osc_ad.verdict),
             osc_ad.verdict == lognorm::funclass::Verdict::BoundedAway);

  const auto osc_d =
      lognorm::funclass::probe_d(oscillatory, osc_grid, 64, NormKind::two());
  bool under_bound = true;
  for (std::size_t k = 0; k < osc_grid.size(); ++k)
    under_bound = under_bound &&
                  osc_d.values[k] <= std::sqrt(32.0) * std::exp(-osc_grid[k]);
  check_true(rows, "oscillatory D under sqrt(32) e^{-t}", "true",
             under_bound ? "true" : "false", under_bound);
  check_true(rows, "oscillatory D verdict", "tends-to-zero",
             lognorm::funclass::verdict_label(osc_d.verdict),
             osc_d.verdict == lognorm::funclass::Verdict::TendsToZero);

  const auto needle = lognorm::funclass::needle_signal();
  std::vector<double> starts;
  for (int n = 0; n < 512; ++n) starts.push_back(n);
  const auto needle_ad = lognorm::funclass::probe_ad(needle, starts, NormKind::two());
  bool exact = true;
  for (int n = 1; n <= 50; ++n)
    exact = exact && needle_ad.values[static_cast<std::size_t>(n - 1)] == 0.5 / n;
  check_true(rows, "needle AD windows equal 1/(2n), n<=50", "exact",
             exact ? "exact" : "off", exact);
  check_true(rows, "needle AD verdict", "tends-to-zero",
             lognorm::funclass::verdict_label(needle_ad.verdict),
             needle_ad.verdict == lognorm::funclass::Verdict::TendsToZero);

  std::vector<double> peaks;
  for (int n = 1; n <= 512; ++n)
    peaks.push_back(lognorm::funclass::needle_peak_time(n));
  const auto needle_v = lognorm::funclass::probe_v(needle, peaks, NormKind::two());
  bool all_one = true;
  for (double v : needle_v.values) all_one = all_one && v == 1.0;
  check_true(rows, "needle peaks equal 1", "exact", all_one ? "exact" : "off",
             all_one);
  check_true(rows, "needle V verdict", "bounded-away",
             lognorm::funclass::verdict_label(needle_v.verdict),
             needle_v.verdict == lognorm::funclass::Verdict::BoundedAway);

  for (const auto* probe : {&osc_ad, &osc_d, &needle_ad, &needle_v}) {
    std::ofstream csv(dir / (probe->klass + "_probe.csv"));
    lognorm::funclass::write_probe_csv(csv, *probe);
  }
  return finish(g, "lemma2", rows);
}

}  // namespace

int run_reproduce(const GlobalOptions& g, const ReproduceOptions& o) {
  if (o.item == "example1") return reproduce_example1(g);
  if (o.item == "example2") return reproduce_example2(g);
  if (o.item == "example3") return reproduce_example3(g);
  if (o.item == "lemma2") return reproduce_lemma2(g);
  throw std::invalid_argument("unknown reproduction item '" + o.item +
                              "' (expected example1|example2|example3|lemma2)");
}

}  // namespace cli
