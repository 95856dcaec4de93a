#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "helpers.hpp"
#include "lognorm/certify.hpp"
#include "lognorm/errors.hpp"
#include "lognorm/funclass.hpp"
#include "lognorm/lyapunov.hpp"
#include "lognorm/odesim.hpp"
#include "lognorm/scenario_json.hpp"

namespace cli {

using lognorm::linalg::Matrix;
using lognorm::linalg::NormKind;
using lognorm::linalg::Vector;
using nlohmann::json;

namespace {

json parse_json_or_file(const std::string& source) {
  json parsed = json::parse(source, nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  std::ifstream in(source);
  if (!in) throw std::invalid_argument("cannot parse as JSON or open as file: " + source);
  std::stringstream buf;
  buf << in.rdbuf();
  return json::parse(buf.str());
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(s);
  while (std::getline(in, token, sep))
    if (!token.empty()) out.push_back(token);
  return out;
}

}  // namespace

Matrix parse_matrix(const std::string& source) {
  const json j = parse_json_or_file(source);
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw std::invalid_argument("matrix must be a JSON array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  if (!m.all_finite()) throw std::invalid_argument("matrix has non-finite entries");
  return m;
}

Vector parse_vector(const std::string& source) {
  const json j = parse_json_or_file(source);
  if (!j.is_array()) throw std::invalid_argument("vector must be a JSON array");
  Vector v;
  for (const auto& e : j) v.push_back(e.get<double>());
  return v;
}

std::vector<NormKind> parse_kinds(const std::string& spec,
                                  const Matrix* for_weighted) {
  std::vector<NormKind> kinds;
  for (const std::string& token : split(spec, ',')) {
    if (token == "H" || token == "h") {
      if (for_weighted == nullptr)
        throw std::invalid_argument(
            "kind H needs a constant system matrix (Lyapunov-weighted norm)");
      kinds.push_back(
          NormKind::weighted(lognorm::linalg::lyapunov_solve(*for_weighted)));
    } else {
      kinds.push_back(NormKind::parse(token));
    }
  }
  if (kinds.empty()) throw std::invalid_argument("no norm kinds given");
  return kinds;
}

lognorm::model::Scenario resolve_scenario(
    const std::string& source, const std::map<std::string, double>& params) {
  for (const char* name : {"example2", "example3", "lti_hurwitz"})
    if (source == name) return lognorm::model::builtin_scenario(source, params);
  std::ifstream in(source);
  if (!in)
    throw std::invalid_argument("unknown scenario '" + source +
                                "' (not a builtin, not a readable file)");
  std::stringstream buf;
  buf << in.rdbuf();
  return lognorm::model::scenario_from_json(buf.str());
}

std::filesystem::path ensure_out_dir(const GlobalOptions& g,
                                     const std::string& subdir) {
  std::filesystem::path dir = g.out_dir;
  if (!subdir.empty()) dir /= subdir;
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<double> linspace(double a, double b, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

void write_series_csv(const std::filesystem::path& path, const char* header,
                      std::span<const double> ts, std::span<const double> values) {
  std::ofstream out(path);
  out << header << "\n";
  char buf[32];
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", ts[i]);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    out << buf << '\n';
  }
}

int run_mu(const GlobalOptions& g, const MuOptions& o) {
  const Matrix a = parse_matrix(o.matrix_source);
  const auto kinds = parse_kinds(o.kinds, &a);

  json rows = json::array();
  if (!g.json) std::printf("%-6s %14s %14s\n", "kind", "induced", "log-norm");
  for (const auto& kind : kinds) {
    const double induced = lognorm::linalg::mat_induced_norm(a, kind);
    const double mu = lognorm::linalg::log_norm(a, kind);
    if (g.json)
      rows.push_back({{"kind", kind.label()}, {"induced", induced}, {"log_norm", mu}});
    else
      std::printf("%-6s %14.6g %14.6g\n", kind.label().c_str(), induced, mu);
  }
  if (g.json) std::printf("%s\n", rows.dump(2).c_str());
  return kExitOk;
}

namespace {

void write_certify_evidence(const std::filesystem::path& dir,
                            const lognorm::certify::CertificateReport& report) {
  const std::string stem = report.scenario + "_" + report.kind + "_";
  write_series_csv(dir / (stem + "a1_cumulative.csv"), "t,value",
                   report.a1_evidence.ts, report.a1_evidence.values);
  write_series_csv(dir / (stem + "a2_mu.csv"), "t,mu", report.a2_ts, report.a2_mu);
  const auto& a3 = report.a3_evidence;
  if (!a3.ratio_ts.empty())
    write_series_csv(dir / (stem + "a3_ratio.csv"), "t,value", a3.ratio_ts,
                     a3.ratio_values);
  if (!a3.lower_envelope.ts.empty()) {
    std::ofstream probe(dir / (stem + "a3_envelope.csv"));
    lognorm::funclass::write_probe_csv(probe, a3.lower_envelope);
  }
}

}  // namespace

int run_certify(const GlobalOptions& g, const CertifyOptions& o) {
  const auto scenario = resolve_scenario(o.scenario, o.params);
  if (!o.dump_scenario.empty()) {
    std::ofstream dump(o.dump_scenario);
    dump << lognorm::model::scenario_to_json(scenario) << "\n";
  }

  const Matrix a0 = scenario.matrix.at(0.0);
  const bool constant = scenario.matrix.kind() ==
                        lognorm::model::MatrixFunction::Kind::Constant;
  const auto kinds = parse_kinds(o.kinds, constant ? &a0 : nullptr);

  lognorm::certify::Config config;
  config.horizon = g.horizon;
  config.seed = g.seed;
  config.ode.rel_tol = g.rel_tol;
  config.ode.abs_tol = g.abs_tol;
  config.run_simulation = o.simulate;
  if (!o.x0.empty()) config.sim_x0 = parse_vector(o.x0);

  const auto dir = ensure_out_dir(g);
  int exit_code = kExitOk;
  for (const auto& kind : kinds) {
    const auto report = lognorm::certify::certify_scenario(scenario, kind, config);
    const std::string text = lognorm::certify::report_to_json(report);
    std::ofstream out(dir / (report.scenario + "_" + report.kind + "_report.json"));
    out << text << "\n";
    write_certify_evidence(dir, report);

    if (g.json)
      std::printf("%s\n", text.c_str());
    else
      std::printf("%s | kind %s | %s\n", report.scenario.c_str(),
                  report.kind.c_str(),
                  lognorm::certify::overall_label(report.overall));

    switch (report.overall) {
      case lognorm::certify::Overall::CertifiedOnHorizon: break;
      case lognorm::certify::Overall::NotCertified:
        exit_code = kExitNotCertified;
        break;
      case lognorm::certify::Overall::Inconclusive:
        if (exit_code == kExitOk) exit_code = kExitInconclusive;
        break;
    }
  }
  return exit_code;
}

int run_simulate(const GlobalOptions& g, const SimulateOptions& o) {
  const auto scenario = resolve_scenario(o.scenario, o.params);
  if (!o.dump_scenario.empty()) {
    std::ofstream dump(o.dump_scenario);
    dump << lognorm::model::scenario_to_json(scenario) << "\n";
  }

  Vector x0(scenario.n, 0.0);
  if (!o.x0.empty()) x0 = parse_vector(o.x0);
  if (x0.size() != scenario.n)
    throw std::invalid_argument("x0 dimension does not match the scenario");
  const double tf = o.tf >= 0.0 ? o.tf : scenario.default_sim_horizon;
  if (tf < o.t0) throw std::invalid_argument("need tf >= t0");

  lognorm::ode::Rhs rhs = [&scenario](double t, std::span<const double> x,
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

  lognorm::ode::IntegratorSettings settings;
  settings.rel_tol = g.rel_tol;
  settings.abs_tol = g.abs_tol;
  const auto traj = lognorm::ode::integrate_ode(rhs, x0, o.t0, tf, settings);

  const double t_end = traj.end_time();
  const auto grid =
      (tf == o.t0) ? std::vector<double>{o.t0}
                   : linspace(o.t0, std::min(tf, t_end), std::max<std::size_t>(o.points, 2));

  std::vector<double> envelope;
  const NormKind kind = NormKind::parse(o.kind);
  if (o.envelope) {
    if (o.t0 != 0.0)
      throw std::invalid_argument("--envelope requires t0 = 0");
    const auto bound = lognorm::certify::envelope_bound(
        scenario, kind, grid, lognorm::linalg::vec_norm(x0, kind));
    envelope = bound.values;
  }

  const auto dir = ensure_out_dir(g);
  const auto csv_path = dir / (scenario.name + "_trajectory.csv");
  std::ofstream csv(csv_path);
  lognorm::ode::write_trajectory_csv(csv, traj, grid, envelope);

  json summary = {{"scenario", scenario.name},
                  {"t0", o.t0},
                  {"tf", tf},
                  {"reached", t_end},
                  {"status", lognorm::ode::status_label(traj.status)},
                  {"accepted_steps", traj.accepted_steps},
                  {"rejected_steps", traj.rejected_steps},
                  {"final_norm2", lognorm::linalg::vec_norm(traj.final_state(),
                                                            NormKind::two())},
                  {"csv", csv_path.string()}};
  if (g.json)
    std::printf("%s\n", summary.dump(2).c_str());
  else
    std::printf("%s: %s, %zu steps, wrote %s\n", scenario.name.c_str(),
                lognorm::ode::status_label(traj.status), traj.accepted_steps,
                csv_path.string().c_str());

  if (traj.status != lognorm::ode::SolveStatus::Ok) {
    std::fprintf(stderr, "integrator stopped early (%s), partial CSV written\n",
                 lognorm::ode::status_label(traj.status));
    return kExitNumeric;
  }
  return kExitOk;
}

int run_classify(const GlobalOptions& g, const ClassifyOptions& o) {
  using lognorm::funclass::ProbeSeries;
  using lognorm::funclass::VectorSignal;

  VectorSignal signal;
  if (o.fn == "oscillatory")
    signal = lognorm::funclass::oscillatory_signal();
  else if (o.fn == "needle")
    signal = lognorm::funclass::needle_signal();
  else if (o.fn == "zero")
    signal = lognorm::funclass::zero_signal();
  else if (o.fn == "example2-perturbation")
    signal = lognorm::funclass::perturbation_signal(
        *lognorm::model::builtin_scenario("example2").perturbation);
  else
    throw std::invalid_argument("unknown function '" + o.fn + "'");

  const NormKind kind = NormKind::parse(o.kind);
  const auto dir = ensure_out_dir(g);

  json results = json::array();
  int exit_code = kExitOk;
  for (std::string klass : split(o.classes, ',')) {
    for (char& c : klass) c = static_cast<char>(std::toupper(c));

    ProbeSeries series;
    if (o.fn == "needle") {
      // exact closed forms make long horizons free; default 512 spikes
      const int spikes = static_cast<int>(g.horizon > 0.0 ? g.horizon : 512.0);
      if (klass == "V") {
        std::vector<double> peaks;
        for (int n = 1; n <= spikes; ++n)
          peaks.push_back(lognorm::funclass::needle_peak_time(n));
        series = lognorm::funclass::probe_v(signal, peaks, kind);
      } else {
        std::vector<double> starts;
        for (int n = 0; n < spikes; ++n) starts.push_back(n);
        series = klass == "AD"
                     ? lognorm::funclass::probe_ad(signal, starts, kind)
                     : lognorm::funclass::probe_d(signal, starts, o.eta_grid, kind);
      }
    } else {
      double horizon = g.horizon;
      if (horizon <= 0.0) horizon = o.fn == "oscillatory" ? 9.0 : 20.0;
      const auto grid = linspace(0.0, horizon, 50);
      if (klass == "V")
        series = lognorm::funclass::probe_v(signal, grid, kind);
      else if (klass == "AD")
        series = lognorm::funclass::probe_ad(signal, grid, kind);
      else if (klass == "D")
        series = lognorm::funclass::probe_d(signal, grid, o.eta_grid, kind);
      else
        throw std::invalid_argument("unknown class '" + klass + "'");
    }
    if (klass != "V" && klass != "AD" && klass != "D")
      throw std::invalid_argument("unknown class '" + klass + "'");

    const std::string stem = o.fn + "_" + klass;
    std::ofstream csv(dir / (stem + ".csv"));
    lognorm::funclass::write_probe_csv(csv, series);
    std::ofstream sidecar(dir / (stem + ".verdict.json"));
    sidecar << lognorm::funclass::probe_verdict_json(series) << "\n";

    results.push_back({{"class", klass},
                       {"verdict", lognorm::funclass::verdict_label(series.verdict)},
                       {"trend_slope", series.trend_slope}});
    if (!g.json)
      std::printf("%s %-3s -> %s\n", o.fn.c_str(), klass.c_str(),
                  lognorm::funclass::verdict_label(series.verdict));
  }
  if (g.json) std::printf("%s\n", results.dump(2).c_str());
  return exit_code;
}

}  // namespace cli
