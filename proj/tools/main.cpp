#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "lognorm/errors.hpp"

namespace {

// "REL" or "REL,ABS"; ABS defaults to a thousandth of REL.
void apply_tolerances(const std::string& spec, cli::GlobalOptions& g) {
  if (spec.empty()) return;
  const auto comma = spec.find(',');
  g.rel_tol = std::stod(spec.substr(0, comma));
  g.abs_tol = comma == std::string::npos ? g.rel_tol * 1e-3
                                         : std::stod(spec.substr(comma + 1));
  if (!(g.rel_tol > 0.0) || !(g.abs_tol > 0.0))
    throw CLI::ValidationError("--tol", "tolerances must be positive");
}

void apply_params(const std::vector<std::string>& raw,
                  std::map<std::string, double>& params) {
  for (const std::string& kv : raw) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--param", "expected KEY=VALUE, got '" + kv + "'");
    params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lognorm: robust-stability certification of perturbed "
               "linear time-varying systems via logarithmic norms"};
  app.require_subcommand(1);
  app.fallthrough();

  cli::GlobalOptions global;
  std::string tol_spec;
  app.add_option("--out", global.out_dir,
                 "output directory (env LOGNORM_OUT overrides)")
      ->capture_default_str();
  app.add_option("--tol", tol_spec, "integrator tolerances REL[,ABS]");
  app.add_option("--horizon", global.horizon, "analysis horizon override");
  app.add_option("--seed", global.seed, "seed for Monte Carlo checks");
  app.add_flag("--json", global.json, "machine-readable stdout");

  cli::MuOptions mu;
  CLI::App* mu_cmd = app.add_subcommand("mu", "induced and logarithmic norms of a matrix");
  mu_cmd->add_option("--matrix", mu.matrix_source, "matrix as inline JSON or a file path")
      ->required();
  mu_cmd->add_option("--kinds", mu.kinds, "comma list of 1,2,inf,H")->capture_default_str();

  cli::CertifyOptions certify;
  std::vector<std::string> certify_params;
  CLI::App* certify_cmd =
      app.add_subcommand("certify", "check the three stability assumptions");
  certify_cmd->add_option("--scenario", certify.scenario, "builtin name or scenario JSON path")
      ->required();
  certify_cmd->add_option("--kinds", certify.kinds, "norm kinds")->capture_default_str();
  certify_cmd->add_option("--param", certify_params, "scenario parameter KEY=VALUE");
  certify_cmd->add_flag("--simulate", certify.simulate,
                        "run the ODE cross-check against the envelope");
  certify_cmd->add_option("--x0", certify.x0, "initial state for the cross-check");
  certify_cmd->add_option("--dump-scenario", certify.dump_scenario,
                          "write the resolved scenario JSON to this path");

  cli::SimulateOptions simulate;
  std::vector<std::string> simulate_params;
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "integrate the perturbed system, emit CSV");
  simulate_cmd->add_option("--scenario", simulate.scenario, "builtin name or scenario JSON path")
      ->required();
  simulate_cmd->add_option("--x0", simulate.x0, "initial state (default zeros)");
  simulate_cmd->add_option("--t0", simulate.t0, "start time")->capture_default_str();
  simulate_cmd->add_option("--tf", simulate.tf, "final time (default per scenario)");
  simulate_cmd->add_option("--points", simulate.points, "output grid size")->capture_default_str();
  simulate_cmd->add_flag("--envelope", simulate.envelope,
                         "append the variation-of-constants bound column");
  simulate_cmd->add_option("--kind", simulate.kind, "norm kind for the envelope")->capture_default_str();
  simulate_cmd->add_option("--param", simulate_params, "scenario parameter KEY=VALUE");
  simulate_cmd->add_option("--dump-scenario", simulate.dump_scenario,
                           "write the resolved scenario JSON to this path");

  cli::ClassifyOptions classify;
  CLI::App* classify_cmd =
      app.add_subcommand("classify", "probe a function's decay-class membership");
  classify_cmd->add_option("--fn", classify.fn,
                           "oscillatory | needle | example2-perturbation | zero")
      ->required();
  classify_cmd->add_option("--classes", classify.classes, "subset of V,AD,D")->capture_default_str();
  classify_cmd->add_option("--eta-grid", classify.eta_grid,
                           "eta resolution for the D probe")->capture_default_str();
  classify_cmd->add_option("--kind", classify.kind, "norm kind")->capture_default_str();

  cli::ReproduceOptions reproduce;
  CLI::App* reproduce_cmd =
      app.add_subcommand("reproduce", "re-run a published worked example end to end");
  reproduce_cmd->add_option("item", reproduce.item, "example1 | example2 | example3 | lemma2")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  try {
    apply_tolerances(tol_spec, global);
    apply_params(certify_params, certify.params);
    apply_params(simulate_params, simulate.params);
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return cli::kExitUsage;
  }
  if (const char* env_out = std::getenv("LOGNORM_OUT")) global.out_dir = env_out;

  try {
    if (mu_cmd->parsed()) return cli::run_mu(global, mu);
    if (certify_cmd->parsed()) return cli::run_certify(global, certify);
    if (simulate_cmd->parsed()) return cli::run_simulate(global, simulate);
    if (classify_cmd->parsed()) return cli::run_classify(global, classify);
    if (reproduce_cmd->parsed()) return cli::run_reproduce(global, reproduce);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kExitUsage;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kExitUsage;
  } catch (const lognorm::Error& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return cli::kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return cli::kExitNumeric;
  }
  return cli::kExitUsage;
}
