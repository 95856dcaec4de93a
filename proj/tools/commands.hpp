#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cli {

// Exit codes shared by every subcommand.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNotCertified = 3;
constexpr int kExitInconclusive = 4;
constexpr int kExitNumeric = 5;

struct GlobalOptions {
  std::string out_dir = "out";
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  double horizon = 0.0;  // 0 -> scenario default
  std::uint64_t seed = 0;
  bool json = false;
};

struct MuOptions {
  std::string matrix_source;
  std::string kinds = "1,2,inf";
};

struct CertifyOptions {
  std::string scenario;
  std::string kinds = "2";
  std::map<std::string, double> params;
  bool simulate = false;
  std::string x0;
  std::string dump_scenario;
};

struct SimulateOptions {
  std::string scenario;
  std::map<std::string, double> params;
  std::string x0;
  double t0 = 0.0;
  double tf = -1.0;  // <0 -> scenario default
  std::size_t points = 401;
  bool envelope = false;
  std::string kind = "2";
  std::string dump_scenario;
};

struct ClassifyOptions {
  std::string fn;
  std::string classes = "V,AD,D";
  std::size_t eta_grid = 64;
  std::string kind = "2";
};

struct ReproduceOptions {
  std::string item;
};

int run_mu(const GlobalOptions& g, const MuOptions& o);
int run_certify(const GlobalOptions& g, const CertifyOptions& o);
int run_simulate(const GlobalOptions& g, const SimulateOptions& o);
int run_classify(const GlobalOptions& g, const ClassifyOptions& o);
int run_reproduce(const GlobalOptions& g, const ReproduceOptions& o);

}  // namespace cli
