#include <benchmark/benchmark.h>

#include "lognorm/certify.hpp"
#include "lognorm/funclass.hpp"
#include "lognorm/model.hpp"
#include "lognorm/odesim.hpp"
#include "lognorm/quadrature.hpp"

using lognorm::linalg::NormKind;
using lognorm::linalg::Vector;
using lognorm::model::builtin_scenario;

namespace {

void bm_integrate_example3(benchmark::State& state) {
  const auto s = builtin_scenario("example3");
  lognorm::ode::Rhs rhs = [&s](double t, std::span<const double> x,
                               std::span<double> dx) {
    const auto a = s.matrix.at(t);
    dx[0] = a(0, 0) * x[0] + a(0, 1) * x[1];
    dx[1] = a(1, 0) * x[0] + a(1, 1) * x[1];
  };
  for (auto _ : state)
    benchmark::DoNotOptimize(
        lognorm::ode::integrate_ode(rhs, Vector{1.0, 0.0}, 0.0, 4.0));
}
BENCHMARK(bm_integrate_example3);

void bm_cumulative_mu_example2(benchmark::State& state) {
  const auto s = builtin_scenario("example2");
  for (auto _ : state)
    benchmark::DoNotOptimize(
        lognorm::quad::cumulative_mu(s.matrix, NormKind::two(), 20.0, 400));
}
BENCHMARK(bm_cumulative_mu_example2);

void bm_certify_example2(benchmark::State& state) {
  const auto s = builtin_scenario("example2");
  lognorm::certify::Config config;
  config.horizon = 20.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        lognorm::certify::certify_scenario(s, NormKind::two(), config));
}
BENCHMARK(bm_certify_example2);

void bm_probe_d_window(benchmark::State& state) {
  const auto h = lognorm::funclass::oscillatory_signal();
  const std::vector<double> window{static_cast<double>(state.range(0))};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        lognorm::funclass::probe_d(h, window, 64, NormKind::two()));
}
BENCHMARK(bm_probe_d_window)->Arg(2)->Arg(5)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
