#include <benchmark/benchmark.h>

#include <random>

#include "lognorm/eigen_sym.hpp"
#include "lognorm/lyapunov.hpp"
#include "lognorm/norms.hpp"

using lognorm::linalg::Matrix;
using lognorm::linalg::NormKind;

namespace {

Matrix random_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-10.0, 10.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = entry(rng);
  return a;
}

Matrix random_hurwitz(std::size_t n, std::uint64_t seed) {
  Matrix a = random_matrix(n, seed);
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) off += std::abs(a(i, j));
    a(i, i) = -(off + 1.0);
  }
  return a;
}

void bm_log_norm_two(benchmark::State& state) {
  const Matrix a = random_matrix(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(lognorm::linalg::log_norm(a, NormKind::two()));
}
BENCHMARK(bm_log_norm_two)->Arg(2)->Arg(8)->Arg(16);

void bm_log_norm_one(benchmark::State& state) {
  const Matrix a = random_matrix(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(lognorm::linalg::log_norm(a, NormKind::one()));
}
BENCHMARK(bm_log_norm_one)->Arg(2)->Arg(16);

void bm_sym_eig(benchmark::State& state) {
  Matrix s = random_matrix(static_cast<std::size_t>(state.range(0)), 3);
  s += s.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(lognorm::linalg::sym_eig_max(s));
}
BENCHMARK(bm_sym_eig)->Arg(4)->Arg(8)->Arg(16);

void bm_lyapunov(benchmark::State& state) {
  const Matrix a = random_hurwitz(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(lognorm::linalg::lyapunov_solve(a));
}
BENCHMARK(bm_lyapunov)->Arg(2)->Arg(4)->Arg(8);

void bm_weighted_log_norm(benchmark::State& state) {
  const Matrix a = random_hurwitz(4, 5);
  const NormKind kind = NormKind::weighted(lognorm::linalg::lyapunov_solve(a));
  for (auto _ : state)
    benchmark::DoNotOptimize(lognorm::linalg::log_norm(a, kind));
}
BENCHMARK(bm_weighted_log_norm);

}  // namespace

BENCHMARK_MAIN();
