#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lognorm/model.hpp"
#include "lognorm/norms.hpp"
#include "lognorm/odesim.hpp"
#include "lognorm/quadrature.hpp"

using lognorm::linalg::Matrix;
using lognorm::linalg::NormKind;
using lognorm::linalg::Vector;
using lognorm::model::MatrixFunction;
using lognorm::model::builtin_scenario;
using lognorm::ode::FundamentalMatrix;
using lognorm::ode::IntegratorSettings;
using lognorm::ode::Rhs;
using lognorm::ode::SolveStatus;
using lognorm::ode::Trajectory;
using lognorm::ode::fundamental_matrix;
using lognorm::ode::integrate_ode;
using lognorm::ode::transition_matrix;
using lognorm::ode::write_trajectory_csv;

namespace {

const Matrix kA3{{-1, 3}, {-3, -2}};

Rhs linear_rhs(const MatrixFunction& mf) {
  return [&mf](double t, std::span<const double> x, std::span<double> dx) {
    const Matrix a = mf.at(t);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
      dx[i] = s;
    }
  };
}

std::vector<double> linspace(double a, double b, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

}  // namespace

TEST_SUITE("odesim") {

TEST_CASE("scalar linear decay hits the closed form") {
  Rhs rhs = [](double, std::span<const double> x, std::span<double> dx) {
    dx[0] = -x[0];
  };
  const Trajectory traj = integrate_ode(rhs, Vector{1.0}, 0.0, 5.0);
  REQUIRE(traj.status == SolveStatus::Ok);
  CHECK(std::abs(traj.final_state()[0] - std::exp(-5.0)) < 1e-7);
  CHECK(traj.accepted_steps > 0);
}

TEST_CASE("degenerate span returns the single initial sample") {
  Rhs rhs = [](double, std::span<const double> x, std::span<double> dx) {
    dx[0] = -x[0];
  };
  const Trajectory traj = integrate_ode(rhs, Vector{3.0}, 0.0, 0.0);
  CHECK(traj.ts == std::vector<double>{0.0});
  CHECK(traj.final_state()[0] == 3.0);
}

TEST_CASE("example3 trajectory follows the analytic fundamental solution") {
  const auto s = builtin_scenario("example3", {{"lambda", 1.0}});
  const Vector x0{s.analytic_fundamental(0.0)(0, 0), s.analytic_fundamental(0.0)(1, 0)};
  const Trajectory traj = integrate_ode(linear_rhs(s.matrix), x0, 0.0, 3.0);
  REQUIRE(traj.status == SolveStatus::Ok);
  const Matrix phi3 = s.analytic_fundamental(3.0);
  CHECK(std::abs(traj.final_state()[0] - phi3(0, 0)) < 1e-5);
  CHECK(std::abs(traj.final_state()[1] - phi3(1, 0)) < 1e-5);
}

TEST_CASE("decay bound from the negative Euclidean log norm") {
  // mu_2 of the pinned matrix is -1, so ||x(t)||_2 <= e^{-t} ||x0||_2.
  const auto mf = MatrixFunction::constant(kA3);
  IntegratorSettings st;
  st.abs_tol = 1e-14;
  const Vector x0{2.0, -1.5};
  const Trajectory traj = integrate_ode(linear_rhs(mf), x0, 0.0, 20.0, st);
  REQUIRE(traj.status == SolveStatus::Ok);
  const double n0 = lognorm::linalg::vec_norm(x0, NormKind::two());
  const double nf =
      lognorm::linalg::vec_norm(traj.final_state(), NormKind::two());
  CHECK(nf <= std::exp(-20.0) * n0 * (1.0 + 1e-3));
}

TEST_CASE("fixed-step order of accuracy") {
  // With the controller pinned to a fixed step, halving h must cut the
  // error by far more than 4x for a fifth-order scheme.
  Rhs rhs = [](double, std::span<const double> x, std::span<double> dx) {
    dx[0] = -x[0];
  };
  auto run = [&rhs](double h) {
    IntegratorSettings st;
    st.rel_tol = 1e3;  // never reject
    st.abs_tol = 1e3;
    st.initial_step = h;
    st.max_step = h;
    const Trajectory t = integrate_ode(rhs, Vector{1.0}, 0.0, 2.0, st);
    return std::abs(t.final_state()[0] - std::exp(-2.0));
  };
  const double coarse = run(0.1);
  const double fine = run(0.05);
  CHECK(coarse / fine >= 4.0);
}

TEST_CASE("non-finite rhs ends in a reported step underflow") {
  Rhs rhs = [](double t, std::span<const double> x, std::span<double> dx) {
    dx[0] = t < 0.5 ? -x[0] : std::numeric_limits<double>::quiet_NaN();
  };
  const Trajectory traj = integrate_ode(rhs, Vector{1.0}, 0.0, 1.0);
  CHECK(traj.status == SolveStatus::StepUnderflow);
  CHECK(traj.end_time() <= 0.5);
  for (const auto& x : traj.states) CHECK(std::isfinite(x[0]));
}

TEST_CASE("max-steps budget reports a partial trajectory") {
  Rhs rhs = [](double, std::span<const double> x, std::span<double> dx) {
    dx[0] = -x[0];
  };
  IntegratorSettings st;
  st.max_steps = 3;
  st.max_step = 1e-3;
  const Trajectory traj = integrate_ode(rhs, Vector{1.0}, 0.0, 5.0, st);
  CHECK(traj.status == SolveStatus::MaxStepsExceeded);
  CHECK(traj.end_time() < 5.0);
  CHECK(traj.ts.size() == traj.accepted_steps + 1);
}

TEST_CASE("fundamental matrix of a diagonal system is the matrix exponential") {
  const auto mf = MatrixFunction::constant(Matrix::diagonal(Vector{-1.0, -2.0}));
  const auto grid = linspace(0.0, 3.0, 13);
  const FundamentalMatrix phi = fundamental_matrix(mf, grid);
  REQUIRE(phi.status == SolveStatus::Ok);
  CHECK_FALSE(phi.near_singular);
  // grid samples go through the cubic Hermite dense output, whose error
  // (~tol^{4/5}) dominates the per-step tolerances here
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(std::abs(phi.values[k](0, 0) - std::exp(-grid[k])) < 1e-8);
    CHECK(std::abs(phi.values[k](1, 1) - std::exp(-2.0 * grid[k])) < 1e-8);
    CHECK(std::abs(phi.values[k](0, 1)) < 1e-12);
  }
}

TEST_CASE("example3 fundamental matrix matches the analytic solution") {
  const auto s = builtin_scenario("example3", {{"lambda", 1.0}});
  const auto grid = linspace(0.0, 4.0, 41);
  const FundamentalMatrix phi = fundamental_matrix(s.matrix, grid);
  REQUIRE(phi.status == SolveStatus::Ok);

  // normalize the analytic fundamental solution to Phi(0) = I
  const Matrix phi0 = s.analytic_fundamental(0.0);
  lognorm::linalg::LuFactor lu0(phi0.transpose());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Matrix expected =
        lu0.solve(s.analytic_fundamental(grid[k]).transpose()).transpose();
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        CHECK(std::abs(phi.values[k](i, j) - expected(i, j)) < 1e-4);
  }
}

TEST_CASE("Liouville determinant identity on example2") {
  const auto s = builtin_scenario("example2");
  const auto grid = linspace(0.0, 5.0, 11);
  // entries decay to ~1e-10 by t = 5; the absolute floor must sit far
  // below that for the determinant's relative check to be meaningful
  IntegratorSettings st;
  st.rel_tol = 1e-12;
  st.abs_tol = 1e-16;
  const FundamentalMatrix phi = fundamental_matrix(s.matrix, grid, st);
  REQUIRE(phi.status == SolveStatus::Ok);
  auto trace = [&s](double t) {
    const Matrix a = s.matrix.at(t);
    return a(0, 0) + a(1, 1);
  };
  const auto cum = lognorm::quad::cumulative(trace, 0.0, 5.0, 100, 1e-12);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    lognorm::linalg::LuFactor lu(phi.values[k]);
    const double det = lu.determinant();
    const double expected = std::exp(cum.value_at(grid[k]));
    CHECK(std::abs(det - expected) <= 1e-3 * std::abs(expected));
  }
}

TEST_CASE("transition matrix at coincident times is the identity") {
  const auto s = builtin_scenario("example3");
  const auto grid = linspace(0.0, 2.0, 9);
  const FundamentalMatrix phi = fundamental_matrix(s.matrix, grid);
  const Matrix tr = transition_matrix(phi, 1.0, 1.0);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(std::abs(tr(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);
  CHECK_THROWS_AS(transition_matrix(phi, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(transition_matrix(phi, 0.33, 0.0), std::invalid_argument);
}

TEST_CASE("example3 transition norm is the pure exponential decay") {
  const auto s = builtin_scenario("example3", {{"lambda", 1.0}});
  const auto grid = linspace(0.0, 3.0, 13);
  const FundamentalMatrix phi = fundamental_matrix(s.matrix, grid);
  for (std::size_t j = 0; j < grid.size(); j += 3)
    for (std::size_t i = j; i < grid.size(); i += 4) {
      const Matrix tr = transition_matrix(phi, grid[i], grid[j]);
      const double norm = lognorm::linalg::mat_induced_norm(tr, NormKind::two());
      CHECK(std::abs(norm - std::exp(-(grid[i] - grid[j]))) < 1e-4);
    }
}

TEST_CASE("constant-system transition norm obeys the log-norm bound") {
  const auto mf = MatrixFunction::constant(kA3);
  const auto grid = linspace(0.0, 2.0, 9);
  const FundamentalMatrix phi = fundamental_matrix(mf, grid);
  const Matrix tr = transition_matrix(phi, 1.0, 0.0);  // t - tau = 1
  const double norm = lognorm::linalg::mat_induced_norm(tr, NormKind::two());
  CHECK(norm <= std::exp(-1.0) + 1e-6);
}

TEST_CASE("property: transition cocycle") {
  const auto s = builtin_scenario("example3", {{"lambda", 0.5}});
  const auto grid = linspace(0.0, 2.5, 11);
  const FundamentalMatrix phi = fundamental_matrix(s.matrix, grid);
  std::mt19937_64 rng(53);
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::array<std::size_t, 3> idx{pick(rng), pick(rng), pick(rng)};
    std::sort(idx.begin(), idx.end());
    const auto [s_i, tau_i, t_i] = std::tuple{idx[0], idx[1], idx[2]};
    const Matrix lhs = transition_matrix(phi, grid[t_i], grid[tau_i]) *
                       transition_matrix(phi, grid[tau_i], grid[s_i]);
    const Matrix rhs = transition_matrix(phi, grid[t_i], grid[s_i]);
    CHECK((lhs - rhs).frobenius_norm() < 1e-8);
  }
}

TEST_CASE("property: transition norms bounded by the cumulative log norm") {
  struct Case {
    MatrixFunction mf;
    double horizon;
  };
  std::vector<Case> cases;
  cases.push_back({builtin_scenario("example2").matrix, 5.0});
  cases.push_back({builtin_scenario("example3").matrix, 3.0});
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    Matrix a(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) a(i, j) = entry(rng);
    cases.push_back({MatrixFunction::constant(a), 1.0});
  }

  const std::array<NormKind, 3> kinds = {NormKind::one(), NormKind::two(),
                                         NormKind::inf()};
  for (const auto& c : cases) {
    const auto grid = linspace(0.0, c.horizon, 6);
    const FundamentalMatrix phi = fundamental_matrix(c.mf, grid);
    REQUIRE(phi.status == SolveStatus::Ok);
    for (const auto& kind : kinds) {
      const auto cum = lognorm::quad::cumulative_mu(c.mf, kind, c.horizon, 64, 1e-11);
      for (std::size_t j = 0; j < grid.size(); ++j)
        for (std::size_t i = j; i < grid.size(); ++i) {
          const Matrix tr = transition_matrix(phi, grid[i], grid[j]);
          const double lhs = lognorm::linalg::mat_induced_norm(tr, kind);
          const double exponent = cum.value_at(grid[i]) - cum.value_at(grid[j]);
          // compare in the log domain; the exponent can reach +-600
          CHECK(std::log(std::max(lhs, 1e-300)) <=
                exponent + std::log1p(1e-6) + 1e-9);
        }
    }
  }
}

TEST_CASE("dense output and CSV emission") {
  Rhs rhs = [](double t, std::span<const double>, std::span<double> dx) {
    dx[0] = std::cos(t);
  };
  const Trajectory traj = integrate_ode(rhs, Vector{0.0}, 0.0, 6.0);
  for (double t = 0.0; t <= 6.0; t += 0.37)
    CHECK(std::abs(traj.sample(t)[0] - std::sin(t)) < 1e-6);
  CHECK_THROWS_AS(traj.sample(6.5), std::domain_error);

  std::ostringstream csv;
  const auto grid = linspace(0.0, 6.0, 4);
  write_trajectory_csv(csv, traj, grid);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x1");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == grid.size());
}

}  // TEST_SUITE
