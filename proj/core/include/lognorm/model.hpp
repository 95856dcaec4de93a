#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lognorm/matrix.hpp"
#include "lognorm/norms.hpp"

namespace lognorm::model {

/// Evaluatable n x n matrix A(t) defined for t >= 0: a constant matrix, a
/// named closed-form family, or a sampled grid interpolated linearly.
/// Immutable after construction; evaluators are re-entrant.
class MatrixFunction {
 public:
  enum class Kind { Constant, Builtin, SampledGrid };

  /// Default-constructed value is a placeholder; evaluate only functions
  /// built through the factories below.
  MatrixFunction() = default;

  static MatrixFunction constant(linalg::Matrix a);
  static MatrixFunction from_callable(std::size_t n, std::string tag,
                                      std::function<linalg::Matrix(double)> fn);
  static MatrixFunction sampled(std::vector<double> ts,
                                std::vector<linalg::Matrix> values);

  /// Evaluate A(t). Exact formula for constants/builtins; linear
  /// interpolation within a sampled grid. Throws std::domain_error for
  /// t < 0 or t outside a grid's range.
  linalg::Matrix at(double t) const;

  std::size_t dimension() const { return n_; }
  Kind kind() const { return kind_; }
  const std::string& tag() const { return tag_; }

  // Grid accessors (SampledGrid only; empty otherwise).
  const std::vector<double>& grid_times() const { return grid_ts_; }
  const std::vector<linalg::Matrix>& grid_values() const { return grid_values_; }
  const linalg::Matrix& constant_value() const;

 private:
  std::size_t n_ = 0;
  Kind kind_ = Kind::Constant;
  std::string tag_;
  std::function<linalg::Matrix(double)> fn_;
  std::vector<double> grid_ts_;
  std::vector<linalg::Matrix> grid_values_;
  std::optional<linalg::Matrix> constant_;
};

/// Perturbation w(x, t) with an optional time-only majorant w~(t) such
/// that ||w(x,t)|| <= ||w~(t)|| for all x. The majorant is stored as a
/// vector function so its norm is exact in every norm kind.
class Perturbation {
 public:
  using Eval = std::function<void(double t, std::span<const double> x,
                                  std::span<double> out)>;
  using Majorant = std::function<void(double t, std::span<double> out)>;

  static Perturbation make(std::size_t n, std::string tag, Eval eval,
                           Majorant majorant = nullptr);

  void eval(double t, std::span<const double> x, std::span<double> out) const;
  bool has_envelope() const { return static_cast<bool>(majorant_); }
  linalg::Vector majorant(double t) const;
  /// ||w~(t)|| in the requested norm; throws if no majorant is stored.
  double envelope_norm(double t, const linalg::NormKind& kind) const;

  std::size_t dimension() const { return n_; }
  const std::string& tag() const { return tag_; }

 private:
  std::size_t n_ = 0;
  std::string tag_;
  Eval eval_;
  Majorant majorant_;
};

/// A named system: A(t), optional perturbation, parameters, and (when the
/// closed form is known) analytic oracles for the fundamental solution and
/// a particular solution.
struct Scenario {
  std::string name;
  std::size_t n = 0;
  MatrixFunction matrix;
  std::optional<Perturbation> perturbation;
  std::map<std::string, double> params;

  std::function<linalg::Matrix(double)> analytic_fundamental;  // may be null
  std::function<linalg::Vector(double)> analytic_particular;   // may be null

  double default_horizon = 20.0;      // certification horizon
  double default_sim_horizon = 10.0;  // simulation horizon

  Scenario without_perturbation() const;
};

/// Construct one of the builtin scenarios:
///   example2    params: optional beta_const (else beta(t) = t^4)
///   example3    params: lambda > 0 (default 1)
///   lti_hurwitz params: optional a11,a12,a21,a22 (default [[-1,3],[-3,-2]])
/// "custom-grid" requires grid data and is only reachable through the JSON
/// schema (scenario_from_json) or custom_grid_scenario.
Scenario builtin_scenario(const std::string& name,
                          const std::map<std::string, double>& params = {});

Scenario custom_grid_scenario(std::vector<double> ts,
                              std::vector<linalg::Matrix> values);

}  // namespace lognorm::model
