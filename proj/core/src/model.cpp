#include "lognorm/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lognorm/errors.hpp"

namespace lognorm::model {

using linalg::Matrix;
using linalg::Vector;

MatrixFunction MatrixFunction::constant(Matrix a) {
  if (!a.square()) throw std::invalid_argument("MatrixFunction: matrix must be square");
  MatrixFunction mf;
  mf.n_ = a.rows();
  mf.kind_ = Kind::Constant;
  mf.tag_ = "constant";
  mf.constant_ = std::move(a);
  return mf;
}

MatrixFunction MatrixFunction::from_callable(std::size_t n, std::string tag,
                                             std::function<Matrix(double)> fn) {
  MatrixFunction mf;
  mf.n_ = n;
  mf.kind_ = Kind::Builtin;
  mf.tag_ = std::move(tag);
  mf.fn_ = std::move(fn);
  return mf;
}

MatrixFunction MatrixFunction::sampled(std::vector<double> ts,
                                       std::vector<Matrix> values) {
  if (ts.size() < 2 || ts.size() != values.size())
    throw std::invalid_argument("MatrixFunction::sampled: need matching grids, >= 2 nodes");
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (!(ts[i] > ts[i - 1]))
      throw std::invalid_argument("MatrixFunction::sampled: times must be strictly increasing");
  const std::size_t n = values.front().rows();
  for (const auto& v : values)
    if (!v.square() || v.rows() != n)
      throw std::invalid_argument("MatrixFunction::sampled: inconsistent matrix sizes");
  MatrixFunction mf;
  mf.n_ = n;
  mf.kind_ = Kind::SampledGrid;
  mf.tag_ = "grid";
  mf.grid_ts_ = std::move(ts);
  mf.grid_values_ = std::move(values);
  return mf;
}

const Matrix& MatrixFunction::constant_value() const {
  if (!constant_) throw std::logic_error("MatrixFunction: not a constant");
  return *constant_;
}

Matrix MatrixFunction::at(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("MatrixFunction::at: t must be >= 0");
  switch (kind_) {
    case Kind::Constant:
      if (!constant_) throw std::logic_error("MatrixFunction::at: placeholder value");
      return *constant_;
    case Kind::Builtin: {
      Matrix a = fn_(t);
      if (!a.all_finite()) throw Error("MatrixFunction::at: non-finite evaluation");
      return a;
    }
    case Kind::SampledGrid: {
      if (t < grid_ts_.front() || t > grid_ts_.back())
        throw std::domain_error("MatrixFunction::at: t outside sampled range");
      auto it = std::lower_bound(grid_ts_.begin(), grid_ts_.end(), t);
      if (it == grid_ts_.end()) return grid_values_.back();
      std::size_t hi = static_cast<std::size_t>(it - grid_ts_.begin());
      if (grid_ts_[hi] == t) return grid_values_[hi];
      std::size_t lo = hi - 1;
      const double w = (t - grid_ts_[lo]) / (grid_ts_[hi] - grid_ts_[lo]);
      Matrix a = grid_values_[lo];
      for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
          a(i, j) += w * (grid_values_[hi](i, j) - grid_values_[lo](i, j));
      return a;
    }
  }
  throw std::logic_error("MatrixFunction::at: unreachable");
}

Perturbation Perturbation::make(std::size_t n, std::string tag, Eval eval,
                                Majorant majorant) {
  Perturbation p;
  p.n_ = n;
  p.tag_ = std::move(tag);
  p.eval_ = std::move(eval);
  p.majorant_ = std::move(majorant);
  return p;
}

void Perturbation::eval(double t, std::span<const double> x,
                        std::span<double> out) const {
  if (out.size() != n_) throw std::invalid_argument("Perturbation::eval: bad output size");
  eval_(t, x, out);
}

Vector Perturbation::majorant(double t) const {
  if (!majorant_) throw std::logic_error("Perturbation::majorant: no envelope stored");
  Vector w(n_);
  majorant_(t, w);
  return w;
}

double Perturbation::envelope_norm(double t, const linalg::NormKind& kind) const {
  const Vector w = majorant(t);
  return linalg::vec_norm(w, kind);
}

Scenario Scenario::without_perturbation() const {
  Scenario s = *this;
  s.perturbation.reset();
  return s;
}

namespace {

Scenario make_example2(const std::map<std::string, double>& params) {
  Scenario s;
  s.name = "example2";
  s.n = 2;
  s.params = params;

  const bool const_beta = params.count("beta_const") > 0;
  const double beta_c = const_beta ? params.at("beta_const") : 0.0;
  auto beta = [const_beta, beta_c](double t) {
    return const_beta ? beta_c : t * t * t * t;
  };

  s.matrix = MatrixFunction::from_callable(2, "example2", [beta](double t) {
    const double a1 = t + 1.0;
    const double a2 = 3.0 + t + std::sin(t);
    const double b = beta(t);
    return Matrix{{-a1, b}, {-b, -a2}};
  });

  auto w = [](double t, std::span<double> out) {
    out[0] = std::pow(t, 7.0 / 8.0);
    out[1] = 100.0 * std::cos(t);
  };
  s.perturbation = Perturbation::make(
      2, "example2",
      [w](double t, std::span<const double>, std::span<double> out) { w(t, out); },
      [w](double t, std::span<double> out) { w(t, out); });

  s.default_horizon = 20.0;
  s.default_sim_horizon = 5.0;  // beta = t^4 spins fast beyond this
  return s;
}

Scenario make_example3(const std::map<std::string, double>& params) {
  double lambda = 1.0;
  if (auto it = params.find("lambda"); it != params.end()) lambda = it->second;
  if (!(lambda > 0.0))
    throw std::invalid_argument("example3: lambda must be > 0");

  Scenario s;
  s.name = "example3";
  s.n = 2;
  s.params = params;
  s.params["lambda"] = lambda;

  s.matrix = MatrixFunction::from_callable(2, "example3", [lambda](double t) {
    const double e = std::exp(t);
    return Matrix{{-lambda, e}, {-e, -lambda}};
  });

  auto h = [lambda](double t, std::span<double> out) {
    const double e = std::exp(t);
    out[0] = lambda * std::sin(e);
    out[1] = lambda * std::cos(e);
  };
  s.perturbation = Perturbation::make(
      2, "example3",
      [h](double t, std::span<const double>, std::span<double> out) { h(t, out); },
      [h](double t, std::span<double> out) { h(t, out); });

  s.analytic_fundamental = [lambda](double t) {
    const double e = std::exp(t);
    const double d = std::exp(-lambda * t);
    return Matrix{{d * std::sin(e), -d * std::cos(e)},
                  {d * std::cos(e), d * std::sin(e)}};
  };
  s.analytic_particular = [lambda](double t) {
    const double e = std::exp(t);
    const double f = 1.0 - std::exp(-lambda * t);
    return Vector{f * std::sin(e), f * std::cos(e)};
  };

  s.default_horizon = 60.0;
  s.default_sim_horizon = 4.0;
  return s;
}

Scenario make_lti_hurwitz(const std::map<std::string, double>& params) {
  auto get = [&params](const char* key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  };
  Matrix a{{get("a11", -1.0), get("a12", 3.0)},
           {get("a21", -3.0), get("a22", -2.0)}};

  Scenario s;
  s.name = "lti_hurwitz";
  s.n = 2;
  s.params = params;
  s.matrix = MatrixFunction::constant(a);
  s.default_horizon = 20.0;
  s.default_sim_horizon = 10.0;
  return s;
}

}  // namespace

Scenario builtin_scenario(const std::string& name,
                          const std::map<std::string, double>& params) {
  if (name == "example2") return make_example2(params);
  if (name == "example3") return make_example3(params);
  if (name == "lti_hurwitz") return make_lti_hurwitz(params);
  if (name == "custom-grid")
    throw std::invalid_argument(
        "builtin_scenario: custom-grid needs grid data; supply a scenario JSON");
  throw std::invalid_argument("builtin_scenario: unknown scenario '" + name + "'");
}

Scenario custom_grid_scenario(std::vector<double> ts, std::vector<Matrix> values) {
  Scenario s;
  s.name = "custom-grid";
  s.matrix = MatrixFunction::sampled(std::move(ts), std::move(values));
  s.n = s.matrix.dimension();
  s.default_horizon = s.matrix.grid_times().back();
  s.default_sim_horizon = s.default_horizon;
  return s;
}

}  // namespace lognorm::model
