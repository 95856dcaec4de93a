#include "lognorm/scenario_json.hpp"

#include <stdexcept>

#include <json.hpp>

namespace lognorm::model {

using linalg::Matrix;
using nlohmann::json;

namespace {

json matrix_entries(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Matrix entries_to_matrix(const json& rows) {
  if (!rows.is_array() || rows.empty())
    throw std::invalid_argument("scenario json: matrix entries must be a 2-D array");
  const std::size_t r = rows.size();
  const std::size_t c = rows[0].size();
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c)
      throw std::invalid_argument("scenario json: ragged matrix entries");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  }
  if (!m.all_finite())
    throw std::invalid_argument("scenario json: non-finite matrix entry");
  return m;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["n"] = s.n;

  switch (s.matrix.kind()) {
    case MatrixFunction::Kind::Builtin:
      j["matrix"] = {{"builtin", s.matrix.tag()}};
      break;
    case MatrixFunction::Kind::Constant:
      j["matrix"] = {{"constant", matrix_entries(s.matrix.constant_value())}};
      break;
    case MatrixFunction::Kind::SampledGrid: {
      json entries = json::array();
      for (const Matrix& m : s.matrix.grid_values()) entries.push_back(matrix_entries(m));
      j["matrix"] = {{"grid", {{"ts", s.matrix.grid_times()}, {"entries", entries}}}};
      break;
    }
  }

  if (s.perturbation.has_value())
    j["perturbation"] = {{"builtin", s.perturbation->tag()}};
  else
    j["perturbation"] = "none";

  j["params"] = s.params;
  return j.dump(2);
}

Scenario scenario_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  if (!j.contains("name")) throw std::invalid_argument("scenario json: missing name");
  const std::string name = j["name"].get<std::string>();

  std::map<std::string, double> params;
  if (j.contains("params"))
    for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
      params[it.key()] = it.value().get<double>();

  if (!j.contains("matrix"))
    throw std::invalid_argument("scenario json: missing matrix");
  const json& jm = j["matrix"];

  if (jm.contains("builtin")) {
    // Builtins carry their own perturbation wiring.
    return builtin_scenario(jm["builtin"].get<std::string>(), params);
  }

  Scenario s;
  s.name = name;
  s.params = params;
  if (jm.contains("constant")) {
    s.matrix = MatrixFunction::constant(entries_to_matrix(jm["constant"]));
  } else if (jm.contains("grid")) {
    const json& jg = jm["grid"];
    std::vector<double> ts = jg["ts"].get<std::vector<double>>();
    std::vector<Matrix> values;
    for (const json& e : jg["entries"]) values.push_back(entries_to_matrix(e));
    s.matrix = MatrixFunction::sampled(std::move(ts), std::move(values));
    s.default_horizon = s.matrix.grid_times().back();
    s.default_sim_horizon = s.default_horizon;
  } else {
    throw std::invalid_argument("scenario json: matrix needs builtin|constant|grid");
  }
  s.n = s.matrix.dimension();
  if (j.contains("n") && j["n"].get<std::size_t>() != s.n)
    throw std::invalid_argument("scenario json: n does not match matrix dimension");

  if (j.contains("perturbation") && j["perturbation"].is_object() &&
      j["perturbation"].contains("builtin")) {
    const std::string ptag = j["perturbation"]["builtin"].get<std::string>();
    if (ptag != "none") {
      const Scenario donor = builtin_scenario(ptag, params);
      if (!donor.perturbation.has_value() || donor.n != s.n)
        throw std::invalid_argument("scenario json: incompatible builtin perturbation");
      s.perturbation = donor.perturbation;
    }
  }
  return s;
}

}  // namespace lognorm::model
