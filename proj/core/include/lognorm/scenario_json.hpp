#pragma once

#include <string>

#include "lognorm/model.hpp"

namespace lognorm::model {

/// Scenario schema:
/// {
///   "name": "...", "n": 2,
///   "matrix": {"builtin": "example2"} | {"constant": [[..],[..]]}
///           | {"grid": {"ts": [...], "entries": [[[..]],[..]]]}},
///   "perturbation": {"builtin": "example2"} | "none",
///   "params": {"lambda": 1.0, ...}
/// }
/// Builtin scenarios round-trip through their name + params; dumping and
/// re-ingesting yields a scenario with identical evaluations.
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& json_text);

}  // namespace lognorm::model
