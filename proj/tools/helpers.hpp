#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "commands.hpp"
#include "lognorm/matrix.hpp"
#include "lognorm/model.hpp"
#include "lognorm/norms.hpp"

namespace cli {

// Inline JSON text or a file path holding it.
lognorm::linalg::Matrix parse_matrix(const std::string& source);
lognorm::linalg::Vector parse_vector(const std::string& source);

// "1,2,inf" and, where a constant matrix is at hand, "H" (the norm weighted
// by the matrix's Lyapunov solution).
std::vector<lognorm::linalg::NormKind> parse_kinds(
    const std::string& spec, const lognorm::linalg::Matrix* for_weighted);

// Builtin name or path to a scenario JSON file.
lognorm::model::Scenario resolve_scenario(
    const std::string& source, const std::map<std::string, double>& params);

std::filesystem::path ensure_out_dir(const GlobalOptions& g,
                                     const std::string& subdir = "");

std::vector<double> linspace(double a, double b, std::size_t count);

void write_series_csv(const std::filesystem::path& path, const char* header,
                      std::span<const double> ts, std::span<const double> values);

}  // namespace cli
