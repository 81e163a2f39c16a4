#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "isl/core.hpp"

namespace isl {

/// Problem definition document:
///
///   { "N": 2, "alpha": 0.5, "a": 1.0,
///     "potential": { "type": "zero" } }
///
/// potential variants:
///   {"type": "zero"}
///   {"type": "constant", "matrix": [row-major N*N]}
///   {"type": "grid", "nodes": [x_0, ...], "values": [[row-major N*N], ...]}
///   {"type": "builtin", "name": "sin2x_diag" | "fourier" | "half_constant", "params": {...}}
///
/// Unknown keys are rejected. Errors are ConfigError with the JSON path of the field.
ProblemSpec parse_problem(const nlohmann::json& doc);
ProblemSpec parse_problem_text(const std::string& text);
ProblemSpec load_problem_file(const std::string& path);

}  // namespace isl
