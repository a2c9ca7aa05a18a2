#pragma once

#include <optional>
#include <string>
#include <vector>

#include "porotopt/config.hpp"
#include "porotopt/topopt.hpp"

namespace porotopt::problems {

// Built-in benchmark cases, assembled entirely from their RunConfig seeds so
// explicit config keys can override any parameter.
std::vector<std::string> builtin_names();
bool is_builtin(const std::string& name);
cfg::RunConfig builtin_run_config(const std::string& name);

struct Assembled {
  topopt::DesignProblem problem;
  topopt::OptimizerSettings optimizer;
};

// Grid, boundary conditions, model, source, and design/optimizer settings
// from a run config. Boundary values use the grammar documented on
// cfg::RunConfig::boundaries.
Assembled build_problem(const cfg::RunConfig& rc);

// Closed-form optimal interface radius for the radial benchmark geometries
// (unit outer radius); empty when no oracle applies.
std::optional<double> interface_oracle(const cfg::RunConfig& rc);

}  // namespace porotopt::problems
