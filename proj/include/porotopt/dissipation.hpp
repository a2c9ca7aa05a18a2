#pragma once

#include <Eigen/Dense>

#include "porotopt/field.hpp"
#include "porotopt/grid.hpp"
#include "porotopt/material.hpp"

namespace porotopt {

// Total dissipation Phi = sum_c alpha_c |v_bar_c|^2 vol_c with cell-averaged
// velocities and alpha evaluated at the cell pressure and cell speed. This is
// the design objective; its discrete gradient is what the adjoint returns.
double total_dissipation(const StructuredGrid& g, const Eigen::ArrayXd& permeability,
                         const MaterialModel& model, const FlowState& flow);

double total_dissipation(const StructuredGrid& g, const DensityField& density,
                         const MaterialModel& model, const FlowState& flow);

}  // namespace porotopt
