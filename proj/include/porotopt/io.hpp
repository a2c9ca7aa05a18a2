#pragma once

#include <Eigen/Dense>

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "porotopt/field.hpp"
#include "porotopt/grid.hpp"

namespace porotopt::io {

// Round-trippable decimal representation (%.17g; the 'g' rules trim trailing
// zeros). All CSV and VTK numbers go through this so outputs are bit-identical
// across runs.
std::string format_double(double v);

// Column order is frozen: cell,x,y,p,speed. y is 0 for 1D and radial grids.
void write_fields_csv(std::ostream& os, const StructuredGrid& grid, const FlowState& flow);

// Column order is frozen: cell,x,y,rho,rho_filtered,k.
void write_density_csv(std::ostream& os, const StructuredGrid& grid, const Eigen::ArrayXd& rho,
                       const Eigen::ArrayXd& rho_filtered, const Eigen::ArrayXd& permeability);

// Column order is frozen: iteration,phi,volume_fraction,change.
void write_history_csv(std::ostream& os, const std::vector<double>& phi,
                       const std::vector<double>& volume_fraction,
                       const std::vector<double>& change);

// Legacy ASCII VTK with one scalar array per named cell field, placed at cell
// centers: STRUCTURED_POINTS for Cartesian grids, RECTILINEAR_GRID for 1D and
// radial profiles.
using NamedField = std::pair<std::string, Eigen::ArrayXd>;
void write_vtk(std::ostream& os, const StructuredGrid& grid, const std::vector<NamedField>& fields);

// Cell speed array (hypot of the cell-average velocity components).
Eigen::ArrayXd cell_speeds(const StructuredGrid& grid, const FlowState& flow);

// Creates the directory (and parents) and opens `name` inside it for writing.
// Throws std::runtime_error if the file cannot be created.
void write_text_file(const std::string& directory, const std::string& name,
                     const std::string& content);

}  // namespace porotopt::io
