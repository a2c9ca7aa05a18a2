#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

#include "porotopt/field.hpp"
#include "porotopt/grid.hpp"
#include "porotopt/material.hpp"

namespace porotopt {

struct SolverSettings {
  double picard_tol = 1e-10;       // relative pressure and velocity change between sweeps
  int picard_max_iterations = 200;
  double linear_tol = 1e-12;       // relative residual of each linear solve
  // Under-relaxation of the state fed into the drag multiplier. 0 picks a
  // per-law default (0.7 for the pressure-dependent laws, 1 otherwise).
  double relaxation = 0.0;

  double effective_relaxation(const MaterialModel& m) const {
    if (relaxation > 0.0) return relaxation;
    return (m.law == DragLaw::Barus || m.law == DragLaw::LinearizedBarus) ? 0.7 : 1.0;
  }
};

class PicardDivergence : public std::runtime_error {
 public:
  PicardDivergence(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

// Per-face solver topology: adjacency, metric factors, and the boundary
// condition resolved from the grid's tagged segments. Fluxes and velocities
// are oriented along +axis; `cell_minus` is on the low-coordinate side.
struct FaceRecord {
  enum class Kind { Interior, Dirichlet, Neumann };
  int cell_minus = -1;
  int cell_plus = -1;
  double area = 0.0;
  double geo_minus = 0.0;  // half flux-resistance integral on the minus side
  double geo_plus = 0.0;
  Kind kind = Kind::Interior;
  double bc_value = 0.0;  // Dirichlet: p0. Neumann: +axis velocity component.
  double out_sign = 0.0;  // boundary faces: +1 right/top boundary, -1 left/bottom

  int adjacent_cell() const { return cell_minus >= 0 ? cell_minus : cell_plus; }
};

struct FaceSet {
  std::vector<FaceRecord> x;
  std::vector<FaceRecord> y;
  static FaceSet build(const StructuredGrid& grid, const BoundaryConditions& bcs);
};

// mu0 * sum(geo/k) over the one or two half segments of the face. Multiplied
// by the drag multiplier this is the momentum resistance: R * g * F = dp.
double face_base_resistance(const FaceRecord& f, const Eigen::ArrayXd& permeability, double mu0);

// Face pressures for the drag multiplier: arithmetic mean of the adjacent
// cell pressures, with the boundary value standing in on Dirichlet faces and
// the cell value on Neumann faces.
Eigen::ArrayXd face_pressures(const std::vector<FaceRecord>& faces, const Eigen::ArrayXd& p);

// Mean of the transverse face values around each face (the tangential
// reconstruction behind face speeds): four neighbours in the interior, two at
// the boundary. Zero-size outputs for 1D grids.
void tangential_means(const StructuredGrid& grid, const FaceField& v, Eigen::ArrayXd& tx,
                      Eigen::ArrayXd& ty);

// Face speeds |v| including the reconstructed tangential component.
void face_speeds(const StructuredGrid& grid, const FaceField& v, Eigen::ArrayXd& sx,
                 Eigen::ArrayXd& sy);

// Solves alpha v + grad p = 0, div v = q with the two-point flux scheme and
// Picard iteration on the drag multiplier (first sweep = Darcy solution).
// Exact per-segment resistance integrals make piecewise-constant-k Darcy
// solutions machine-exact on all grid geometries.
FlowState solve_flow(const StructuredGrid& grid, const Eigen::ArrayXd& permeability,
                     const MaterialModel& model, const BoundaryConditions& bcs,
                     const Eigen::ArrayXd& source, const SolverSettings& settings = {});
FlowState solve_flow(const StructuredGrid& grid, const Eigen::ArrayXd& permeability,
                     const MaterialModel& model, const BoundaryConditions& bcs,
                     double uniform_source = 0.0, const SolverSettings& settings = {});

// |net boundary outflow - integrated source| relative to the larger of the
// two gross rates.
double mass_balance_error(const StructuredGrid& grid, const BoundaryConditions& bcs,
                          const FlowState& flow, const Eigen::ArrayXd& source);

// Net volumetric outflow through all boundary faces.
double boundary_outflow(const StructuredGrid& grid, const BoundaryConditions& bcs,
                        const FlowState& flow);

}  // namespace porotopt
