#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "porotopt/field.hpp"
#include "porotopt/grid.hpp"
#include "porotopt/material.hpp"
#include "porotopt/primal.hpp"

namespace porotopt::power {

// A face-centered direction in which the solution may be perturbed while
// staying kinematically admissible: zero discrete divergence in every cell
// and zero normal component on velocity boundaries.
struct AdmissiblePerturbation {
  std::string id;
  FaceField dv;
};

// Largest absolute net cell outflux of the field.
double max_cell_divergence(const StructuredGrid& grid, const FaceField& dv);

// Throws std::invalid_argument if dv is nonzero on a velocity boundary face
// or its per-cell divergence exceeds tol relative to the largest face flux.
void check_admissible(const StructuredGrid& grid, const BoundaryConditions& bcs,
                      const FaceField& dv, double tol = 1e-12);

// Power functional at the solver's face-flux quadrature:
//   Psi(w) = sum_f 1/2 R_f g_f F_f^2 + sum_{pressure faces} out_sign F_f p0.
// The first sum runs over every face (velocity-boundary fluxes enter as
// constants), with the half-segment resistances R_f of the flow solver, so a
// Darcy solution is a discrete stationary point of Psi exactly. For
// pressure-dependent drag the multiplier is frozen at *frozen_pressure
// (required non-null); the pressure direction is tested separately through
// pressure_failure_term.
double psi(const StructuredGrid& grid, const Eigen::ArrayXd& permeability,
           const MaterialModel& model, const BoundaryConditions& bcs, const FaceField& w,
           const Eigen::ArrayXd* frozen_pressure = nullptr);

// +-{1e-2, 5e-3, ..., 1.5625e-4}: seven magnitudes, both signs.
std::vector<double> default_epsilon_ladder();

struct StationarityFit {
  std::string perturbation_id;
  double a1 = 0.0;            // fitted first-order coefficient of eps
  double a2 = 0.0;            // fitted quadratic coefficient
  double predicted_a1 = 0.0;  // drag-linearization integral at the solution
  double psi_at_solution = 0.0;
};

// Least-squares fit of Psi(v + eps dv) - Psi(v) = a1 eps + a2 eps^2 over the
// ladder, alongside the predicted first-order coefficient
//   sum_f 1/2 R_f F_f^2 (dg/ds) (ds/deps).
// a1 vanishes (to fit noise) exactly when the drag multiplier is independent
// of the perturbed state.
StationarityFit mpt_stationarity_check(const StructuredGrid& grid,
                                       const Eigen::ArrayXd& permeability,
                                       const MaterialModel& model, const BoundaryConditions& bcs,
                                       const FlowState& solution,
                                       const AdmissiblePerturbation& pert,
                                       const std::vector<double>& epsilons = {});

// Pressure-direction term of the drag linearization,
//   sum_c 1/2 vol_c (mu0/k_c) (dg/dp)(p_c, s_c) s_c^2 dp_c,
// the part of the first variation a pressure-dependent law leaves unbalanced.
double pressure_failure_term(const StructuredGrid& grid, const Eigen::ArrayXd& permeability,
                             const MaterialModel& model, const FlowState& solution,
                             const Eigen::ArrayXd& dp);

// Uniform-flux perturbation for 1D and radial grids (the only divergence-free
// fields there). Throws if any boundary prescribes a normal velocity.
AdmissiblePerturbation flux_constant_perturbation(const StructuredGrid& grid,
                                                  const BoundaryConditions& bcs, double amplitude,
                                                  const std::string& id = "flux-constant");

// Discrete curl of a nodal stream potential on a Cartesian grid; divergence
// free by construction. The potential must be constant along each velocity
// boundary stretch for admissibility (zero everywhere on the boundary is the
// safe choice), which check_admissible enforces on the result.
AdmissiblePerturbation stream_potential_perturbation(const StructuredGrid& grid,
                                                     const Eigen::ArrayXd& nodal_potential,
                                                     const std::string& id);

// Seeded low-frequency sine-mode stream potentials vanishing on the whole
// boundary, scaled so max |dv| = amplitude.
std::vector<AdmissiblePerturbation> random_perturbations(const StructuredGrid& grid,
                                                         const BoundaryConditions& bcs, int count,
                                                         unsigned long long seed, double amplitude);

}  // namespace porotopt::power
