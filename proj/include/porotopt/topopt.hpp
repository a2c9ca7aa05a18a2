#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <functional>
#include <string>
#include <vector>

#include "porotopt/field.hpp"
#include "porotopt/grid.hpp"
#include "porotopt/material.hpp"
#include "porotopt/primal.hpp"

namespace porotopt::topopt {

enum class Direction { Maximize, Minimize };

const char* to_string(Direction d);
Direction direction_from_string(const std::string& name);

// A volume-constrained two-material design problem: find the density layout
// whose SIMP-interpolated permeability extremizes total dissipation subject to
// volume(rho) <= gamma * meas(domain).
struct DesignProblem {
  StructuredGrid grid;
  BoundaryConditions bcs;
  MaterialModel model;
  Eigen::ArrayXd source;  // per cell; empty means zero
  double k_low = 1.0;
  double k_high = 10.0;
  double gamma = 0.3;
  Direction direction = Direction::Maximize;
  double penal = 3.0;
  double filter_radius = 0.0;  // physical length; <= 0 disables filtering

  void validate() const;
  Eigen::ArrayXd source_or_zero() const;
};

struct OptimizerSettings {
  int max_iterations = 300;
  double change_tol = 1e-3;  // max per-cell density change
  double move = 0.2;
  double eta = 0.5;
  double volume_tol = 1e-6;    // relative closeness of the bisected constraint
  double jitter = 0.0;         // amplitude of seeded init noise on rho0
  unsigned long long seed = 42;
  SolverSettings solver;
};

struct OptimizerState {
  Eigen::ArrayXd rho;           // design variables
  Eigen::ArrayXd rho_physical;  // filtered densities driving the permeability
  Eigen::ArrayXd permeability;
  FlowState flow;               // at the final design
  int iterations = 0;
  double change = 0.0;
  double lagrange_lo = 0.0, lagrange_hi = 0.0;
  std::vector<double> phi_history;     // accepted iterations, index 0 = initial
  std::vector<double> volume_history;  // volume fraction of rho_physical
  std::vector<double> change_history;  // 0 for the initial entry
};

// Row-normalized conic filter: weight max(0, radius - dist) between cell
// centers. radius <= 0 yields the identity.
Eigen::SparseMatrix<double> build_filter(const StructuredGrid& grid, double radius);

// Volume fraction of a density field, metric-weighted.
double volume_fraction(const StructuredGrid& grid, const Eigen::ArrayXd& rho);

struct Objective {
  double phi = 0.0;
  Eigen::ArrayXd d_phi_d_rho;  // w.r.t. the raw design variables (chained
                               // through filter and SIMP)
  FlowState flow;
  Eigen::ArrayXd rho_physical;
  Eigen::ArrayXd permeability;
};

// Total dissipation and its exact discrete adjoint gradient. The adjoint
// linearizes the full coupled flux/pressure residual, including the drag
// multiplier's dependence on face pressure and face speed, so the gradient is
// consistent with the converged Picard solution rather than its lagged
// linearization.
Objective objective_and_gradient(const DesignProblem& prob,
                                 const Eigen::SparseMatrix<double>& filter,
                                 const Eigen::ArrayXd& rho, const SolverSettings& solver);

// Dissipation gradient w.r.t. the per-cell permeability at a converged flow.
Eigen::ArrayXd dissipation_gradient_k(const StructuredGrid& grid,
                                      const Eigen::ArrayXd& permeability,
                                      const MaterialModel& model, const BoundaryConditions& bcs,
                                      const Eigen::ArrayXd& source, const FlowState& flow,
                                      double* phi_out = nullptr);

// Optimality-criteria loop with a bisected volume multiplier and step-halving
// on objective regression. rho0 empty means uniform gamma. The callback (if
// set) observes every accepted iterate.
using IterationCallback = std::function<void(const OptimizerState&)>;
OptimizerState optimize(const DesignProblem& prob, const Eigen::ArrayXd& rho0,
                        const OptimizerSettings& settings, const IterationCallback& cb = {});

// Interpolated 0.5-crossing radius/coordinate of a radial or 1D density
// profile that transitions from high to low; used to compare against the
// closed-form optimal interface.
double interface_position(const StructuredGrid& grid, const Eigen::ArrayXd& rho_physical);

// Fraction of cells with rho outside (lo, hi); the binariness measure.
double binary_fraction(const Eigen::ArrayXd& rho, double lo = 0.05, double hi = 0.95);

}  // namespace porotopt::topopt
