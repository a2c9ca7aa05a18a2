#pragma once

#include <Eigen/Dense>

#include <stdexcept>

#include "porotopt/grid.hpp"

namespace porotopt {

// Face-centered normal velocities: x[f] is the +x (or radial) component on
// x-face f, y[f] the +y component on y-face f. `y` is empty for 1D grids.
struct FaceField {
  Eigen::ArrayXd x;
  Eigen::ArrayXd y;

  static FaceField zero(const StructuredGrid& g) {
    FaceField f;
    f.x = Eigen::ArrayXd::Zero(g.n_faces_x());
    f.y = Eigen::ArrayXd::Zero(g.n_faces_y());
    return f;
  }
};

// Converged flow solution on a grid.
struct FlowState {
  Eigen::ArrayXd pressure;  // per cell
  FaceField velocity;       // normal velocity per face
  int picard_iterations = 0;
  double residual_norm = 0.0;  // relative pressure change of the last sweep
};

// SIMP-interpolated two-material design field. rho in [0, 1] per cell;
// k(rho) = k_low + rho^penal * (k_high - k_low).
struct DensityField {
  Eigen::ArrayXd rho;
  double k_low = 1.0;
  double k_high = 1.0;
  double penal = 3.0;

  void validate() const {
    if (!(k_low > 0.0) || !(k_high >= k_low))
      throw std::invalid_argument("density field requires 0 < k_low <= k_high");
    if (!(penal >= 1.0)) throw std::invalid_argument("density field requires penal >= 1");
    if ((rho < -1e-12).any() || (rho > 1.0 + 1e-12).any())
      throw std::invalid_argument("density field requires rho in [0, 1]");
  }
};

inline double interpolate_permeability(double rho, double k_low, double k_high, double penal) {
  return k_low + std::pow(rho, penal) * (k_high - k_low);
}

inline Eigen::ArrayXd interpolate_permeability(const DensityField& f) {
  return f.k_low + f.rho.pow(f.penal) * (f.k_high - f.k_low);
}

inline Eigen::ArrayXd interpolate_permeability_drho(const DensityField& f) {
  return f.penal * f.rho.pow(f.penal - 1.0) * (f.k_high - f.k_low);
}

// Cell-averaged velocity components: per-axis mean of the two opposing face
// values. Returns arrays of size n_cells (vy zero for 1D grids).
void cell_average_velocity(const StructuredGrid& g, const FaceField& v, Eigen::ArrayXd& vx,
                           Eigen::ArrayXd& vy);

}  // namespace porotopt
