#include "porotopt/field.hpp"

#include "porotopt/dissipation.hpp"

namespace porotopt {

void cell_average_velocity(const StructuredGrid& g, const FaceField& v, Eigen::ArrayXd& vx,
                           Eigen::ArrayXd& vy) {
  vx.resize(g.n_cells());
  vy = Eigen::ArrayXd::Zero(g.n_cells());
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const int c = g.cell_index(i, j);
      vx[c] = 0.5 * (v.x[g.face_x_index(i, j)] + v.x[g.face_x_index(i + 1, j)]);
      if (g.geometry() == Geometry::Cartesian2D)
        vy[c] = 0.5 * (v.y[g.face_y_index(i, j)] + v.y[g.face_y_index(i, j + 1)]);
    }
  }
}

double total_dissipation(const StructuredGrid& g, const Eigen::ArrayXd& permeability,
                         const MaterialModel& model, const FlowState& flow) {
  Eigen::ArrayXd vx, vy;
  cell_average_velocity(g, flow.velocity, vx, vy);
  double phi = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const int c = g.cell_index(i, j);
      const double speed = std::hypot(vx[c], vy[c]);
      const double alpha =
          (model.mu0 / permeability[c]) * drag_multiplier(model, flow.pressure[c], speed);
      phi += dissipation_density(alpha, vx[c], vy[c]) * g.cell_volume(i);
    }
  }
  return phi;
}

double total_dissipation(const StructuredGrid& g, const DensityField& density,
                         const MaterialModel& model, const FlowState& flow) {
  return total_dissipation(g, interpolate_permeability(density), model, flow);
}

}  // namespace porotopt
