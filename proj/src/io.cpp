#include "porotopt/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace porotopt::io {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Eigen::ArrayXd cell_speeds(const StructuredGrid& grid, const FlowState& flow) {
  Eigen::ArrayXd vx, vy;
  cell_average_velocity(grid, flow.velocity, vx, vy);
  return (vx.square() + vy.square()).sqrt();
}

void write_fields_csv(std::ostream& os, const StructuredGrid& grid, const FlowState& flow) {
  const Eigen::ArrayXd speed = cell_speeds(grid, flow);
  os << "cell,x,y,p,speed\n";
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) {
      const int c = grid.cell_index(i, j);
      const double y = grid.is_one_dimensional() ? 0.0 : grid.cell_y(j);
      os << c << ',' << format_double(grid.cell_x(i)) << ',' << format_double(y) << ','
         << format_double(flow.pressure[c]) << ',' << format_double(speed[c]) << '\n';
    }
}

void write_density_csv(std::ostream& os, const StructuredGrid& grid, const Eigen::ArrayXd& rho,
                       const Eigen::ArrayXd& rho_filtered, const Eigen::ArrayXd& permeability) {
  os << "cell,x,y,rho,rho_filtered,k\n";
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) {
      const int c = grid.cell_index(i, j);
      const double y = grid.is_one_dimensional() ? 0.0 : grid.cell_y(j);
      os << c << ',' << format_double(grid.cell_x(i)) << ',' << format_double(y) << ','
         << format_double(rho[c]) << ',' << format_double(rho_filtered[c]) << ','
         << format_double(permeability[c]) << '\n';
    }
}

void write_history_csv(std::ostream& os, const std::vector<double>& phi,
                       const std::vector<double>& volume_fraction,
                       const std::vector<double>& change) {
  if (phi.size() != volume_fraction.size() || phi.size() != change.size())
    throw std::invalid_argument("history columns must have equal length");
  os << "iteration,phi,volume_fraction,change\n";
  for (size_t i = 0; i < phi.size(); ++i)
    os << i << ',' << format_double(phi[i]) << ',' << format_double(volume_fraction[i]) << ','
       << format_double(change[i]) << '\n';
}

namespace {

void write_scalars(std::ostream& os, const StructuredGrid& grid,
                   const std::vector<NamedField>& fields) {
  os << "POINT_DATA " << grid.n_cells() << '\n';
  for (const auto& [name, values] : fields) {
    if (values.size() != grid.n_cells())
      throw std::invalid_argument("vtk field '" + name + "' must have one value per cell");
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Eigen::Index c = 0; c < values.size(); ++c) os << format_double(values[c]) << '\n';
  }
}

}  // namespace

void write_vtk(std::ostream& os, const StructuredGrid& grid,
               const std::vector<NamedField>& fields) {
  os << "# vtk DataFile Version 3.0\nporotopt fields\nASCII\n";
  if (grid.geometry() == Geometry::Cartesian2D) {
    os << "DATASET STRUCTURED_POINTS\n";
    os << "DIMENSIONS " << grid.nx() << ' ' << grid.ny() << " 1\n";
    os << "ORIGIN " << format_double(grid.cell_x(0)) << ' ' << format_double(grid.cell_y(0))
       << " 0\n";
    os << "SPACING " << format_double(grid.dx()) << ' ' << format_double(grid.dy()) << " 1\n";
  } else {
    os << "DATASET RECTILINEAR_GRID\n";
    os << "DIMENSIONS " << grid.nx() << " 1 1\n";
    os << "X_COORDINATES " << grid.nx() << " double\n";
    for (int i = 0; i < grid.nx(); ++i)
      os << format_double(grid.cell_x(i)) << (i + 1 < grid.nx() ? ' ' : '\n');
    os << "Y_COORDINATES 1 double\n0\nZ_COORDINATES 1 double\n0\n";
  }
  write_scalars(os, grid, fields);
}

void write_text_file(const std::string& directory, const std::string& name,
                     const std::string& content) {
  std::filesystem::create_directories(directory);
  const auto path = std::filesystem::path(directory) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot create " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace porotopt::io
