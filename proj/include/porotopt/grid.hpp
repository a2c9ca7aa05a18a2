#pragma once

#include <Eigen/Dense>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace porotopt {

// Supported grid geometries. Radial grids are 1D in the radial coordinate but
// carry cylindrical (full 2*pi) or spherical (full 4*pi) metric factors, so
// volumes, face areas, and flux resistances are exact for the symmetric
// problems they discretize.
enum class Geometry { Interval1D, Cartesian2D, RadialCylindrical, RadialSpherical };

// Boundary sides. 1D and radial grids use Left (low coordinate / inner radius)
// and Right (high coordinate / outer radius) only.
enum class Side { Left, Right, Bottom, Top };

const char* to_string(Geometry g);
const char* to_string(Side s);

// A tagged stretch of one boundary side. `lo`/`hi` bound the arc coordinate
// along the side (y for Left/Right, x for Bottom/Top). Segments on a side must
// partition it: no overlap, no gap. 1D/radial sides are a single point; their
// segments must span the whole (degenerate) side.
struct BoundarySegment {
  Side side = Side::Left;
  double lo = 0.0;
  double hi = 0.0;
  std::string tag;
};

struct BoundaryCondition {
  enum class Kind { PrescribedPressure, PrescribedNormalVelocity };
  Kind kind = Kind::PrescribedPressure;
  // PrescribedPressure: boundary pressure value.
  // PrescribedNormalVelocity: v . n_hat with n_hat the outward unit normal,
  // so negative values are inflow.
  double value = 0.0;

  static BoundaryCondition pressure(double p0) { return {Kind::PrescribedPressure, p0}; }
  static BoundaryCondition normal_velocity(double vn) { return {Kind::PrescribedNormalVelocity, vn}; }
};

// tag -> condition. Every segment tag of the grid must be present, and at
// least one tag must prescribe pressure (otherwise pressure is only defined
// up to a constant).
using BoundaryConditions = std::map<std::string, BoundaryCondition>;

// Uniform structured grid with cell-centered scalars and face-centered normal
// velocities. Cells are indexed c = j*nx + i. X-faces (normal +x) are indexed
// f = j*(nx+1) + i; y-faces (normal +y, Cartesian2D only) f = j*nx + i with
// j in [0, ny]. For radial geometries x is the radius and x0 > 0 is required.
class StructuredGrid {
 public:
  StructuredGrid() = default;
  StructuredGrid(Geometry geometry, int nx, int ny, double x0, double x1, double y0, double y1,
                 std::vector<BoundarySegment> segments);

  static StructuredGrid interval(int nx, double x0, double x1,
                                 const std::string& left_tag = "left",
                                 const std::string& right_tag = "right");
  static StructuredGrid annulus(int nr, double r_inner, double r_outer,
                                const std::string& inner_tag = "inner",
                                const std::string& outer_tag = "outer");
  static StructuredGrid sphere_shell(int nr, double r_inner, double r_outer,
                                     const std::string& inner_tag = "inner",
                                     const std::string& outer_tag = "outer");
  // Whole-side tags in order left, right, bottom, top.
  static StructuredGrid cartesian(int nx, int ny, double x0, double x1, double y0, double y1,
                                  const std::string& left_tag = "left",
                                  const std::string& right_tag = "right",
                                  const std::string& bottom_tag = "bottom",
                                  const std::string& top_tag = "top");

  Geometry geometry() const { return geometry_; }
  bool is_one_dimensional() const { return geometry_ != Geometry::Cartesian2D; }
  bool is_radial() const {
    return geometry_ == Geometry::RadialCylindrical || geometry_ == Geometry::RadialSpherical;
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int n_cells() const { return nx_ * ny_; }
  int n_faces_x() const { return (nx_ + 1) * ny_; }
  int n_faces_y() const { return geometry_ == Geometry::Cartesian2D ? nx_ * (ny_ + 1) : 0; }

  double x0() const { return x0_; }
  double x1() const { return x1_; }
  double y0() const { return y0_; }
  double y1() const { return y1_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }

  int cell_index(int i, int j) const { return j * nx_ + i; }
  int face_x_index(int i, int j) const { return j * (nx_ + 1) + i; }
  int face_y_index(int i, int j) const { return j * nx_ + i; }

  double cell_x(int i) const { return x0_ + (i + 0.5) * dx_; }
  double cell_y(int j) const { return y0_ + (j + 0.5) * dy_; }
  double face_x_coord(int i) const { return x0_ + i * dx_; }
  double face_y_coord(int j) const { return y0_ + j * dy_; }

  // Metric-weighted cell volume (per unit thickness for Cartesian2D, per unit
  // cross-section for Interval1D, full 2*pi / 4*pi solid for radial grids).
  double cell_volume(int i) const;
  double total_volume() const;
  Eigen::ArrayXd cell_volumes() const;

  // Area of the x-face at radius/coordinate face_x_coord(i).
  double face_area_x(int i) const;
  double face_area_y() const;  // Cartesian2D only: dx per unit thickness

  // Exact geometric flux resistance integral(dl / A(l)) from the center of
  // cell i to its face on the given side, before dividing by permeability.
  // Multiplying by mu/k gives the half-segment momentum resistance R such
  // that R * F = pressure drop across the half segment.
  double half_resistance_x(int i, bool toward_positive) const;
  double half_resistance_y() const;  // Cartesian2D only, uniform

  const std::vector<BoundarySegment>& segments() const { return segments_; }
  // Segment owning arc coordinate `arc` on `side`. Throws if the side has no
  // segment there (cannot happen for a validated grid).
  const BoundarySegment& segment_at(Side side, double arc) const;

  // Throws std::invalid_argument if tags are missing from `bcs` or no
  // pressure condition exists anywhere.
  void validate_boundary_conditions(const BoundaryConditions& bcs) const;

 private:
  void validate() const;

  Geometry geometry_ = Geometry::Interval1D;
  int nx_ = 0;
  int ny_ = 1;
  double x0_ = 0.0, x1_ = 1.0, y0_ = 0.0, y1_ = 1.0;
  double dx_ = 0.0, dy_ = 0.0;
  std::vector<BoundarySegment> segments_;
};

}  // namespace porotopt
