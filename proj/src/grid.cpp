#include "porotopt/grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace porotopt {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool is_radial_geometry(Geometry g) {
  return g == Geometry::RadialCylindrical || g == Geometry::RadialSpherical;
}
}  // namespace

const char* to_string(Geometry g) {
  switch (g) {
    case Geometry::Interval1D: return "interval-1d";
    case Geometry::Cartesian2D: return "cartesian-2d";
    case Geometry::RadialCylindrical: return "radial-cylindrical";
    case Geometry::RadialSpherical: return "radial-spherical";
  }
  return "?";
}

const char* to_string(Side s) {
  switch (s) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Bottom: return "bottom";
    case Side::Top: return "top";
  }
  return "?";
}

StructuredGrid::StructuredGrid(Geometry geometry, int nx, int ny, double x0, double x1, double y0,
                               double y1, std::vector<BoundarySegment> segments)
    : geometry_(geometry),
      nx_(nx),
      ny_(ny),
      x0_(x0),
      x1_(x1),
      y0_(y0),
      y1_(y1),
      segments_(std::move(segments)) {
  if (geometry_ != Geometry::Cartesian2D) ny_ = 1;
  dx_ = (x1_ - x0_) / nx_;
  dy_ = geometry_ == Geometry::Cartesian2D ? (y1_ - y0_) / ny_ : 1.0;
  validate();
}

StructuredGrid StructuredGrid::interval(int nx, double x0, double x1, const std::string& left_tag,
                                        const std::string& right_tag) {
  std::vector<BoundarySegment> segs{{Side::Left, 0.0, 0.0, left_tag},
                                    {Side::Right, 0.0, 0.0, right_tag}};
  return StructuredGrid(Geometry::Interval1D, nx, 1, x0, x1, 0.0, 0.0, std::move(segs));
}

StructuredGrid StructuredGrid::annulus(int nr, double r_inner, double r_outer,
                                       const std::string& inner_tag, const std::string& outer_tag) {
  std::vector<BoundarySegment> segs{{Side::Left, 0.0, 0.0, inner_tag},
                                    {Side::Right, 0.0, 0.0, outer_tag}};
  return StructuredGrid(Geometry::RadialCylindrical, nr, 1, r_inner, r_outer, 0.0, 0.0,
                        std::move(segs));
}

StructuredGrid StructuredGrid::sphere_shell(int nr, double r_inner, double r_outer,
                                            const std::string& inner_tag,
                                            const std::string& outer_tag) {
  std::vector<BoundarySegment> segs{{Side::Left, 0.0, 0.0, inner_tag},
                                    {Side::Right, 0.0, 0.0, outer_tag}};
  return StructuredGrid(Geometry::RadialSpherical, nr, 1, r_inner, r_outer, 0.0, 0.0,
                        std::move(segs));
}

StructuredGrid StructuredGrid::cartesian(int nx, int ny, double x0, double x1, double y0, double y1,
                                         const std::string& left_tag, const std::string& right_tag,
                                         const std::string& bottom_tag,
                                         const std::string& top_tag) {
  std::vector<BoundarySegment> segs{{Side::Left, y0, y1, left_tag},
                                    {Side::Right, y0, y1, right_tag},
                                    {Side::Bottom, x0, x1, bottom_tag},
                                    {Side::Top, x0, x1, top_tag}};
  return StructuredGrid(Geometry::Cartesian2D, nx, ny, x0, x1, y0, y1, std::move(segs));
}

double StructuredGrid::cell_volume(int i) const {
  const double rl = face_x_coord(i);
  const double rr = face_x_coord(i + 1);
  switch (geometry_) {
    case Geometry::Interval1D: return dx_;
    case Geometry::Cartesian2D: return dx_ * dy_;
    case Geometry::RadialCylindrical: return kPi * (rr * rr - rl * rl);
    case Geometry::RadialSpherical: return 4.0 / 3.0 * kPi * (rr * rr * rr - rl * rl * rl);
  }
  return 0.0;
}

double StructuredGrid::total_volume() const {
  double v = 0.0;
  for (int i = 0; i < nx_; ++i) v += cell_volume(i);
  if (geometry_ == Geometry::Cartesian2D) v *= ny_;
  return v;
}

Eigen::ArrayXd StructuredGrid::cell_volumes() const {
  Eigen::ArrayXd v(n_cells());
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i) v[cell_index(i, j)] = cell_volume(i);
  return v;
}

double StructuredGrid::face_area_x(int i) const {
  const double r = face_x_coord(i);
  switch (geometry_) {
    case Geometry::Interval1D: return 1.0;
    case Geometry::Cartesian2D: return dy_;
    case Geometry::RadialCylindrical: return 2.0 * kPi * r;
    case Geometry::RadialSpherical: return 4.0 * kPi * r * r;
  }
  return 0.0;
}

double StructuredGrid::face_area_y() const {
  if (geometry_ != Geometry::Cartesian2D)
    throw std::logic_error("face_area_y: grid has no y-faces");
  return dx_;
}

double StructuredGrid::half_resistance_x(int i, bool toward_positive) const {
  const double rc = cell_x(i);
  const double rf = toward_positive ? face_x_coord(i + 1) : face_x_coord(i);
  switch (geometry_) {
    case Geometry::Interval1D: return 0.5 * dx_;
    case Geometry::Cartesian2D: return 0.5 * dx_ / dy_;
    case Geometry::RadialCylindrical: return std::abs(std::log(rf / rc)) / (2.0 * kPi);
    case Geometry::RadialSpherical: return std::abs(1.0 / rc - 1.0 / rf) / (4.0 * kPi);
  }
  return 0.0;
}

double StructuredGrid::half_resistance_y() const {
  if (geometry_ != Geometry::Cartesian2D)
    throw std::logic_error("half_resistance_y: grid has no y-faces");
  return 0.5 * dy_ / dx_;
}

const BoundarySegment& StructuredGrid::segment_at(Side side, double arc) const {
  const BoundarySegment* last = nullptr;
  for (const auto& s : segments_) {
    if (s.side != side) continue;
    last = &s;
    if (arc >= s.lo && arc < s.hi) return s;
  }
  // Degenerate (1D) sides and the closed end of the last segment.
  if (last != nullptr && (is_one_dimensional() || arc >= last->lo)) return *last;
  std::ostringstream os;
  os << "no boundary segment on side " << to_string(side) << " at arc coordinate " << arc;
  throw std::invalid_argument(os.str());
}

void StructuredGrid::validate_boundary_conditions(const BoundaryConditions& bcs) const {
  bool any_pressure = false;
  for (const auto& seg : segments_) {
    auto it = bcs.find(seg.tag);
    if (it == bcs.end())
      throw std::invalid_argument("no boundary condition for tag '" + seg.tag + "'");
    if (it->second.kind == BoundaryCondition::Kind::PrescribedPressure) any_pressure = true;
  }
  if (!any_pressure)
    throw std::invalid_argument(
        "at least one boundary segment must prescribe pressure; with only normal velocities the "
        "pressure is determined up to a constant");
}

void StructuredGrid::validate() const {
  if (nx_ < 1 || ny_ < 1) throw std::invalid_argument("grid needs at least one cell per axis");
  if (!(x1_ > x0_)) throw std::invalid_argument("grid requires x1 > x0");
  if (geometry_ == Geometry::Cartesian2D && !(y1_ > y0_))
    throw std::invalid_argument("grid requires y1 > y0");
  if (is_radial_geometry(geometry_) && !(x0_ > 0.0))
    throw std::invalid_argument("radial grids require a strictly positive inner radius");
  if (segments_.empty()) throw std::invalid_argument("grid has no boundary segments");

  // Each present side must be partitioned by its segments.
  std::set<Side> sides;
  for (const auto& s : segments_) sides.insert(s.side);
  const std::vector<Side> required =
      geometry_ == Geometry::Cartesian2D
          ? std::vector<Side>{Side::Left, Side::Right, Side::Bottom, Side::Top}
          : std::vector<Side>{Side::Left, Side::Right};
  for (Side side : required) {
    if (!sides.count(side))
      throw std::invalid_argument(std::string("missing boundary segment on side ") +
                                  to_string(side));
  }
  if (geometry_ != Geometry::Cartesian2D) {
    for (const auto& s : segments_)
      if (s.side != Side::Left && s.side != Side::Right)
        throw std::invalid_argument("1D grids only have left/right boundaries");
    return;
  }
  for (Side side : required) {
    std::vector<const BoundarySegment*> segs;
    for (const auto& s : segments_)
      if (s.side == side) segs.push_back(&s);
    std::sort(segs.begin(), segs.end(),
              [](const BoundarySegment* a, const BoundarySegment* b) { return a->lo < b->lo; });
    const bool along_y = side == Side::Left || side == Side::Right;
    const double lo = along_y ? y0_ : x0_;
    const double hi = along_y ? y1_ : x1_;
    const double tol = 1e-12 * (hi - lo);
    double cursor = lo;
    for (const auto* s : segs) {
      if (std::abs(s->lo - cursor) > tol)
        throw std::invalid_argument(std::string("boundary segments on side ") + to_string(side) +
                                    " leave a gap or overlap");
      if (!(s->hi > s->lo)) throw std::invalid_argument("boundary segment has non-positive extent");
      cursor = s->hi;
    }
    if (std::abs(cursor - hi) > tol)
      throw std::invalid_argument(std::string("boundary segments on side ") + to_string(side) +
                                  " do not cover the side");
  }
}

}  // namespace porotopt
