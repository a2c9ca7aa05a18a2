#include "porotopt/problems.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "porotopt/analytic.hpp"
#include "porotopt/io.hpp"

namespace porotopt::problems {

std::vector<std::string> builtin_names() {
  return {"interval-1d",      "annulus-radial",   "sphere-radial",  "rect-pressure-q0",
          "rect-pressure-q10", "pipe-bend-square", "pipe-bend-rect"};
}

bool is_builtin(const std::string& name) {
  const auto names = builtin_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

namespace {

std::string patch(double value, double lo, double hi) {
  return "pressure " + io::format_double(value) + " patch " + io::format_double(lo) + " " +
         io::format_double(hi);
}

}  // namespace

cfg::RunConfig builtin_run_config(const std::string& name) {
  cfg::RunConfig rc = cfg::default_run_config();
  rc.builtin = name;
  rc.model = MaterialModel::darcy();
  if (name == "interval-1d") {
    rc.geometry = "interval";
    rc.nx = 512;
    rc.ny = 1;
    rc.x0 = 0.0;
    rc.x1 = 1.0;
    rc.boundaries = {{"left", "pressure 1"}, {"right", "pressure 0"}};
    rc.gamma = 0.3;
    // Layered series resistance: the power-law interpolation only penalizes
    // intermediate densities once penal exceeds k_high/k_low.
    rc.penal = 12.0;
    rc.filter_radius_cells = 0.0;
    // Uniform rho is an exact fixed point of the OC update here (every cell
    // has the same sensitivity); seeded noise breaks the tie.
    rc.jitter = 0.02;
  } else if (name == "annulus-radial") {
    rc.geometry = "annulus";
    rc.nx = 256;
    rc.ny = 1;
    rc.x0 = 0.1;
    rc.x1 = 1.0;
    rc.boundaries = {{"inner", "pressure 100"}, {"outer", "pressure 1"}};
    rc.gamma = 0.3;
    rc.penal = 12.0;
  } else if (name == "sphere-radial") {
    rc.geometry = "sphere";
    rc.nx = 256;
    rc.ny = 1;
    rc.x0 = 0.1;
    rc.x1 = 1.0;
    rc.boundaries = {{"inner", "pressure 1"}, {"outer", "pressure 0"}};
    rc.gamma = 0.1;
    rc.penal = 12.0;
  } else if (name == "rect-pressure-q0" || name == "rect-pressure-q10") {
    rc.geometry = "cartesian";
    rc.nx = 64;
    rc.ny = 48;
    rc.x0 = 0.0;
    rc.x1 = 2.0;
    rc.y0 = 0.0;
    rc.y1 = 1.5;
    rc.boundaries = {{"left", patch(100.0, 0.5, 1.0)},
                     {"right", patch(1.0, 0.5, 1.0)},
                     {"bottom", "wall"},
                     {"top", "wall"}};
    rc.gamma = 0.1;
    rc.max_iterations = 120;
    if (name == "rect-pressure-q10") {
      rc.q = 10.0;
      rc.model = MaterialModel::linearized_barus(0.125);
    }
  } else if (name == "pipe-bend-square") {
    rc.geometry = "cartesian";
    rc.nx = 48;
    rc.ny = 48;
    rc.x0 = 0.0;
    rc.x1 = 1.0;
    rc.y0 = 0.0;
    rc.y1 = 1.0;
    rc.boundaries = {{"left", patch(100.0, 1.0 / 3.0, 2.0 / 3.0)},
                     {"bottom", patch(1.0, 1.0 / 3.0, 2.0 / 3.0)},
                     {"right", "wall"},
                     {"top", "wall"}};
    rc.q = 10.0;
    rc.gamma = 0.1;
    rc.max_iterations = 120;
  } else if (name == "pipe-bend-rect") {
    rc.geometry = "cartesian";
    rc.nx = 60;
    rc.ny = 45;
    rc.x0 = 0.0;
    rc.x1 = 2.0;
    rc.y0 = 0.0;
    rc.y1 = 1.5;
    rc.boundaries = {{"left", patch(100.0, 0.5, 1.0)},
                     {"bottom", patch(1.0, 2.0 / 3.0, 4.0 / 3.0)},
                     {"right", "wall"},
                     {"top", "wall"}};
    rc.q = 10.0;
    rc.gamma = 0.1;
    rc.max_iterations = 120;
  } else {
    throw std::invalid_argument("unknown builtin problem '" + name + "'");
  }
  return rc;
}

namespace {

struct ParsedBoundary {
  BoundaryCondition bc;
  bool is_patch = false;
  double lo = 0.0, hi = 0.0;
};

ParsedBoundary parse_boundary(const std::string& side, const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> tok;
  for (std::string t; in >> t;) tok.push_back(t);
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("boundary '" + side + "': " + msg + " in \"" + text + "\"");
  };
  auto number = [&](const std::string& t) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      fail("expected a number, got '" + t + "'");
    }
    if (used != t.size()) fail("expected a number, got '" + t + "'");
    return v;
  };
  ParsedBoundary out;
  if (tok.empty()) fail("empty condition");
  if (tok[0] == "wall") {
    if (tok.size() != 1) fail("'wall' takes no arguments");
    out.bc = BoundaryCondition::normal_velocity(0.0);
    return out;
  }
  if (tok[0] == "velocity") {
    if (tok.size() != 2) fail("expected 'velocity <vn>'");
    out.bc = BoundaryCondition::normal_velocity(number(tok[1]));
    return out;
  }
  if (tok[0] != "pressure") fail("unknown condition '" + tok[0] + "'");
  if (tok.size() == 2) {
    out.bc = BoundaryCondition::pressure(number(tok[1]));
    return out;
  }
  if (tok.size() == 5 && tok[2] == "patch") {
    out.bc = BoundaryCondition::pressure(number(tok[1]));
    out.is_patch = true;
    out.lo = number(tok[3]);
    out.hi = number(tok[4]);
    if (!(out.lo < out.hi)) fail("patch requires lo < hi");
    return out;
  }
  fail("expected 'pressure <v>' or 'pressure <v> patch <lo> <hi>'");
  return out;  // unreachable
}

Side side_from_name(const std::string& name, bool radial) {
  if (radial) {
    if (name == "inner") return Side::Left;
    if (name == "outer") return Side::Right;
  } else {
    if (name == "left") return Side::Left;
    if (name == "right") return Side::Right;
    if (name == "bottom") return Side::Bottom;
    if (name == "top") return Side::Top;
  }
  throw std::invalid_argument("unknown boundary side '" + name + "'");
}

}  // namespace

Assembled build_problem(const cfg::RunConfig& rc) {
  Geometry geom;
  if (rc.geometry == "interval") geom = Geometry::Interval1D;
  else if (rc.geometry == "annulus") geom = Geometry::RadialCylindrical;
  else if (rc.geometry == "sphere") geom = Geometry::RadialSpherical;
  else if (rc.geometry == "cartesian") geom = Geometry::Cartesian2D;
  else throw std::invalid_argument("unknown geometry '" + rc.geometry + "'");

  const bool radial = geom == Geometry::RadialCylindrical || geom == Geometry::RadialSpherical;
  const bool one_d = geom != Geometry::Cartesian2D;
  const int ny = one_d ? 1 : rc.ny;

  std::vector<std::string> side_names =
      one_d ? (radial ? std::vector<std::string>{"inner", "outer"}
                      : std::vector<std::string>{"left", "right"})
            : std::vector<std::string>{"left", "right", "bottom", "top"};

  for (const auto& [name, text] : rc.boundaries)
    if (std::find(side_names.begin(), side_names.end(), name) == side_names.end())
      throw std::invalid_argument("boundary side '" + name +
                                  "' does not exist for geometry '" + rc.geometry + "'");

  std::vector<BoundarySegment> segments;
  BoundaryConditions bcs;
  for (const auto& name : side_names) {
    const Side side = side_from_name(name, radial);
    const bool along_y = side == Side::Left || side == Side::Right;
    const double arc_lo = one_d ? 0.0 : (along_y ? rc.y0 : rc.x0);
    const double arc_hi = one_d ? 1.0 : (along_y ? rc.y1 : rc.x1);

    const auto it = rc.boundaries.find(name);
    const std::string text = it != rc.boundaries.end() ? it->second : std::string("wall");
    const ParsedBoundary parsed = parse_boundary(name, text);
    if (parsed.is_patch) {
      if (one_d)
        throw std::invalid_argument("boundary '" + name + "': patches require a 2D geometry");
      if (parsed.lo < arc_lo - 1e-12 || parsed.hi > arc_hi + 1e-12)
        throw std::invalid_argument("boundary '" + name + "': patch exceeds the side extent");
      if (parsed.lo > arc_lo) {
        segments.push_back({side, arc_lo, parsed.lo, name + "-wall-lo"});
        bcs[name + "-wall-lo"] = BoundaryCondition::normal_velocity(0.0);
      }
      segments.push_back({side, parsed.lo, parsed.hi, name});
      bcs[name] = parsed.bc;
      if (parsed.hi < arc_hi) {
        segments.push_back({side, parsed.hi, arc_hi, name + "-wall-hi"});
        bcs[name + "-wall-hi"] = BoundaryCondition::normal_velocity(0.0);
      }
    } else {
      segments.push_back({side, arc_lo, arc_hi, name});
      bcs[name] = parsed.bc;
    }
  }

  Assembled out;
  out.problem.grid = StructuredGrid(geom, rc.nx, ny, rc.x0, rc.x1, rc.y0, rc.y1, segments);
  out.problem.bcs = std::move(bcs);
  out.problem.model = rc.model;
  if (rc.q != 0.0)
    out.problem.source = Eigen::ArrayXd::Constant(out.problem.grid.n_cells(), rc.q);
  out.problem.k_low = rc.k_low;
  out.problem.k_high = rc.k_high;
  out.problem.gamma = rc.gamma;
  out.problem.direction = topopt::direction_from_string(rc.direction);
  out.problem.penal = rc.penal;
  const double h = one_d ? out.problem.grid.dx()
                         : std::max(out.problem.grid.dx(), out.problem.grid.dy());
  out.problem.filter_radius = rc.filter_radius_cells * h;

  out.optimizer.max_iterations = rc.max_iterations;
  out.optimizer.change_tol = rc.change_tol;
  out.optimizer.move = rc.move;
  out.optimizer.jitter = rc.jitter;
  out.optimizer.seed = rc.seed;
  out.optimizer.solver = rc.solver;
  return out;
}

std::optional<double> interface_oracle(const cfg::RunConfig& rc) {
  if (rc.direction != "maximize") return std::nullopt;
  if (rc.geometry == "annulus")
    return analytic::optimal_interface_2d(rc.gamma, rc.x0, rc.x1, rc.k_low, rc.k_high).xi_hat;
  if (rc.geometry == "sphere" && rc.x1 == 1.0)
    return analytic::optimal_interface_3d(rc.gamma, rc.x0, rc.k_low, rc.k_high).xi_hat;
  return std::nullopt;
}

}  // namespace porotopt::problems
