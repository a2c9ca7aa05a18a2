#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "porotopt/grid.hpp"

using namespace porotopt;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("interval grid metrics") {
  auto g = StructuredGrid::interval(4, 0.0, 1.0);
  CHECK(g.n_cells() == 4);
  CHECK(g.n_faces_x() == 5);
  CHECK(g.n_faces_y() == 0);
  CHECK(g.dx() == doctest::Approx(0.25));
  CHECK(g.cell_volume(1) == doctest::Approx(0.25));
  CHECK(g.total_volume() == doctest::Approx(1.0));
  CHECK(g.face_area_x(3) == doctest::Approx(1.0));
  CHECK(g.half_resistance_x(2, true) == doctest::Approx(0.125));
  CHECK(g.cell_x(0) == doctest::Approx(0.125));
}

TEST_CASE("cartesian grid metrics and indexing") {
  auto g = StructuredGrid::cartesian(3, 2, 0.0, 3.0, 0.0, 1.0);
  CHECK(g.n_cells() == 6);
  CHECK(g.n_faces_x() == 8);
  CHECK(g.n_faces_y() == 9);
  CHECK(g.cell_index(2, 1) == 5);
  CHECK(g.face_x_index(3, 1) == 7);
  CHECK(g.face_y_index(2, 2) == 8);
  CHECK(g.cell_volume(0) == doctest::Approx(0.5));
  CHECK(g.total_volume() == doctest::Approx(3.0));
  CHECK(g.face_area_x(0) == doctest::Approx(0.5));
  CHECK(g.face_area_y() == doctest::Approx(1.0));
  // half resistance = (dl/2) / transverse extent
  CHECK(g.half_resistance_x(1, false) == doctest::Approx(0.5 / 0.5));
  CHECK(g.half_resistance_y() == doctest::Approx(0.25 / 1.0));
}

TEST_CASE("annulus metrics are exact ring volumes and log resistances") {
  auto g = StructuredGrid::annulus(9, 0.1, 1.0);
  CHECK(g.dx() == doctest::Approx(0.1));
  double vol = 0.0;
  for (int i = 0; i < 9; ++i) vol += g.cell_volume(i);
  CHECK(vol == doctest::Approx(kPi * (1.0 - 0.01)).epsilon(1e-14));
  CHECK(g.face_area_x(0) == doctest::Approx(2 * kPi * 0.1));
  // center of cell 0 is r=0.15; resistance to the outer face at 0.2
  CHECK(g.half_resistance_x(0, true) ==
        doctest::Approx(std::log(0.2 / 0.15) / (2 * kPi)).epsilon(1e-14));
  CHECK(g.half_resistance_x(0, false) ==
        doctest::Approx(std::log(0.15 / 0.1) / (2 * kPi)).epsilon(1e-14));
}

TEST_CASE("spherical shell metrics") {
  auto g = StructuredGrid::sphere_shell(9, 0.1, 1.0);
  CHECK(g.total_volume() == doctest::Approx(4.0 / 3.0 * kPi * (1.0 - 1e-3)).epsilon(1e-14));
  CHECK(g.face_area_x(9) == doctest::Approx(4 * kPi));
  CHECK(g.half_resistance_x(8, true) ==
        doctest::Approx((1.0 / 0.95 - 1.0) / (4 * kPi)).epsilon(1e-14));
}

TEST_CASE("radial grids reject nonpositive inner radius") {
  CHECK_THROWS_AS(StructuredGrid::annulus(4, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(StructuredGrid::sphere_shell(4, -0.1, 1.0), std::invalid_argument);
}

TEST_CASE("boundary segments partition sides and resolve by arc coordinate") {
  std::vector<BoundarySegment> segs{
      {Side::Left, 0.0, 0.5, "wall"},   {Side::Left, 0.5, 1.0, "inlet"},
      {Side::Right, 0.0, 1.0, "outlet"}, {Side::Bottom, 0.0, 2.0, "wall"},
      {Side::Top, 0.0, 2.0, "wall"}};
  StructuredGrid g(Geometry::Cartesian2D, 4, 2, 0.0, 2.0, 0.0, 1.0, segs);
  CHECK(g.segment_at(Side::Left, 0.25).tag == "wall");
  CHECK(g.segment_at(Side::Left, 0.75).tag == "inlet");
  CHECK(g.segment_at(Side::Left, 0.9999).tag == "inlet");
  CHECK(g.segment_at(Side::Right, 0.1).tag == "outlet");

  SUBCASE("gap is rejected") {
    std::vector<BoundarySegment> bad = segs;
    bad[1].lo = 0.6;
    CHECK_THROWS_AS(StructuredGrid(Geometry::Cartesian2D, 4, 2, 0.0, 2.0, 0.0, 1.0, bad),
                    std::invalid_argument);
  }
  SUBCASE("missing side is rejected") {
    std::vector<BoundarySegment> bad(segs.begin(), segs.end() - 1);
    CHECK_THROWS_AS(StructuredGrid(Geometry::Cartesian2D, 4, 2, 0.0, 2.0, 0.0, 1.0, bad),
                    std::invalid_argument);
  }
}

TEST_CASE("boundary condition validation") {
  auto g = StructuredGrid::interval(4, 0.0, 1.0);
  BoundaryConditions bcs{{"left", BoundaryCondition::pressure(1.0)},
                         {"right", BoundaryCondition::pressure(0.0)}};
  CHECK_NOTHROW(g.validate_boundary_conditions(bcs));

  BoundaryConditions missing{{"left", BoundaryCondition::pressure(1.0)}};
  CHECK_THROWS_AS(g.validate_boundary_conditions(missing), std::invalid_argument);

  BoundaryConditions no_pressure{{"left", BoundaryCondition::normal_velocity(-1.0)},
                                 {"right", BoundaryCondition::normal_velocity(1.0)}};
  CHECK_THROWS_AS(g.validate_boundary_conditions(no_pressure), std::invalid_argument);
}
