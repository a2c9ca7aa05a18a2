#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "porotopt/analytic.hpp"
#include "porotopt/dissipation.hpp"
#include "porotopt/primal.hpp"

using namespace porotopt;

namespace {

// Piecewise two-material permeability on a 1D/radial grid, interface aligned
// with a face.
Eigen::ArrayXd two_region_permeability(const StructuredGrid& g, double xi, double k1, double k2) {
  Eigen::ArrayXd k(g.n_cells());
  for (int i = 0; i < g.nx(); ++i) k[i] = g.cell_x(i) < xi ? k1 : k2;
  return k;
}

struct OneDErrors {
  double p_max_rel = 0.0;
  double v_max_rel = 0.0;
};

OneDErrors compare_1d(const StructuredGrid& g, const FlowState& flow,
                      const analytic::AnalyticSolution& exact) {
  OneDErrors e;
  double p_scale = 0.0;
  for (int i = 0; i < g.nx(); ++i) p_scale = std::max(p_scale, std::abs(exact.pressure(g.cell_x(i))));
  for (int i = 0; i < g.nx(); ++i) {
    const double diff = std::abs(flow.pressure[i] - exact.pressure(g.cell_x(i)));
    e.p_max_rel = std::max(e.p_max_rel, diff / p_scale);
  }
  double v_scale = 0.0;
  for (int i = 0; i <= g.nx(); ++i)
    v_scale = std::max(v_scale, std::abs(exact.velocity(g.face_x_coord(i))));
  for (int i = 0; i <= g.nx(); ++i) {
    const double diff = std::abs(flow.velocity.x[i] - exact.velocity(g.face_x_coord(i)));
    e.v_max_rel = std::max(e.v_max_rel, diff / v_scale);
  }
  return e;
}

const BoundaryConditions kPressure10{{"left", BoundaryCondition::pressure(1.0)},
                                     {"right", BoundaryCondition::pressure(0.0)}};
const BoundaryConditions kVelocityIn{{"left", BoundaryCondition::normal_velocity(-1.0)},
                                     {"right", BoundaryCondition::pressure(0.0)}};

}  // namespace

TEST_CASE("1D Darcy with a face-aligned interface is machine exact") {
  auto g = StructuredGrid::interval(64, 0.0, 1.0);
  auto k = two_region_permeability(g, 0.25, 10.0, 1.0);
  auto flow = solve_flow(g, k, MaterialModel::darcy(), kPressure10);
  auto exact = analytic::solve_1d(MaterialModel::darcy(), Driving::PressureDriven,
                                  {0.25, 10.0, 1.0});
  auto e = compare_1d(g, flow, exact);
  CHECK(e.p_max_rel <= 1e-13);
  CHECK(e.v_max_rel <= 1e-13);
  CHECK(flow.picard_iterations == 1);
  CHECK(total_dissipation(g, k, MaterialModel::darcy(), flow) ==
        doctest::Approx(exact.dissipation).epsilon(1e-12));
}

TEST_CASE("1D pressure-dependent laws converge at second order") {
  struct Case {
    MaterialModel model;
    Driving driving;
  };
  const Case cases[] = {
      {MaterialModel::barus(1.0), Driving::PressureDriven},
      {MaterialModel::linearized_barus(1.0), Driving::VelocityDriven},
  };
  for (const auto& c : cases) {
    const std::string label = std::string(to_string(c.model.law)) + " " + to_string(c.driving);
    CAPTURE(label);
    auto exact = analytic::solve_1d(c.model, c.driving, {0.25, 10.0, 1.0});
    const auto& bcs = c.driving == Driving::PressureDriven ? kPressure10 : kVelocityIn;
    SolverSettings settings;
    settings.picard_tol = 1e-12;
    double prev_err = 0.0;
    for (int lvl = 0; lvl < 3; ++lvl) {
      const int n = 64 << lvl;
      auto g = StructuredGrid::interval(n, 0.0, 1.0);
      auto k = two_region_permeability(g, 0.25, 10.0, 1.0);
      auto flow = solve_flow(g, k, c.model, bcs, 0.0, settings);
      auto e = compare_1d(g, flow, exact);
      if (lvl > 0) {
        const double order = std::log2(prev_err / e.p_max_rel);
        CHECK(order >= 1.9);
      }
      if (lvl == 2) CHECK(e.p_max_rel <= 2e-5);
      prev_err = e.p_max_rel;
    }
  }
}

TEST_CASE("1D Darcy-Forchheimer is exact at the Picard fixed point") {
  // The face speed equals the constant flux exactly, so the converged drag
  // multiplier carries no quadrature error in either driving mode.
  SolverSettings settings;
  settings.picard_tol = 1e-12;
  for (Driving d : {Driving::PressureDriven, Driving::VelocityDriven}) {
    CAPTURE(to_string(d) != nullptr);
    auto model = MaterialModel::darcy_forchheimer(1.0);
    auto exact = analytic::solve_1d(model, d, {0.25, 10.0, 1.0});
    auto g = StructuredGrid::interval(48, 0.0, 1.0);
    auto k = two_region_permeability(g, 0.25, 10.0, 1.0);
    auto flow = solve_flow(g, k, model, d == Driving::PressureDriven ? kPressure10 : kVelocityIn,
                           0.0, settings);
    auto e = compare_1d(g, flow, exact);
    CHECK(e.p_max_rel <= 1e-12);
    CHECK(e.v_max_rel <= 1e-12);
    CHECK(flow.velocity.x[10] == doctest::Approx(exact.flow_constant).epsilon(1e-12));
    CHECK(total_dissipation(g, k, model, flow) ==
          doctest::Approx(exact.dissipation).epsilon(1e-11));
  }
}

TEST_CASE("1D velocity-driven Darcy is exact and respects the inflow sign convention") {
  auto g = StructuredGrid::interval(50, 0.0, 1.0);
  auto k = two_region_permeability(g, 0.3, 10.0, 1.0);
  auto flow = solve_flow(g, k, MaterialModel::darcy(), kVelocityIn);
  auto exact = analytic::solve_1d(MaterialModel::darcy(), Driving::VelocityDriven,
                                  {0.3, 10.0, 1.0});
  auto e = compare_1d(g, flow, exact);
  CHECK(e.p_max_rel <= 1e-13);
  CHECK(flow.velocity.x[25] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("annulus Darcy is machine exact with exact log resistances") {
  const int n = 128;  // interface 0.55 sits on a face: (0.55-0.1)/0.9*128 = 64
  auto g = StructuredGrid::annulus(n, 0.1, 1.0);
  auto k = two_region_permeability(g, 0.55, 10.0, 1.0);
  BoundaryConditions bcs{{"inner", BoundaryCondition::pressure(100.0)},
                         {"outer", BoundaryCondition::pressure(1.0)}};
  auto flow = solve_flow(g, k, MaterialModel::darcy(), bcs);
  auto exact = analytic::solve_annulus({0.1, 1.0, 0.55, 10.0, 1.0}, Driving::PressureDriven,
                                       100.0, 1.0, 0.0, 1.0);
  auto e = compare_1d(g, flow, exact);
  CHECK(e.p_max_rel <= 1e-12);
  CHECK(e.v_max_rel <= 1e-12);
  CHECK(total_dissipation(g, k, MaterialModel::darcy(), flow) ==
        doctest::Approx(exact.dissipation).epsilon(2e-4));  // cell-average quadrature is O(h^2)
}

TEST_CASE("annulus Barus converges at second order to the integrated oracle") {
  auto model = MaterialModel::barus(0.01);
  auto exact = analytic::solve_annulus({0.1, 1.0, 0.55, 10.0, 1.0}, Driving::PressureDriven,
                                       100.0, 1.0, 0.0, 1.0, model);
  BoundaryConditions bcs{{"inner", BoundaryCondition::pressure(100.0)},
                         {"outer", BoundaryCondition::pressure(1.0)}};
  SolverSettings settings;
  settings.picard_tol = 1e-12;
  double prev = 0.0;
  for (int lvl = 0; lvl < 3; ++lvl) {
    const int n = 64 << lvl;
    auto g = StructuredGrid::annulus(n, 0.1, 1.0);
    auto k = two_region_permeability(g, 0.55, 10.0, 1.0);
    auto flow = solve_flow(g, k, model, bcs, 0.0, settings);
    auto e = compare_1d(g, flow, exact);
    if (lvl > 0) CHECK(std::log2(prev / e.p_max_rel) >= 1.9);
    if (lvl == 2) CHECK(e.p_max_rel <= 1e-6);
    prev = e.p_max_rel;
  }
}

TEST_CASE("spherical shell Darcy is machine exact") {
  const int n = 90;  // interface 0.55 on a face
  auto g = StructuredGrid::sphere_shell(n, 0.1, 1.0);
  auto k = two_region_permeability(g, 0.55, 10.0, 1.0);
  BoundaryConditions bcs{{"inner", BoundaryCondition::pressure(1.0)},
                         {"outer", BoundaryCondition::pressure(0.0)}};
  auto flow = solve_flow(g, k, MaterialModel::darcy(), bcs);
  auto exact = analytic::solve_sphere({0.1, 0.55, 10.0, 1.0});
  auto e = compare_1d(g, flow, exact);
  CHECK(e.p_max_rel <= 1e-12);
  CHECK(e.v_max_rel <= 1e-12);
}

TEST_CASE("2D uniform channel reproduces the 1D profile across rows") {
  auto g = StructuredGrid::cartesian(24, 16, 0.0, 1.0, 0.0, 1.0);
  BoundaryConditions bcs{{"left", BoundaryCondition::pressure(1.0)},
                         {"right", BoundaryCondition::pressure(0.0)},
                         {"bottom", BoundaryCondition::normal_velocity(0.0)},
                         {"top", BoundaryCondition::normal_velocity(0.0)}};
  Eigen::ArrayXd k = Eigen::ArrayXd::Constant(g.n_cells(), 2.0);
  auto flow = solve_flow(g, k, MaterialModel::darcy(), bcs);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      CHECK(flow.pressure[g.cell_index(i, j)] ==
            doctest::Approx(1.0 - g.cell_x(i)).epsilon(1e-10));
    }
  CHECK(mass_balance_error(g, bcs, flow, Eigen::ArrayXd::Zero(g.n_cells())) <= 1e-10);
}

TEST_CASE("2D volumetric source balances net outflow") {
  auto g = StructuredGrid::cartesian(20, 15, 0.0, 2.0, 0.0, 1.5);
  BoundaryConditions bcs{{"left", BoundaryCondition::pressure(100.0)},
                         {"right", BoundaryCondition::pressure(1.0)},
                         {"bottom", BoundaryCondition::normal_velocity(0.0)},
                         {"top", BoundaryCondition::normal_velocity(0.0)}};
  Eigen::ArrayXd k = Eigen::ArrayXd::Constant(g.n_cells(), 1.0);
  const double q = 10.0;
  auto flow = solve_flow(g, k, MaterialModel::linearized_barus(0.25), bcs, q);
  const double out = boundary_outflow(g, bcs, flow);
  CHECK(out == doctest::Approx(q * g.total_volume()).epsilon(1e-9));
  CHECK(mass_balance_error(g, bcs, flow, Eigen::ArrayXd::Constant(g.n_cells(), q)) <= 1e-9);
}

TEST_CASE("2D segmented boundary with inlet and outlet patches") {
  std::vector<BoundarySegment> segs{
      {Side::Left, 0.0, 1.0 / 3, "wall"},  {Side::Left, 1.0 / 3, 2.0 / 3, "inlet"},
      {Side::Left, 2.0 / 3, 1.0, "wall"},  {Side::Right, 0.0, 1.0, "wall"},
      {Side::Bottom, 0.0, 1.0 / 3, "wall"}, {Side::Bottom, 1.0 / 3, 2.0 / 3, "outlet"},
      {Side::Bottom, 2.0 / 3, 1.0, "wall"}, {Side::Top, 0.0, 1.0, "wall"}};
  StructuredGrid g(Geometry::Cartesian2D, 24, 24, 0.0, 1.0, 0.0, 1.0, segs);
  BoundaryConditions bcs{{"inlet", BoundaryCondition::pressure(100.0)},
                         {"outlet", BoundaryCondition::pressure(1.0)},
                         {"wall", BoundaryCondition::normal_velocity(0.0)}};
  Eigen::ArrayXd k = Eigen::ArrayXd::Constant(g.n_cells(), 1.0);
  auto flow = solve_flow(g, k, MaterialModel::darcy(), bcs);
  CHECK(mass_balance_error(g, bcs, flow, Eigen::ArrayXd::Zero(g.n_cells())) <= 1e-10);
  // inflow through the inlet, outflow through the outlet
  double inlet_flux = 0.0;
  for (int j = 8; j < 16; ++j) inlet_flux += flow.velocity.x[g.face_x_index(0, j)];
  CHECK(inlet_flux > 0.0);
}

TEST_CASE("Picard iteration reports its convergence and diverges loudly") {
  auto g = StructuredGrid::interval(32, 0.0, 1.0);
  Eigen::ArrayXd k = Eigen::ArrayXd::Constant(g.n_cells(), 1.0);
  SolverSettings settings;
  settings.picard_tol = 1e-12;
  auto flow = solve_flow(g, k, MaterialModel::darcy_forchheimer(1.0), kPressure10, 0.0,
                         settings);
  CHECK(flow.picard_iterations > 2);
  CHECK(flow.residual_norm <= 1e-12);

  SolverSettings strangled;
  strangled.picard_tol = 1e-14;
  strangled.picard_max_iterations = 2;
  CHECK_THROWS_AS(solve_flow(g, k, MaterialModel::darcy_forchheimer(1.0), kPressure10, 0.0,
                             strangled),
                  PicardDivergence);
}

TEST_CASE("repeat solves are bit-identical") {
  auto g = StructuredGrid::cartesian(16, 12, 0.0, 1.0, 0.0, 1.0);
  BoundaryConditions bcs{{"left", BoundaryCondition::pressure(2.0)},
                         {"right", BoundaryCondition::pressure(0.0)},
                         {"bottom", BoundaryCondition::normal_velocity(0.0)},
                         {"top", BoundaryCondition::normal_velocity(0.0)}};
  Eigen::ArrayXd k(g.n_cells());
  for (int c = 0; c < g.n_cells(); ++c) k[c] = 1.0 + 0.5 * std::sin(0.37 * c);
  auto a = solve_flow(g, k, MaterialModel::linearized_barus(0.5), bcs);
  auto b = solve_flow(g, k, MaterialModel::linearized_barus(0.5), bcs);
  CHECK((a.pressure == b.pressure).all());
  CHECK((a.velocity.x == b.velocity.x).all());
  CHECK((a.velocity.y == b.velocity.y).all());
}

TEST_CASE("input validation") {
  auto g = StructuredGrid::interval(8, 0.0, 1.0);
  Eigen::ArrayXd k = Eigen::ArrayXd::Constant(4, 1.0);  // wrong size
  CHECK_THROWS_AS(solve_flow(g, k, MaterialModel::darcy(), kPressure10), std::invalid_argument);
  Eigen::ArrayXd neg = Eigen::ArrayXd::Constant(8, -1.0);
  CHECK_THROWS_AS(solve_flow(g, neg, MaterialModel::darcy(), kPressure10), std::invalid_argument);
}
