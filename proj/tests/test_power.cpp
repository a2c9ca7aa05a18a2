#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "porotopt/power.hpp"
#include "porotopt/primal.hpp"

using namespace porotopt;

namespace {

const BoundaryConditions kColumnPd{{"left", BoundaryCondition::pressure(1.0)},
                                   {"right", BoundaryCondition::pressure(0.0)}};

FlowState solve_column(const MaterialModel& model, int n = 256) {
  auto grid = StructuredGrid::interval(n, 0.0, 1.0);
  return solve_flow(grid, Eigen::ArrayXd::Ones(n), model, kColumnPd);
}

}  // namespace

TEST_CASE("psi of the uniform column solution is -1/2") {
  auto grid = StructuredGrid::interval(256, 0.0, 1.0);
  const Eigen::ArrayXd k = Eigen::ArrayXd::Ones(256);
  const auto model = MaterialModel::darcy();
  const auto sol = solve_flow(grid, k, model, kColumnPd);
  // Quadratic drag work 1/2 minus inlet boundary work 1.
  CHECK(power::psi(grid, k, model, kColumnPd, sol.velocity) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(power::psi(grid, k, model, kColumnPd, FaceField::zero(grid)) == 0.0);
}

TEST_CASE("psi splits into a quadratic drag part and a linear boundary part") {
  auto grid = StructuredGrid::interval(64, 0.0, 1.0);
  Eigen::ArrayXd k(64);
  for (int i = 0; i < 64; ++i) k[i] = 1.0 + 0.5 * std::sin(0.2 * i);
  const auto model = MaterialModel::darcy();
  const auto sol = solve_flow(grid, k, model, kColumnPd);

  auto scaled = [&](double s) {
    FaceField w;
    w.x = s * sol.velocity.x;
    w.y.resize(0);
    return power::psi(grid, k, model, kColumnPd, w);
  };
  const double psi1 = scaled(1.0), psi2 = scaled(2.0);
  // psi(s w) = s^2 Q + s L determines both parts from two evaluations.
  const double quad = psi2 / 2.0 - psi1;
  const double lin = 2.0 * psi1 - psi2 / 2.0;
  CHECK(quad > 0.0);
  CHECK(scaled(3.0) == doctest::Approx(9.0 * quad + 3.0 * lin).epsilon(1e-12));
  CHECK(scaled(-1.0) == doctest::Approx(quad - lin).epsilon(1e-12));
}

TEST_CASE("pressure-dependent drag requires the frozen solution pressure") {
  auto grid = StructuredGrid::interval(32, 0.0, 1.0);
  const Eigen::ArrayXd k = Eigen::ArrayXd::Ones(32);
  const auto model = MaterialModel::barus(1.0);
  const auto sol = solve_column(model, 32);
  CHECK_THROWS_AS(power::psi(grid, k, model, kColumnPd, sol.velocity), std::invalid_argument);
  CHECK(std::isfinite(power::psi(grid, k, model, kColumnPd, sol.velocity, &sol.pressure)));
}

TEST_CASE("admissibility rejects divergent fields and velocity-boundary components") {
  auto grid = StructuredGrid::cartesian(8, 6, 0.0, 2.0, 0.0, 1.5);
  const BoundaryConditions bcs{{"left", BoundaryCondition::pressure(1.0)},
                               {"right", BoundaryCondition::pressure(0.0)},
                               {"bottom", BoundaryCondition::normal_velocity(0.0)},
                               {"top", BoundaryCondition::normal_velocity(0.0)}};
  FaceField dv = FaceField::zero(grid);
  CHECK_NOTHROW(power::check_admissible(grid, bcs, dv));

  SUBCASE("single interior face flux diverges") {
    dv.x[grid.face_x_index(4, 3)] = 1.0;
    CHECK_THROWS_AS(power::check_admissible(grid, bcs, dv), std::invalid_argument);
  }
  SUBCASE("nonzero normal component on a wall face") {
    dv.y[grid.face_y_index(3, 0)] = 1e-14;
    CHECK_THROWS_AS(power::check_admissible(grid, bcs, dv), std::invalid_argument);
  }
  SUBCASE("stream potential varying along a wall is rejected") {
    Eigen::ArrayXd phi = Eigen::ArrayXd::Zero((8 + 1) * (6 + 1));
    for (int i = 0; i <= 8; ++i) phi[i] = i;  // bottom row j = 0
    const auto pert = power::stream_potential_perturbation(grid, phi, "bad");
    CHECK_THROWS_AS(power::check_admissible(grid, bcs, pert.dv), std::invalid_argument);
  }
}

TEST_CASE("stream-potential perturbations are divergence free") {
  auto grid = StructuredGrid::cartesian(12, 9, 0.0, 2.0, 0.0, 1.5);
  Eigen::ArrayXd phi((12 + 1) * (9 + 1));
  for (int j = 0; j <= 9; ++j)
    for (int i = 0; i <= 12; ++i)
      phi[j * 13 + i] = std::sin(1.3 * i) * std::cos(0.7 * j) + 0.1 * i * j;
  const auto pert = power::stream_potential_perturbation(grid, phi, "curl");
  const double scale = std::max(pert.dv.x.abs().maxCoeff(), pert.dv.y.abs().maxCoeff());
  CHECK(power::max_cell_divergence(grid, pert.dv) <= 1e-13 * scale);
}

TEST_CASE("flux-constant perturbations fit 1D and radial grids only") {
  auto annulus = StructuredGrid::annulus(32, 0.1, 1.0);
  const BoundaryConditions bcs{{"inner", BoundaryCondition::pressure(2.0)},
                               {"outer", BoundaryCondition::pressure(1.0)}};
  const auto pert = power::flux_constant_perturbation(annulus, bcs, 1.0);
  CHECK_NOTHROW(power::check_admissible(annulus, bcs, pert.dv));
  // Same flux through every shell: v scales with 1/r.
  CHECK(pert.dv.x[0] * annulus.face_area_x(0) ==
        doctest::Approx(pert.dv.x[32] * annulus.face_area_x(32)).epsilon(1e-14));

  const BoundaryConditions mixed{{"inner", BoundaryCondition::normal_velocity(-1.0)},
                                 {"outer", BoundaryCondition::pressure(0.0)}};
  CHECK_THROWS_AS(power::flux_constant_perturbation(annulus, mixed, 1.0), std::invalid_argument);

  auto cart = StructuredGrid::cartesian(4, 4, 0.0, 1.0, 0.0, 1.0);
  const BoundaryConditions cart_bcs{{"left", BoundaryCondition::pressure(1.0)},
                                    {"right", BoundaryCondition::pressure(0.0)},
                                    {"bottom", BoundaryCondition::normal_velocity(0.0)},
                                    {"top", BoundaryCondition::normal_velocity(0.0)}};
  CHECK_THROWS_AS(power::flux_constant_perturbation(cart, cart_bcs, 1.0), std::invalid_argument);
}

TEST_CASE("constant drag is a discrete stationary minimum") {
  auto grid = StructuredGrid::cartesian(16, 12, 0.0, 2.0, 0.0, 1.5);
  const BoundaryConditions bcs{{"left", BoundaryCondition::pressure(10.0)},
                               {"right", BoundaryCondition::pressure(1.0)},
                               {"bottom", BoundaryCondition::normal_velocity(0.0)},
                               {"top", BoundaryCondition::normal_velocity(0.0)}};
  Eigen::ArrayXd k(grid.n_cells());
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i)
      k[grid.cell_index(i, j)] =
          2.0 + std::sin(2.1 * grid.cell_x(i)) * std::cos(1.7 * grid.cell_y(j));
  const auto model = MaterialModel::darcy();
  const auto sol = solve_flow(grid, k, model, bcs);
  const double psi0 = power::psi(grid, k, model, bcs, sol.velocity);

  for (const auto& pert : power::random_perturbations(grid, bcs, 3, 7, 1.0)) {
    const auto fit = power::mpt_stationarity_check(grid, k, model, bcs, sol, pert);
    CHECK(std::abs(fit.a1) <= 1e-8 * std::abs(psi0));
    CHECK(fit.a2 > 0.0);
    CHECK(fit.predicted_a1 == 0.0);
    for (double eps : power::default_epsilon_ladder()) {
      FaceField w;
      w.x = sol.velocity.x + eps * pert.dv.x;
      w.y = sol.velocity.y + eps * pert.dv.y;
      CHECK(power::psi(grid, k, model, bcs, w) >= psi0 - 1e-12 * std::abs(psi0));
    }
  }
}

TEST_CASE("velocity-dependent drag breaks stationarity by the predicted amount") {
  auto grid = StructuredGrid::interval(512, 0.0, 1.0);
  const Eigen::ArrayXd k = Eigen::ArrayXd::Ones(512);
  const auto model = MaterialModel::darcy_forchheimer(1.0);
  const auto sol = solve_flow(grid, k, model, kColumnPd);
  const auto pert = power::flux_constant_perturbation(grid, kColumnPd, 1.0);
  const auto fit = power::mpt_stationarity_check(grid, k, model, kColumnPd, sol, pert);

  // Unit-resistance column: C = (sqrt(5)-1)/2 and the drag-linearization term
  // is beta_f C^2 / 2.
  CHECK(fit.predicted_a1 == doctest::Approx(0.19098300562505258).epsilon(1e-9));
  CHECK(fit.a1 == doctest::Approx(fit.predicted_a1).epsilon(1e-2));
  CHECK(std::abs(fit.a1) > 0.1 * std::abs(fit.psi_at_solution));

  // Opposing the linear term produces a strictly better admissible field.
  FaceField w;
  w.x = sol.velocity.x - 0.02 * pert.dv.x;
  w.y.resize(0);
  CHECK(power::psi(grid, k, model, kColumnPd, w) <
        fit.psi_at_solution - 1e-6 * std::abs(fit.psi_at_solution));
}

TEST_CASE("zero-coefficient branches reduce to constant drag") {
  auto grid = StructuredGrid::interval(128, 0.0, 1.0);
  const Eigen::ArrayXd k = Eigen::ArrayXd::Ones(128);
  const auto model = MaterialModel::darcy_forchheimer(0.0);
  const auto sol = solve_flow(grid, k, model, kColumnPd);
  const auto pert = power::flux_constant_perturbation(grid, kColumnPd, 1.0);
  const auto fit = power::mpt_stationarity_check(grid, k, model, kColumnPd, sol, pert);
  CHECK(std::abs(fit.a1) <= 1e-8 * std::abs(fit.psi_at_solution));
  CHECK(fit.predicted_a1 == 0.0);
}

TEST_CASE("frozen-pressure drag is stationary and the pressure term carries the rest") {
  auto grid = StructuredGrid::interval(256, 0.0, 1.0);
  const Eigen::ArrayXd k = Eigen::ArrayXd::Ones(256);
  const auto model = MaterialModel::barus(1.0);
  const auto sol = solve_flow(grid, k, model, kColumnPd);
  const auto pert = power::flux_constant_perturbation(grid, kColumnPd, 1.0);
  const auto fit = power::mpt_stationarity_check(grid, k, model, kColumnPd, sol, pert);
  CHECK(std::abs(fit.a1) <= 1e-8 * std::abs(fit.psi_at_solution));

  const double failure =
      power::pressure_failure_term(grid, k, model, sol, Eigen::ArrayXd::Ones(256));
  CHECK(failure > 0.0);
  CHECK_THROWS_AS(power::pressure_failure_term(grid, k, model, sol, Eigen::ArrayXd::Ones(7)),
                  std::invalid_argument);
}

TEST_CASE("stationarity fit needs at least two epsilons") {
  auto grid = StructuredGrid::interval(32, 0.0, 1.0);
  const Eigen::ArrayXd k = Eigen::ArrayXd::Ones(32);
  const auto model = MaterialModel::darcy();
  const auto sol = solve_flow(grid, k, model, kColumnPd);
  const auto pert = power::flux_constant_perturbation(grid, kColumnPd, 1.0);
  CHECK_THROWS_AS(power::mpt_stationarity_check(grid, k, model, kColumnPd, sol, pert, {1e-3}),
                  std::invalid_argument);
}

TEST_CASE("epsilon ladder covers both signs of seven halving magnitudes") {
  const auto ladder = power::default_epsilon_ladder();
  REQUIRE(ladder.size() == 14);
  CHECK(ladder.front() == 1e-2);
  CHECK(ladder[1] == -1e-2);
  CHECK(ladder[12] == doctest::Approx(1.5625e-4));
}
