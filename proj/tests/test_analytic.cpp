#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "porotopt/analytic.hpp"

using namespace porotopt;
using namespace porotopt::analytic;

namespace {
constexpr double kPi = 3.14159265358979323846;

double uni(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}
}  // namespace

TEST_CASE("upsilon_1d") {
  CHECK(upsilon_1d({0.3, 10.0, 1.0}) == doctest::Approx(0.73).epsilon(1e-15));
  CHECK(upsilon_1d({0.25, 10.0, 1.0}) == doctest::Approx(0.775).epsilon(1e-15));
  // equal materials: xi-independent
  CHECK(upsilon_1d({0.2, 2.0, 2.0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(upsilon_1d({0.9, 2.0, 2.0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(upsilon_1d({1.5, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("upsilon_2d") {
  // equal materials
  CHECK(upsilon_2d({0.1, 1.0, 0.5, 2.0, 2.0}) ==
        doctest::Approx(std::log(10.0) / 2.0).epsilon(1e-15));
  CHECK(upsilon_2d({0.1, 1.0, 0.554083, 10.0, 1.0}) ==
        doctest::Approx(0.7616552148652838).epsilon(1e-14));
  // xi = r_i limit: pure outer material
  CHECK(upsilon_2d({0.1, 1.0, 0.1, 10.0, 1.0}) ==
        doctest::Approx(std::log(10.0)).epsilon(1e-15));
}

TEST_CASE("upsilon_3d is the spherical flow constant") {
  CHECK(upsilon_3d({0.1, 0.4655472033440598, 10.0, 1.0}) ==
        doctest::Approx(0.5172746703822886).epsilon(1e-14));
  // equal materials: A = k r_i / (1 - r_i)
  CHECK(upsilon_3d({0.1, 0.5, 2.0, 2.0}) == doctest::Approx(0.2222222222222222).epsilon(1e-14));
}

TEST_CASE("1D Darcy pressure-driven") {
  auto s = solve_1d(MaterialModel::darcy(), Driving::PressureDriven, {0.3, 10.0, 1.0});
  CHECK(s.flow_constant == doctest::Approx(1.36986301369863).epsilon(1e-14));
  CHECK(s.dissipation == doctest::Approx(1.36986301369863).epsilon(1e-14));
  auto t = solve_1d(MaterialModel::darcy(), Driving::PressureDriven, {0.25, 10.0, 1.0});
  CHECK(t.pressure(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(t.pressure(1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(t.pressure(0.1) == doctest::Approx(0.9870967741935484).epsilon(1e-14));
  CHECK(t.pressure(0.6) == doctest::Approx(0.5161290322580645).epsilon(1e-14));
}

TEST_CASE("1D Barus pressure-driven") {
  auto s = solve_1d(MaterialModel::barus(1.0), Driving::PressureDriven, {0.25, 10.0, 1.0});
  CHECK(s.flow_constant == doctest::Approx(0.815639430746526).epsilon(1e-14));
  CHECK(s.dissipation == doctest::Approx(0.815639430746526).epsilon(1e-14));
  CHECK(s.pressure(0.1) == doctest::Approx(0.9780708330089237).epsilon(1e-14));
  CHECK(s.pressure(0.6) == doctest::Approx(0.3949047242147184).epsilon(1e-14));
  // continuity across the interface
  CHECK(s.pressure(0.25) == doctest::Approx(0.946053205484533).epsilon(1e-13));
  CHECK(s.pressure(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(s.pressure(1.0)) <= 1e-14);
}

TEST_CASE("1D DarcyForchheimer pressure-driven takes the physical root") {
  auto one = solve_1d(MaterialModel::darcy_forchheimer(1.0), Driving::PressureDriven,
                      {0.5, 1.0, 1.0});
  CHECK(one.flow_constant == doctest::Approx(0.6180339887498949).epsilon(1e-14));
  auto s = solve_1d(MaterialModel::darcy_forchheimer(1.0), Driving::PressureDriven,
                    {0.25, 10.0, 1.0});
  CHECK(s.flow_constant == doctest::Approx(0.7410973292393958).epsilon(1e-13));
  CHECK(s.pressure(0.1) == doctest::Approx(0.9870967741935484).epsilon(1e-13));
  CHECK(s.pressure(0.6) == doctest::Approx(0.5161290322580644).epsilon(1e-13));
}

TEST_CASE("1D velocity-driven solutions") {
  auto d = solve_1d(MaterialModel::darcy(), Driving::VelocityDriven, {0.25, 10.0, 1.0});
  CHECK(d.flow_constant == 1.0);
  CHECK(d.dissipation == doctest::Approx(0.775).epsilon(1e-15));
  CHECK(d.pressure(0.1) == doctest::Approx(0.765).epsilon(1e-14));
  CHECK(d.pressure(0.6) == doctest::Approx(0.4).epsilon(1e-14));

  auto lb = solve_1d(MaterialModel::linearized_barus(1.0), Driving::VelocityDriven,
                     {0.25, 10.0, 1.0});
  CHECK(lb.dissipation == doctest::Approx(1.1705921271834425).epsilon(1e-14));
  CHECK(lb.pressure(0.1) == doctest::Approx(1.1489943746552203).epsilon(1e-14));
  CHECK(lb.pressure(0.25) == doctest::Approx(1.1170000166126748).epsilon(1e-13));
  CHECK(lb.pressure(0.6) == doctest::Approx(0.49182469764127035).epsilon(1e-14));

  auto df = solve_1d(MaterialModel::darcy_forchheimer(1.0), Driving::VelocityDriven,
                     {0.25, 10.0, 1.0});
  CHECK(df.dissipation == doctest::Approx(1.55).epsilon(1e-14));
  CHECK(df.pressure(0.1) == doctest::Approx(1.53).epsilon(1e-14));
  CHECK(df.pressure(0.6) == doctest::Approx(0.8).epsilon(1e-14));

  auto df2 = solve_1d(MaterialModel::darcy_forchheimer(0.5), Driving::VelocityDriven,
                      {0.3, 10.0, 1.0});
  CHECK(df2.dissipation == doctest::Approx(1.095).epsilon(1e-14));
}

TEST_CASE("unsupported combinations throw") {
  CHECK_THROWS_AS(
      solve_1d(MaterialModel::barus(1.0), Driving::VelocityDriven, {0.5, 1.0, 1.0}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      solve_1d(MaterialModel::linearized_barus(1.0), Driving::PressureDriven, {0.5, 1.0, 1.0}),
      std::invalid_argument);
}

TEST_CASE("Darcy limit is reached smoothly and without cancellation") {
  const InterfaceLayout1D layout{0.25, 10.0, 1.0};
  const double b = 1e-6;
  const double darcy = 1.0 / 0.775;

  // three-term series reference, truncation error O(b^3)
  auto barus = solve_1d(MaterialModel::barus(b), Driving::PressureDriven, layout);
  const double ref = darcy * (1.0 - b / 2.0 + b * b / 6.0);
  CHECK(std::abs(barus.flow_constant - ref) <= 1e-8 * ref);

  auto lb = solve_1d(MaterialModel::linearized_barus(b), Driving::VelocityDriven, layout);
  const double ref_lb = 0.775 * (1.0 + b * 0.775 / 2.0 + b * b * 0.775 * 0.775 / 6.0);
  CHECK(std::abs(lb.dissipation - ref_lb) <= 1e-8 * ref_lb);

  auto df = solve_1d(MaterialModel::darcy_forchheimer(b), Driving::PressureDriven, layout);
  const double ref_df = darcy * (1.0 - b * darcy);  // O(b^2)
  CHECK(std::abs(df.flow_constant - ref_df) <= 1e-8 * ref_df);

  // beta = 0 routes to the identical Darcy expressions
  auto b0 = solve_1d(MaterialModel::barus(0.0), Driving::PressureDriven, layout);
  CHECK(b0.flow_constant == darcy);
  CHECK(b0.pressure(0.37) ==
        solve_1d(MaterialModel::darcy(), Driving::PressureDriven, layout).pressure(0.37));
}

TEST_CASE("annulus pressure-driven Darcy, benchmark table parameters") {
  AnnulusLayout layout{0.1, 1.0, 0.55, 10.0, 1.0};
  auto s = solve_annulus(layout, Driving::PressureDriven, 100.0, 1.0, 0.0, 1.0);
  CHECK(s.upsilon == doctest::Approx(0.7683118099794629).epsilon(1e-14));
  CHECK(s.flow_constant == doctest::Approx(128.85393497029062).epsilon(1e-13));
  CHECK(s.dissipation == doctest::Approx(80151.70194678278).epsilon(1e-13));
  CHECK(s.pressure(0.1) == doctest::Approx(100.0).epsilon(1e-13));
  CHECK(s.pressure(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.pressure(0.3) == doctest::Approx(85.84394835983973).epsilon(1e-13));
  CHECK(s.pressure(0.8) == doctest::Approx(29.752924650080892).epsilon(1e-13));
  CHECK(s.velocity(0.5) == doctest::Approx(128.85393497029062 / 0.5).epsilon(1e-13));
  // pressure continuity at the interface
  const double eps = 1e-9;
  CHECK(s.pressure(0.55 - eps) == doctest::Approx(s.pressure(0.55 + eps)).epsilon(1e-7));

  // no driving
  auto z = solve_annulus(layout, Driving::PressureDriven, 5.0, 5.0, 0.0, 1.0);
  CHECK(z.flow_constant == 0.0);
  CHECK(z.dissipation == 0.0);
}

TEST_CASE("annulus pressure-driven Barus") {
  AnnulusLayout layout{0.1, 1.0, 0.55, 10.0, 1.0};
  auto s = solve_annulus(layout, Driving::PressureDriven, 100.0, 1.0, 0.0, 1.0,
                         MaterialModel::barus(0.01));
  CHECK(s.flow_constant == doctest::Approx(80.97889222792976).epsilon(1e-13));
  CHECK(s.dissipation == doctest::Approx(50371.73319798254).epsilon(1e-13));
  CHECK(s.pressure(0.1) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(s.pressure(1.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.pressure(0.3) == doctest::Approx(78.34136372964113).epsilon(1e-13));
  CHECK(s.pressure(0.8) == doctest::Approx(21.15230098306944).epsilon(1e-13));
}

TEST_CASE("annulus velocity-driven") {
  auto uniform = solve_annulus({0.1, 1.0, 0.5, 1.0, 1.0}, Driving::VelocityDriven, 0.0, 0.0,
                               1.0, 1.0);
  CHECK(uniform.dissipation == doctest::Approx(0.14467568824830931).epsilon(1e-14));
  CHECK(uniform.velocity(0.5) == doctest::Approx(0.2).epsilon(1e-14));

  auto s = solve_annulus({0.1, 1.0, 0.55, 10.0, 1.0}, Driving::VelocityDriven, 0.0, 1.0, 1.0,
                         1.0);
  CHECK(s.dissipation == doctest::Approx(0.04827445475795516).epsilon(1e-14));
  CHECK(s.pressure(0.3) == doctest::Approx(1.0658450581112653).epsilon(1e-14));
  CHECK(s.pressure(0.8) == doctest::Approx(1.0223143551314209).epsilon(1e-14));
  CHECK(s.pressure(1.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sphere solution and independent quadrature cross-check") {
  SphereLayout layout{0.1, 0.4655472033440598, 10.0, 1.0};
  auto s = solve_sphere(layout);
  CHECK(s.flow_constant == doctest::Approx(0.5172746703822886).epsilon(1e-14));
  CHECK(s.dissipation == doctest::Approx(6.500265217444318).epsilon(1e-14));
  CHECK(s.pressure(0.1) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(s.pressure(1.0)) <= 1e-13);
  CHECK(s.pressure(0.2) == doctest::Approx(0.7413626648088557).epsilon(1e-13));
  CHECK(s.pressure(0.7) == doctest::Approx(0.22168914444955234).epsilon(1e-13));
  CHECK(s.velocity(0.5) == doctest::Approx(0.5172746703822886 / 0.25).epsilon(1e-13));

  // brute-force resistance integral(dr / (k r^2)) by midpoint quadrature,
  // split at the interface so the discontinuity is not smeared
  auto midpoint = [](double a, double b, double k, int n) {
    const double h = (b - a) / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = a + (i + 0.5) * h;
      sum += h / (k * r * r);
    }
    return sum;
  };
  const double resistance = midpoint(layout.r_i, layout.xi, layout.k1, 1'000'000) +
                            midpoint(layout.xi, 1.0, layout.k2, 1'000'000);
  CHECK(s.flow_constant == doctest::Approx(1.0 / resistance).epsilon(1e-8));

  // pure-k2 shell when xi = r_i
  auto shell = solve_sphere({0.1, 0.1, 10.0, 3.0});
  CHECK(shell.flow_constant == doctest::Approx(3.0 * 0.1 / 0.9).epsilon(1e-14));
}

TEST_CASE("optimal annulus interface") {
  auto o = optimal_interface_2d(0.3, 0.1, 1.0, 1.0, 10.0);
  CHECK(o.xi_hat == doctest::Approx(0.5540758070878027).epsilon(1e-14));
  CHECK(o.xi_hat_outer == doctest::Approx(0.8384509526501833).epsilon(1e-14));
  CHECK(o.upsilon_min_inner == doctest::Approx(0.7616668984271275).epsilon(1e-14));
  CHECK(o.upsilon_min_outer == doctest::Approx(2.144005818766883).epsilon(1e-14));
  CHECK(o.high_k_inner);
  CHECK(o.upsilon_min_inner <= o.upsilon_min_outer);

  // maximal dissipation at the optimum, benchmark table parameters
  const double phi = 2 * kPi * 99.0 * 99.0 / o.upsilon_min_inner;
  CHECK(phi == doctest::Approx(80850.95902531063).epsilon(1e-13));

  CHECK(optimal_interface_2d(0.0, 0.1, 1.0).xi_hat == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(optimal_interface_2d(1.0, 0.1, 1.0).xi_hat == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("optimal sphere interface") {
  auto o = optimal_interface_3d(0.1, 0.1, 1.0, 10.0);
  CHECK(o.xi_hat == doctest::Approx(0.46554720334405975).epsilon(1e-14));
  CHECK(o.xi_hat_outer == doctest::Approx(0.9655251421474056).epsilon(1e-14));
  CHECK(o.phi_max_inner == doctest::Approx(6.500265217444318).epsilon(1e-13));
  CHECK(o.phi_max_outer == doctest::Approx(1.4012667380700679).epsilon(1e-13));
  CHECK(o.phi_max_inner >= o.phi_max_outer);
  CHECK(optimal_interface_3d(0.0, 0.1).xi_hat == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(optimal_interface_3d(1.0, 0.1).xi_hat == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("lemma gap values and endpoints") {
  CHECK(lemma_gap(0.5, 0.1) == doctest::Approx(8.480997288047105).epsilon(1e-13));
  CHECK(lemma_gap(0.1, 0.1) == doctest::Approx(7.816284293054922).epsilon(1e-13));
  CHECK(std::abs(lemma_gap(0.0, 0.37)) <= 1e-12);
  CHECK(std::abs(lemma_gap(1.0, 0.37)) <= 1e-12);
  CHECK(std::abs(lemma_gap(0.5, 1.0)) <= 1e-12);
}

TEST_CASE("randomized ordering, mean, and gap properties") {
  std::mt19937_64 rng(42);
  for (int s = 0; s < 2000; ++s) {
    const double gamma = uni(rng, 0.0, 1.0);
    const double r_o = uni(rng, 0.1, 10.0);
    const double r_i = r_o * uni(rng, 1e-4, 1.0 - 1e-9);
    const double k_low = uni(rng, 0.01, 10.0);
    const double k_high = k_low * uni(rng, 1.0, 100.0);
    auto o = optimal_interface_2d(gamma, r_i, r_o, k_low, k_high);
    CHECK(o.upsilon_min_inner <= o.upsilon_min_outer + 1e-12 * std::abs(o.upsilon_min_outer));
    CHECK(o.xi_hat * o.xi_hat_outer >= r_i * r_o * (1.0 - 1e-12));
    const double ri3 = uni(rng, 1e-4, 1.0 - 1e-12);
    CHECK(lemma_gap(gamma, ri3) >= -1e-12);
  }
  // near-degenerate shell: equality case of the mean inequality
  auto tight = optimal_interface_2d(0.5, 1.0 - 1e-9, 1.0, 1.0, 10.0);
  CHECK(tight.upsilon_min_inner == doctest::Approx(tight.upsilon_min_outer).epsilon(1e-9));
}

TEST_CASE("dissipation is monotone in the layout resistance") {
  // pressure-driven dissipation rises when Upsilon falls, velocity-driven the
  // opposite way
  InterfaceLayout1D a{0.3, 10.0, 1.0};
  InterfaceLayout1D b{0.6, 10.0, 1.0};
  const double du = upsilon_1d(b) - upsilon_1d(a);
  CHECK(du < 0.0);  // more high-permeability material
  for (auto law : {MaterialModel::darcy(), MaterialModel::barus(0.7),
                   MaterialModel::darcy_forchheimer(0.7)}) {
    auto pa = solve_1d(law, Driving::PressureDriven, a);
    auto pb = solve_1d(law, Driving::PressureDriven, b);
    CHECK((pb.dissipation - pa.dissipation) * du < 0.0);
  }
  for (auto law : {MaterialModel::darcy(), MaterialModel::linearized_barus(0.7),
                   MaterialModel::darcy_forchheimer(0.7)}) {
    auto va = solve_1d(law, Driving::VelocityDriven, a);
    auto vb = solve_1d(law, Driving::VelocityDriven, b);
    CHECK((vb.dissipation - va.dissipation) * du > 0.0);
  }
}
