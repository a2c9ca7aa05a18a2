#pragma once

#include <stdexcept>

#include "porotopt/material.hpp"
#include "porotopt/nondim.hpp"

namespace porotopt::analytic {

// Two-material layouts with a single interface at xi. Material 1 occupies the
// low-coordinate (inner) region, material 2 the rest.
struct InterfaceLayout1D {
  double xi = 0.5;  // interface position in (0, 1), domain [0, 1]
  double k1 = 1.0;
  double k2 = 1.0;
  void validate() const;
};

struct AnnulusLayout {
  double r_i = 0.1;
  double r_o = 1.0;
  double xi = 0.5;  // interface radius in [r_i, r_o]
  double k1 = 1.0;  // inner region permeability
  double k2 = 1.0;
  void validate() const;
};

// Nondimensional spherical shell, outer radius 1.
struct SphereLayout {
  double r_i = 0.1;
  double xi = 0.5;  // interface radius in [r_i, 1]
  double k1 = 1.0;
  double k2 = 1.0;
  void validate() const;
};

// Layout resistance functions. The dissipation of every closed-form solution
// below is monotone in these: pressure-driven dissipation scales with the
// inverse, velocity-driven with the value itself.
double upsilon_1d(const InterfaceLayout1D& l);  // xi/k1 + (1-xi)/k2
double upsilon_2d(const AnnulusLayout& l);      // ln(xi/r_i)/k1 + ln(r_o/xi)/k2
// Spherical flow constant A = [1/(k1 r_i) - 1/k2 + (1/xi)(1/k2 - 1/k1)]^-1.
double upsilon_3d(const SphereLayout& l);

// Closed-form solution of one of the benchmark families. Pressure and
// velocity are evaluated at the axial coordinate (1D) or radius.
struct AnalyticSolution {
  enum class Family { Interval, Annulus, Sphere };

  Family family = Family::Interval;
  Driving driving = Driving::PressureDriven;
  DragLaw law = DragLaw::Darcy;
  double beta = 0.0;  // active scaled coefficient (beta_b or beta_f)
  double xi = 0.5, k1 = 1.0, k2 = 1.0;
  double r_i = 0.0, r_o = 1.0;
  double p_in = 1.0, p_out = 0.0;
  double mu = 1.0;
  double upsilon = 0.0;

  double flow_constant = 0.0;  // C (interval, annulus) or A (sphere)
  double dissipation = 0.0;    // Phi

  double pressure(double x) const;
  // Signed component along the axis (1D) or radius (annulus: C/r, sphere:
  // A/r^2).
  double velocity(double x) const;
};

// Nondimensional 1D column, p(0)=1, p(1)=0 (pressure-driven) or unit inflow
// with p(1)=0 (velocity-driven). model.beta_b / model.beta_f are interpreted
// as the scaled coefficients. Combinations without a closed form throw:
// velocity-driven Barus (a primal solution need not exist) and
// pressure-driven LinearizedBarus.
AnalyticSolution solve_1d(const MaterialModel& model, Driving driving,
                          const InterfaceLayout1D& layout);

// Darcy (default) or Barus annulus, dimensional inputs. Pressure-driven flow
// uses boundary pressures (p_i, p_o); velocity-driven prescribes the radial
// speed v_o at r_i and anchors p(r_o) = p_o (Darcy only).
AnalyticSolution solve_annulus(const AnnulusLayout& layout, Driving driving, double p_i,
                               double p_o, double v_o, double mu,
                               const MaterialModel& model = MaterialModel::darcy());

// Nondimensional spherical shell, p(r_i)=1, p(1)=0, Darcy.
AnalyticSolution solve_sphere(const SphereLayout& layout);

// Dissipation-optimal interface radii under a volume bound gamma on the
// high-permeability material. Configuration 1 places high permeability at the
// inner boundary, configuration 2 at the outer; configuration 1 always wins.
struct InterfaceOptimum2D {
  double xi_hat = 0.0;        // configuration 1 interface (the optimum)
  double xi_hat_outer = 0.0;  // configuration 2 interface
  double upsilon_min_inner = 0.0;
  double upsilon_min_outer = 0.0;
  bool high_k_inner = true;
};

struct InterfaceOptimum3D {
  double xi_hat = 0.0;
  double xi_hat_outer = 0.0;
  double phi_max_inner = 0.0;
  double phi_max_outer = 0.0;
  bool high_k_inner = true;
};

// Defaults k_low=1, k_high=10 are the built-in benchmark table values; the
// optimal xi_hat itself does not depend on them.
InterfaceOptimum2D optimal_interface_2d(double gamma, double r_i, double r_o, double k_low = 1.0,
                                        double k_high = 10.0);
InterfaceOptimum3D optimal_interface_3d(double gamma, double r_i, double k_low = 1.0,
                                        double k_high = 10.0);

// Nonnegative slack 1 + 1/r_i - (1/xi_hat_inner + 1/xi_hat_outer) of the
// spherical comparison argument; zero at gamma in {0, 1} and as r_i -> 1.
double lemma_gap(double gamma, double r_i);

}  // namespace porotopt::analytic
