#pragma once

#include "porotopt/material.hpp"

namespace porotopt {

// How the 1D benchmark problems are driven: a pressure pair (p_in, p_out) or
// an inflow speed with a pressure datum at the outlet.
enum class Driving { PressureDriven, VelocityDriven };

const char* to_string(Driving d);

// Dimensional inputs of a 1D (or radially symmetric) configuration.
struct PhysicalParams {
  double p_in = 1.0;    // inlet pressure
  double p_out = 0.0;   // outlet pressure (also the pressure datum)
  double v_in = 0.0;    // inflow speed, velocity-driven only
  double length = 1.0;  // domain extent
  double mu0 = 1.0;
  double beta_b = 0.0;
  double beta_f = 0.0;
};

// Reference scales. The viscosity reference absorbs the drag multiplier at
// the outlet datum pressure, so the scaled pressure field starts at 0 there
// and the scaled coefficients stay O(1).
struct ReferenceScales {
  double p_ref = 1.0;
  double length_ref = 1.0;
  double mu_ref = 1.0;
  double v_ref = 1.0;
  double p_offset = 0.0;  // dimensional pressure mapped to scaled 0
};

struct DimensionlessGroups {
  Driving driving = Driving::PressureDriven;
  double beta_b = 0.0;           // scaled pressure coefficient
  double beta_f = 0.0;           // scaled velocity coefficient
  ReferenceScales scales;

  double scale_permeability(double k) const {
    return k / (scales.length_ref * scales.length_ref);
  }
  double unscale_pressure(double p_bar) const { return p_bar * scales.p_ref + scales.p_offset; }
  double unscale_velocity(double v_bar) const { return v_bar * scales.v_ref; }
};

// Scaled boundary data: pressure-driven maps (p_in, p_out) to (1, 0);
// velocity-driven maps the inflow speed to 1 with scaled datum pressure 0.
DimensionlessGroups nondimensionalize(const PhysicalParams& in, Driving driving, DragLaw law);

// Inverse map; nondimensionalize(redimensionalize(g)) reproduces g and
// redimensionalize(nondimensionalize(p)) reproduces p to round-off.
PhysicalParams redimensionalize(const DimensionlessGroups& groups, DragLaw law);

}  // namespace porotopt
