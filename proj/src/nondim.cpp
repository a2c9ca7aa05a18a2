#include "porotopt/nondim.hpp"

#include <cmath>
#include <stdexcept>

namespace porotopt {

const char* to_string(Driving d) {
  return d == Driving::PressureDriven ? "pressure-driven" : "velocity-driven";
}

namespace {
// Drag multiplier at the datum pressure, the factor absorbed into mu_ref.
double datum_multiplier(DragLaw law, double beta_b, double p_datum) {
  switch (law) {
    case DragLaw::Barus: return std::exp(beta_b * p_datum);
    case DragLaw::LinearizedBarus: return 1.0 + beta_b * p_datum;
    default: return 1.0;
  }
}
}  // namespace

DimensionlessGroups nondimensionalize(const PhysicalParams& in, Driving driving, DragLaw law) {
  if (!(in.length > 0.0)) throw std::invalid_argument("nondimensionalize: length must be > 0");
  if (!(in.mu0 > 0.0)) throw std::invalid_argument("nondimensionalize: mu0 must be > 0");

  DimensionlessGroups g;
  g.driving = driving;
  g.scales.length_ref = in.length;
  g.scales.p_offset = in.p_out;
  g.scales.mu_ref = in.mu0 * datum_multiplier(law, in.beta_b, in.p_out);
  if (!(g.scales.mu_ref > 0.0))
    throw std::invalid_argument("nondimensionalize: drag multiplier at the datum pressure must "
                                "be positive");

  if (driving == Driving::PressureDriven) {
    if (!(in.p_in > in.p_out))
      throw std::invalid_argument("nondimensionalize: pressure-driven requires p_in > p_out");
    g.scales.p_ref = in.p_in - in.p_out;
    g.scales.v_ref = g.scales.length_ref * g.scales.p_ref / g.scales.mu_ref;
    g.beta_b = in.beta_b * g.scales.p_ref;
    g.beta_f = in.beta_f * g.scales.v_ref;
  } else {
    if (!(in.v_in > 0.0))
      throw std::invalid_argument("nondimensionalize: velocity-driven requires v_in > 0");
    g.scales.v_ref = in.v_in;
    g.scales.p_ref = g.scales.mu_ref * g.scales.v_ref / g.scales.length_ref;
    g.beta_b = in.beta_b * in.mu0 * g.scales.v_ref / g.scales.length_ref;
    g.beta_f = in.beta_f * g.scales.v_ref;
  }
  return g;
}

PhysicalParams redimensionalize(const DimensionlessGroups& g, DragLaw law) {
  PhysicalParams out;
  out.length = g.scales.length_ref;
  out.p_out = g.scales.p_offset;

  if (g.driving == Driving::PressureDriven) {
    out.p_in = g.scales.p_offset + g.scales.p_ref;
    out.beta_b = g.beta_b / g.scales.p_ref;
    out.beta_f = g.beta_f * g.scales.mu_ref / (g.scales.length_ref * g.scales.p_ref);
    out.mu0 = g.scales.mu_ref / datum_multiplier(law, out.beta_b, out.p_out);
    out.v_in = 0.0;
  } else {
    out.v_in = g.scales.v_ref;
    out.p_in = g.scales.p_offset;
    out.beta_f = g.beta_f / g.scales.v_ref;
    if (law == DragLaw::LinearizedBarus && g.beta_b != 0.0) {
      // beta_bar = beta_b mu0 v/L with mu0 = mu_ref / (1 + beta_b p_out).
      const double denom = g.scales.p_ref - g.beta_b * g.scales.p_offset;
      if (!(denom > 0.0))
        throw std::invalid_argument("redimensionalize: scaled beta_b incompatible with datum");
      out.beta_b = g.beta_b / denom;
    } else {
      if (law == DragLaw::Barus && g.beta_b != 0.0 && g.scales.p_offset != 0.0)
        throw std::invalid_argument(
            "redimensionalize: velocity-driven Barus with a nonzero pressure datum has no "
            "closed-form inverse scaling");
      out.beta_b = g.beta_b * g.scales.length_ref / (g.scales.mu_ref * g.scales.v_ref);
    }
    out.mu0 = g.scales.mu_ref / datum_multiplier(law, out.beta_b, out.p_out);
  }
  return out;
}

}  // namespace porotopt
