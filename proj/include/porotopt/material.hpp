#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace porotopt {

// Isotropic drag laws alpha(k, p, |v|) relating seepage velocity and pressure
// gradient through alpha * v + grad p = rho * b. All laws share the Darcy
// factor mu0/k times a dimensionless multiplier g:
//   Darcy:            g = 1
//   Barus:            g = exp(beta_b * p)        (p relative to the reference
//                                                 pressure absorbed into mu0)
//   LinearizedBarus:  g = 1 + beta_b * p
//   DarcyForchheimer: g = 1 + beta_f * |v|
enum class DragLaw { Darcy, Barus, LinearizedBarus, DarcyForchheimer };

inline const char* to_string(DragLaw law) {
  switch (law) {
    case DragLaw::Darcy: return "darcy";
    case DragLaw::Barus: return "barus";
    case DragLaw::LinearizedBarus: return "linearized-barus";
    case DragLaw::DarcyForchheimer: return "darcy-forchheimer";
  }
  return "darcy";
}

inline DragLaw drag_law_from_string(const std::string& name) {
  if (name == "darcy") return DragLaw::Darcy;
  if (name == "barus") return DragLaw::Barus;
  if (name == "linearized-barus") return DragLaw::LinearizedBarus;
  if (name == "darcy-forchheimer") return DragLaw::DarcyForchheimer;
  throw std::invalid_argument("unknown drag law '" + name + "'");
}

struct MaterialModel {
  DragLaw law = DragLaw::Darcy;
  double mu0 = 1.0;     // reference viscosity, > 0
  double beta_b = 0.0;  // pressure coefficient (Barus / LinearizedBarus), >= 0
  double beta_f = 0.0;  // velocity coefficient (DarcyForchheimer), >= 0

  static MaterialModel darcy(double mu0 = 1.0) { return {DragLaw::Darcy, mu0, 0.0, 0.0}; }
  static MaterialModel barus(double beta_b, double mu0 = 1.0) {
    return {DragLaw::Barus, mu0, beta_b, 0.0};
  }
  static MaterialModel linearized_barus(double beta_b, double mu0 = 1.0) {
    return {DragLaw::LinearizedBarus, mu0, beta_b, 0.0};
  }
  static MaterialModel darcy_forchheimer(double beta_f, double mu0 = 1.0) {
    return {DragLaw::DarcyForchheimer, mu0, 0.0, beta_f};
  }

  bool is_linear() const { return law == DragLaw::Darcy; }
  bool depends_on_pressure() const {
    return (law == DragLaw::Barus || law == DragLaw::LinearizedBarus) && beta_b != 0.0;
  }
  bool depends_on_speed() const { return law == DragLaw::DarcyForchheimer && beta_f != 0.0; }

  void validate() const {
    if (!(mu0 > 0.0)) throw std::invalid_argument("material: mu0 must be > 0");
    if (beta_b < 0.0) throw std::invalid_argument("material: beta_b must be >= 0");
    if (beta_f < 0.0) throw std::invalid_argument("material: beta_f must be >= 0");
  }
};

// Dimensionless drag multiplier g(p, |v|) and its partial derivatives.
inline double drag_multiplier(const MaterialModel& m, double p, double speed) {
  switch (m.law) {
    case DragLaw::Darcy: return 1.0;
    case DragLaw::Barus: return std::exp(m.beta_b * p);
    case DragLaw::LinearizedBarus: return 1.0 + m.beta_b * p;
    case DragLaw::DarcyForchheimer: return 1.0 + m.beta_f * speed;
  }
  return 1.0;
}

inline double drag_multiplier_dp(const MaterialModel& m, double p, double /*speed*/) {
  switch (m.law) {
    case DragLaw::Barus: return m.beta_b * std::exp(m.beta_b * p);
    case DragLaw::LinearizedBarus: return m.beta_b;
    default: return 0.0;
  }
}

inline double drag_multiplier_dspeed(const MaterialModel& m, double /*p*/, double /*speed*/) {
  return m.law == DragLaw::DarcyForchheimer ? m.beta_f : 0.0;
}

struct DragEvaluation {
  double alpha = 0.0;
  double d_alpha_dp = 0.0;
  double d_alpha_dspeed = 0.0;
};

// alpha = (mu0 / k) * g(p, |v|) with partial derivatives. k > 0, |v| >= 0.
inline DragEvaluation drag(const MaterialModel& m, double k, double p, double speed) {
  if (!(k > 0.0)) throw std::invalid_argument("drag: permeability must be > 0");
  if (speed < 0.0) throw std::invalid_argument("drag: speed must be >= 0");
  const double base = m.mu0 / k;
  return {base * drag_multiplier(m, p, speed), base * drag_multiplier_dp(m, p, speed),
          base * drag_multiplier_dspeed(m, p, speed)};
}

// Pointwise dissipation density phi = alpha * v . v.
inline double dissipation_density(double alpha, double vx, double vy = 0.0) {
  return alpha * (vx * vx + vy * vy);
}

}  // namespace porotopt
