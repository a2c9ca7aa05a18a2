#include "porotopt/analytic.hpp"

#include <cmath>

namespace porotopt::analytic {

namespace {
constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void domain_error(const char* what) { throw std::invalid_argument(what); }
}  // namespace

void InterfaceLayout1D::validate() const {
  if (!(xi >= 0.0 && xi <= 1.0)) domain_error("1D layout: xi must lie in [0, 1]");
  if (!(k1 > 0.0 && k2 > 0.0)) domain_error("1D layout: permeabilities must be > 0");
}

void AnnulusLayout::validate() const {
  if (!(r_i > 0.0 && r_o > r_i)) domain_error("annulus layout: requires 0 < r_i < r_o");
  if (!(xi >= r_i && xi <= r_o)) domain_error("annulus layout: xi must lie in [r_i, r_o]");
  if (!(k1 > 0.0 && k2 > 0.0)) domain_error("annulus layout: permeabilities must be > 0");
}

void SphereLayout::validate() const {
  if (!(r_i > 0.0 && r_i < 1.0)) domain_error("sphere layout: requires 0 < r_i < 1");
  if (!(xi >= r_i && xi <= 1.0)) domain_error("sphere layout: xi must lie in [r_i, 1]");
  if (!(k1 > 0.0 && k2 > 0.0)) domain_error("sphere layout: permeabilities must be > 0");
}

double upsilon_1d(const InterfaceLayout1D& l) {
  l.validate();
  return l.xi / l.k1 + (1.0 - l.xi) / l.k2;
}

double upsilon_2d(const AnnulusLayout& l) {
  l.validate();
  return std::log(l.xi / l.r_i) / l.k1 + std::log(l.r_o / l.xi) / l.k2;
}

double upsilon_3d(const SphereLayout& l) {
  l.validate();
  const double bracket =
      1.0 / (l.k1 * l.r_i) - 1.0 / l.k2 + (1.0 / l.xi) * (1.0 / l.k2 - 1.0 / l.k1);
  return 1.0 / bracket;
}

double AnalyticSolution::pressure(double x) const {
  switch (family) {
    case Family::Interval: {
      const double C = flow_constant;
      if (driving == Driving::PressureDriven) {
        switch (law) {
          case DragLaw::Darcy:
            return x <= xi ? 1.0 - C * x / k1 : C * (1.0 - x) / k2;
          case DragLaw::Barus:
            if (beta == 0.0) return x <= xi ? 1.0 - C * x / k1 : C * (1.0 - x) / k2;
            return x <= xi ? -std::log1p(beta * C * x / k1 + std::expm1(-beta)) / beta
                           : -std::log1p(-beta * C * (1.0 - x) / k2) / beta;
          case DragLaw::DarcyForchheimer: {
            const double m = 1.0 + beta * C;
            return x <= xi ? 1.0 - m * C * x / k1 : m * C * (1.0 - x) / k2;
          }
          default: break;
        }
      } else {
        switch (law) {
          case DragLaw::Darcy:
            return x <= xi ? upsilon - x / k1 : (1.0 - x) / k2;
          case DragLaw::LinearizedBarus:
            if (beta == 0.0) return x <= xi ? upsilon - x / k1 : (1.0 - x) / k2;
            return x <= xi ? std::expm1(beta * (upsilon - x / k1)) / beta
                           : std::expm1(beta * (1.0 - x) / k2) / beta;
          case DragLaw::DarcyForchheimer: {
            const double m = 1.0 + beta;
            return x <= xi ? m * (upsilon - x / k1) : m * (1.0 - x) / k2;
          }
          default: break;
        }
      }
      domain_error("analytic 1D pressure: unsupported law");
    }
    case Family::Annulus: {
      const double C = flow_constant;
      if (law == DragLaw::Barus && beta != 0.0) {
        // exp(-beta p(r)) accumulates the resistance integral from r_i.
        const double g = x <= xi ? std::log(x / r_i) / k1
                                 : std::log(xi / r_i) / k1 + std::log(x / xi) / k2;
        return -std::log(std::exp(-beta * p_in) + beta * mu * C * g) / beta;
      }
      return x <= xi ? p_in - C * mu / k1 * std::log(x / r_i)
                     : p_out + C * mu / k2 * std::log(r_o / x);
    }
    case Family::Sphere: {
      const double A = flow_constant;
      const double B1 = 1.0 - A / (k1 * r_i);
      const double B2 = -A / k2;
      return x <= xi ? A / (k1 * x) + B1 : A / (k2 * x) + B2;
    }
  }
  return 0.0;
}

double AnalyticSolution::velocity(double x) const {
  switch (family) {
    case Family::Interval: return flow_constant;
    case Family::Annulus: return flow_constant / x;
    case Family::Sphere: return flow_constant / (x * x);
  }
  return 0.0;
}

AnalyticSolution solve_1d(const MaterialModel& model, Driving driving,
                          const InterfaceLayout1D& layout) {
  model.validate();
  const double U = upsilon_1d(layout);

  AnalyticSolution s;
  s.family = AnalyticSolution::Family::Interval;
  s.driving = driving;
  s.law = model.law;
  s.xi = layout.xi;
  s.k1 = layout.k1;
  s.k2 = layout.k2;
  s.upsilon = U;
  s.p_in = driving == Driving::PressureDriven ? 1.0 : 0.0;
  s.p_out = 0.0;

  if (driving == Driving::PressureDriven) {
    switch (model.law) {
      case DragLaw::Darcy:
        s.flow_constant = 1.0 / U;
        s.dissipation = s.flow_constant;
        break;
      case DragLaw::Barus: {
        s.beta = model.beta_b;
        if (s.beta == 0.0) {
          s.flow_constant = 1.0 / U;
        } else {
          s.flow_constant = -std::expm1(-s.beta) / (s.beta * U);
        }
        s.dissipation = s.flow_constant;
        break;
      }
      case DragLaw::DarcyForchheimer: {
        s.beta = model.beta_f;
        // Positive quadratic root of beta C^2 + C = 1/U in cancellation-free
        // form; the negative root is unphysical (flow against the gradient).
        const double inv_u = 1.0 / U;
        s.flow_constant = 2.0 * inv_u / (1.0 + std::sqrt(1.0 + 4.0 * s.beta * inv_u));
        s.dissipation = s.flow_constant;
        break;
      }
      case DragLaw::LinearizedBarus:
        domain_error("solve_1d: pressure-driven LinearizedBarus has no closed form here; "
                     "use Barus");
    }
  } else {
    switch (model.law) {
      case DragLaw::Darcy:
        s.flow_constant = 1.0;
        s.dissipation = U;
        break;
      case DragLaw::LinearizedBarus: {
        s.beta = model.beta_b;
        s.flow_constant = 1.0;
        s.dissipation = s.beta == 0.0 ? U : std::expm1(s.beta * U) / s.beta;
        break;
      }
      case DragLaw::DarcyForchheimer: {
        s.beta = model.beta_f;
        s.flow_constant = 1.0;
        s.dissipation = (1.0 + s.beta) * U;
        break;
      }
      case DragLaw::Barus:
        domain_error("solve_1d: velocity-driven Barus is excluded; a primal solution need "
                     "not exist (use LinearizedBarus)");
    }
  }
  return s;
}

AnalyticSolution solve_annulus(const AnnulusLayout& layout, Driving driving, double p_i,
                               double p_o, double v_o, double mu, const MaterialModel& model) {
  layout.validate();
  model.validate();
  if (!(mu > 0.0)) domain_error("solve_annulus: mu must be > 0");
  const double U = upsilon_2d(layout);

  AnalyticSolution s;
  s.family = AnalyticSolution::Family::Annulus;
  s.driving = driving;
  s.law = model.law;
  s.xi = layout.xi;
  s.k1 = layout.k1;
  s.k2 = layout.k2;
  s.r_i = layout.r_i;
  s.r_o = layout.r_o;
  s.p_in = p_i;
  s.p_out = p_o;
  s.mu = mu;
  s.upsilon = U;

  if (driving == Driving::PressureDriven) {
    switch (model.law) {
      case DragLaw::Darcy:
        s.flow_constant = (p_i - p_o) / (mu * U);
        s.dissipation = 2.0 * kPi * (p_i - p_o) * (p_i - p_o) / (mu * U);
        break;
      case DragLaw::Barus: {
        s.beta = model.beta_b;
        if (s.beta == 0.0) {
          s.flow_constant = (p_i - p_o) / (mu * U);
          s.dissipation = 2.0 * kPi * (p_i - p_o) * (p_i - p_o) / (mu * U);
        } else {
          // Integrating exp(-beta p) dp = -mu C dg along the radius gives
          // C from the endpoint pressures; Phi collapses to 2 pi C (p_i-p_o).
          s.flow_constant =
              (std::exp(-s.beta * p_o) - std::exp(-s.beta * p_i)) / (s.beta * mu * U);
          s.dissipation = 2.0 * kPi * s.flow_constant * (p_i - p_o);
        }
        break;
      }
      default:
        domain_error("solve_annulus: closed forms exist for Darcy and Barus only");
    }
  } else {
    if (model.law != DragLaw::Darcy)
      domain_error("solve_annulus: velocity-driven closed form is Darcy only");
    s.flow_constant = v_o * layout.r_i;
    s.dissipation = 2.0 * kPi * mu * v_o * v_o * layout.r_i * layout.r_i * U;
    // Velocity-driven pressure is anchored at p(r_o) = p_o:
    // p(r) = p_o + mu C * (resistance integral from r to r_o).
    s.p_in = p_o + mu * s.flow_constant * U;  // resulting inner pressure
  }
  return s;
}

AnalyticSolution solve_sphere(const SphereLayout& layout) {
  const double A = upsilon_3d(layout);

  AnalyticSolution s;
  s.family = AnalyticSolution::Family::Sphere;
  s.driving = Driving::PressureDriven;
  s.law = DragLaw::Darcy;
  s.xi = layout.xi;
  s.k1 = layout.k1;
  s.k2 = layout.k2;
  s.r_i = layout.r_i;
  s.r_o = 1.0;
  s.p_in = 1.0;
  s.p_out = 0.0;
  s.upsilon = A;
  s.flow_constant = A;
  s.dissipation = 4.0 * kPi * A;
  return s;
}

InterfaceOptimum2D optimal_interface_2d(double gamma, double r_i, double r_o, double k_low,
                                        double k_high) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) domain_error("optimal_interface_2d: gamma in [0, 1]");
  if (!(r_i > 0.0 && r_o > r_i)) domain_error("optimal_interface_2d: requires 0 < r_i < r_o");
  if (!(k_low > 0.0 && k_high >= k_low))
    domain_error("optimal_interface_2d: requires 0 < k_low <= k_high");

  InterfaceOptimum2D opt;
  opt.xi_hat = std::sqrt((1.0 - gamma) * r_i * r_i + gamma * r_o * r_o);
  opt.xi_hat_outer = std::sqrt(gamma * r_i * r_i + (1.0 - gamma) * r_o * r_o);
  opt.upsilon_min_inner =
      upsilon_2d({r_i, r_o, opt.xi_hat, k_high, k_low});
  opt.upsilon_min_outer =
      upsilon_2d({r_i, r_o, opt.xi_hat_outer, k_low, k_high});
  opt.high_k_inner = true;
  return opt;
}

InterfaceOptimum3D optimal_interface_3d(double gamma, double r_i, double k_low, double k_high) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) domain_error("optimal_interface_3d: gamma in [0, 1]");
  if (!(r_i > 0.0 && r_i < 1.0)) domain_error("optimal_interface_3d: requires 0 < r_i < 1");
  if (!(k_low > 0.0 && k_high >= k_low))
    domain_error("optimal_interface_3d: requires 0 < k_low <= k_high");

  const double ri3 = r_i * r_i * r_i;
  InterfaceOptimum3D opt;
  opt.xi_hat = std::cbrt(gamma + (1.0 - gamma) * ri3);
  opt.xi_hat_outer = std::cbrt((1.0 - gamma) + gamma * ri3);
  opt.phi_max_inner = 4.0 * kPi * upsilon_3d({r_i, opt.xi_hat, k_high, k_low});
  opt.phi_max_outer = 4.0 * kPi * upsilon_3d({r_i, opt.xi_hat_outer, k_low, k_high});
  opt.high_k_inner = true;
  return opt;
}

double lemma_gap(double gamma, double r_i) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) domain_error("lemma_gap: gamma in [0, 1]");
  if (!(r_i > 0.0 && r_i <= 1.0)) domain_error("lemma_gap: requires 0 < r_i <= 1");
  const double ri3 = r_i * r_i * r_i;
  const double xi1 = std::cbrt(gamma + (1.0 - gamma) * ri3);
  const double xi2 = std::cbrt((1.0 - gamma) + gamma * ri3);
  return 1.0 + 1.0 / r_i - (1.0 / xi1 + 1.0 / xi2);
}

}  // namespace porotopt::analytic
