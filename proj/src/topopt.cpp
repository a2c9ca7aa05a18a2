#include "porotopt/topopt.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "porotopt/dissipation.hpp"

namespace porotopt::topopt {

const char* to_string(Direction d) { return d == Direction::Maximize ? "maximize" : "minimize"; }

Direction direction_from_string(const std::string& name) {
  if (name == "maximize") return Direction::Maximize;
  if (name == "minimize") return Direction::Minimize;
  throw std::invalid_argument("unknown direction '" + name + "'");
}

void DesignProblem::validate() const {
  model.validate();
  grid.validate_boundary_conditions(bcs);
  if (!(k_low > 0.0) || !(k_high > k_low))
    throw std::invalid_argument("design: requires 0 < k_low < k_high");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("design: gamma must be in [0, 1]");
  if (!(penal >= 1.0)) throw std::invalid_argument("design: penal must be >= 1");
  if (source.size() != 0 && source.size() != grid.n_cells())
    throw std::invalid_argument("design: source must be empty or per-cell");
}

Eigen::ArrayXd DesignProblem::source_or_zero() const {
  if (source.size() == grid.n_cells()) return source;
  return Eigen::ArrayXd::Zero(grid.n_cells());
}

Eigen::SparseMatrix<double> build_filter(const StructuredGrid& grid, double radius) {
  const int nc = grid.n_cells();
  Eigen::SparseMatrix<double> w(nc, nc);
  if (radius <= 0.0) {
    w.setIdentity();
    return w;
  }
  std::vector<Eigen::Triplet<double>> trips;
  const int ri = static_cast<int>(std::ceil(radius / grid.dx()));
  const int rj = grid.is_one_dimensional() ? 0 : static_cast<int>(std::ceil(radius / grid.dy()));
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) {
      const int c = grid.cell_index(i, j);
      double sum = 0.0;
      std::vector<std::pair<int, double>> row;
      for (int dj = -rj; dj <= rj; ++dj) {
        const int jj = j + dj;
        if (jj < 0 || jj >= grid.ny()) continue;
        for (int di = -ri; di <= ri; ++di) {
          const int ii = i + di;
          if (ii < 0 || ii >= grid.nx()) continue;
          const double dist = std::hypot(di * grid.dx(), grid.is_one_dimensional() ? 0.0 : dj * grid.dy());
          const double weight = radius - dist;
          if (weight <= 0.0) continue;
          row.emplace_back(grid.cell_index(ii, jj), weight);
          sum += weight;
        }
      }
      for (const auto& [cc, weight] : row) trips.emplace_back(c, cc, weight / sum);
    }
  w.setFromTriplets(trips.begin(), trips.end());
  return w;
}

double volume_fraction(const StructuredGrid& grid, const Eigen::ArrayXd& rho) {
  double v = 0.0;
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) v += rho[grid.cell_index(i, j)] * grid.cell_volume(i);
  return v / grid.total_volume();
}

namespace {

// Transverse faces contributing to the tangential reconstruction at a face;
// mirrors face_speeds so the adjoint linearizes exactly what the primal (and
// psi) evaluate.
struct Tangential {
  int faces[4];
  int count = 0;
  double mean = 0.0;
};

Tangential tangential_at_x(const StructuredGrid& g, const FaceField& v, int i, int j) {
  Tangential t;
  double sum = 0.0;
  for (int ci : {i - 1, i}) {
    if (ci < 0 || ci >= g.nx()) continue;
    t.faces[t.count++] = g.face_y_index(ci, j);
    t.faces[t.count++] = g.face_y_index(ci, j + 1);
    sum += v.y[g.face_y_index(ci, j)] + v.y[g.face_y_index(ci, j + 1)];
  }
  t.mean = sum / t.count;
  return t;
}

Tangential tangential_at_y(const StructuredGrid& g, const FaceField& v, int i, int j) {
  Tangential t;
  double sum = 0.0;
  for (int cj : {j - 1, j}) {
    if (cj < 0 || cj >= g.ny()) continue;
    t.faces[t.count++] = g.face_x_index(i, cj);
    t.faces[t.count++] = g.face_x_index(i + 1, cj);
    sum += v.x[g.face_x_index(i, cj)] + v.x[g.face_x_index(i + 1, cj)];
  }
  t.mean = sum / t.count;
  return t;
}

int pressure_column(int n_flux_unknowns, int cell) { return n_flux_unknowns + cell; }

}  // namespace

Eigen::ArrayXd dissipation_gradient_k(const StructuredGrid& grid,
                                      const Eigen::ArrayXd& permeability,
                                      const MaterialModel& model, const BoundaryConditions& bcs,
                                      const Eigen::ArrayXd& source, const FlowState& flow,
                                      double* phi_out) {
  (void)source;
  const int nc = grid.n_cells();
  const FaceSet faces = FaceSet::build(grid, bcs);

  // Flux unknown ids (Neumann faces are data, not unknowns).
  std::vector<int> uid_x(faces.x.size(), -1), uid_y(faces.y.size(), -1);
  int n_flux = 0;
  for (size_t f = 0; f < faces.x.size(); ++f)
    if (faces.x[f].kind != FaceRecord::Kind::Neumann) uid_x[f] = n_flux++;
  for (size_t f = 0; f < faces.y.size(); ++f)
    if (faces.y[f].kind != FaceRecord::Kind::Neumann) uid_y[f] = n_flux++;
  const int n = n_flux + nc;

  // Cell-centered state entering the dissipation quadrature.
  Eigen::ArrayXd vxbar, vybar;
  cell_average_velocity(grid, flow.velocity, vxbar, vybar);
  const Eigen::ArrayXd s_cell = (vxbar.square() + vybar.square()).sqrt();

  Eigen::ArrayXd vols(nc);
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) vols[grid.cell_index(i, j)] = grid.cell_volume(i);

  double phi = 0.0;
  Eigen::ArrayXd g_cell(nc);
  for (int c = 0; c < nc; ++c) {
    g_cell[c] = drag_multiplier(model, flow.pressure[c], s_cell[c]);
    phi += vols[c] * (model.mu0 / permeability[c]) * g_cell[c] * s_cell[c] * s_cell[c];
  }
  if (phi_out != nullptr) *phi_out = phi;

  // Face-centered state entering the momentum residuals.
  const Eigen::ArrayXd pf_x = face_pressures(faces.x, flow.pressure);
  const Eigen::ArrayXd pf_y = face_pressures(faces.y, flow.pressure);
  Eigen::ArrayXd sf_x, sf_y;
  face_speeds(grid, flow.velocity, sf_x, sf_y);

  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(12 * static_cast<size_t>(n));

  // d phi / d F_f for the faces feeding each cell's average speed.
  auto add_phi_flux = [&](const std::vector<FaceRecord>& list, const std::vector<int>& uid,
                          const Eigen::ArrayXd& vbar) {
    for (size_t f = 0; f < list.size(); ++f) {
      if (uid[f] < 0) continue;
      const FaceRecord& r = list[f];
      for (int c : {r.cell_minus, r.cell_plus}) {
        if (c < 0 || s_cell[c] <= 0.0) continue;
        const double dgds = drag_multiplier_dspeed(model, flow.pressure[c], s_cell[c]);
        const double coef =
            vols[c] * (model.mu0 / permeability[c]) *
            (dgds * s_cell[c] * s_cell[c] + 2.0 * g_cell[c] * s_cell[c]);
        const double ds_dF = vbar[c] / s_cell[c] * 0.5 / r.area;
        b[uid[f]] += coef * ds_dF;
      }
    }
  };
  add_phi_flux(faces.x, uid_x, vxbar);
  add_phi_flux(faces.y, uid_y, vybar);
  for (int c = 0; c < nc; ++c)
    b[pressure_column(n_flux, c)] = vols[c] * (model.mu0 / permeability[c]) *
                                    drag_multiplier_dp(model, flow.pressure[c], s_cell[c]) *
                                    s_cell[c] * s_cell[c];

  // Momentum rows (one per flux unknown) and continuity columns.
  std::vector<double> resistance_x(faces.x.size(), 0.0), resistance_y(faces.y.size(), 0.0);
  std::vector<double> g_face_x(faces.x.size(), 1.0), g_face_y(faces.y.size(), 1.0);

  auto momentum_common = [&](const FaceRecord& r, int row, double resistance, double g_face,
                             double flux, double pf) {
    trips.emplace_back(row, row, resistance * g_face);
    const double dgdp = drag_multiplier_dp(model, pf, 0.0);
    if (dgdp != 0.0) {
      // face pressure is the mean of the adjacent cell values (boundary value
      // fixed on Dirichlet faces)
      for (int c : {r.cell_minus, r.cell_plus})
        if (c >= 0)
          trips.emplace_back(row, pressure_column(n_flux, c), resistance * flux * dgdp * 0.5);
    }
    if (r.cell_minus >= 0) trips.emplace_back(row, pressure_column(n_flux, r.cell_minus), -1.0);
    if (r.cell_plus >= 0) trips.emplace_back(row, pressure_column(n_flux, r.cell_plus), 1.0);
    // continuity: flux leaves cell_minus, enters cell_plus
    if (r.cell_minus >= 0) trips.emplace_back(pressure_column(n_flux, r.cell_minus), row, 1.0);
    if (r.cell_plus >= 0) trips.emplace_back(pressure_column(n_flux, r.cell_plus), row, -1.0);
  };

  const bool speed_coupled = model.depends_on_speed();
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i <= grid.nx(); ++i) {
      const size_t f = static_cast<size_t>(grid.face_x_index(i, j));
      const int row = uid_x[f];
      if (row < 0) continue;
      const FaceRecord& r = faces.x[f];
      const double resistance = face_base_resistance(r, permeability, model.mu0);
      const double g_face = drag_multiplier(model, pf_x[f], sf_x[f]);
      resistance_x[f] = resistance;
      g_face_x[f] = g_face;
      const double flux = flow.velocity.x[f] * r.area;
      momentum_common(r, row, resistance, g_face, flux, pf_x[f]);
      if (speed_coupled && sf_x[f] > 0.0) {
        const double dgds = drag_multiplier_dspeed(model, pf_x[f], sf_x[f]);
        const double vn = flow.velocity.x[f];
        trips.emplace_back(row, row,
                           resistance * flux * dgds * vn / (sf_x[f] * r.area));
        if (!faces.y.empty()) {
          const Tangential t = tangential_at_x(grid, flow.velocity, i, j);
          for (int m = 0; m < t.count; ++m) {
            const int tf = t.faces[m];
            if (uid_y[tf] < 0) continue;
            trips.emplace_back(row, uid_y[tf],
                               resistance * flux * dgds * t.mean /
                                   (sf_x[f] * t.count * faces.y[tf].area));
          }
        }
      }
    }
  if (!faces.y.empty())
    for (int j = 0; j <= grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const size_t f = static_cast<size_t>(grid.face_y_index(i, j));
        const int row = uid_y[f];
        if (row < 0) continue;
        const FaceRecord& r = faces.y[f];
        const double resistance = face_base_resistance(r, permeability, model.mu0);
        const double g_face = drag_multiplier(model, pf_y[f], sf_y[f]);
        resistance_y[f] = resistance;
        g_face_y[f] = g_face;
        const double flux = flow.velocity.y[f] * r.area;
        momentum_common(r, row, resistance, g_face, flux, pf_y[f]);
        if (speed_coupled && sf_y[f] > 0.0) {
          const double dgds = drag_multiplier_dspeed(model, pf_y[f], sf_y[f]);
          const double vn = flow.velocity.y[f];
          trips.emplace_back(row, row,
                             resistance * flux * dgds * vn / (sf_y[f] * r.area));
          const Tangential t = tangential_at_y(grid, flow.velocity, i, j);
          for (int m = 0; m < t.count; ++m) {
            const int tf = t.faces[m];
            if (uid_x[tf] < 0) continue;
            trips.emplace_back(row, uid_x[tf],
                               resistance * flux * dgds * t.mean /
                                   (sf_y[f] * t.count * faces.x[tf].area));
          }
        }
      }

  Eigen::SparseMatrix<double> jac(n, n);
  jac.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(Eigen::SparseMatrix<double>(jac.transpose()));
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("adjoint: factorization of the coupled system failed");
  const Eigen::VectorXd psi = lu.solve(b);

  // dPhi/dk_c = explicit quadrature term minus the adjoint-weighted momentum
  // sensitivity through the half-segment resistances.
  Eigen::ArrayXd grad(nc);
  for (int c = 0; c < nc; ++c)
    grad[c] = -vols[c] * model.mu0 / (permeability[c] * permeability[c]) * g_cell[c] * s_cell[c] *
              s_cell[c];
  auto add_adjoint_term = [&](const std::vector<FaceRecord>& list, const std::vector<int>& uid,
                              const std::vector<double>& g_face, const FaceField& v, bool is_x) {
    for (size_t f = 0; f < list.size(); ++f) {
      if (uid[f] < 0) continue;
      const FaceRecord& r = list[f];
      const double flux = (is_x ? v.x[f] : v.y[f]) * r.area;
      if (r.cell_minus >= 0) {
        const double dR = -model.mu0 * r.geo_minus /
                          (permeability[r.cell_minus] * permeability[r.cell_minus]);
        grad[r.cell_minus] -= psi[uid[f]] * dR * g_face[f] * flux;
      }
      if (r.cell_plus >= 0) {
        const double dR =
            -model.mu0 * r.geo_plus / (permeability[r.cell_plus] * permeability[r.cell_plus]);
        grad[r.cell_plus] -= psi[uid[f]] * dR * g_face[f] * flux;
      }
    }
  };
  add_adjoint_term(faces.x, uid_x, g_face_x, flow.velocity, true);
  if (!faces.y.empty()) add_adjoint_term(faces.y, uid_y, g_face_y, flow.velocity, false);
  return grad;
}

Objective objective_and_gradient(const DesignProblem& prob,
                                 const Eigen::SparseMatrix<double>& filter,
                                 const Eigen::ArrayXd& rho, const SolverSettings& solver) {
  Objective out;
  out.rho_physical = (filter * rho.matrix()).array();
  DensityField density{out.rho_physical, prob.k_low, prob.k_high, prob.penal};
  density.validate();
  out.permeability = interpolate_permeability(density);
  const Eigen::ArrayXd source = prob.source_or_zero();
  out.flow = solve_flow(prob.grid, out.permeability, prob.model, prob.bcs, source, solver);
  const Eigen::ArrayXd dk = dissipation_gradient_k(prob.grid, out.permeability, prob.model,
                                                   prob.bcs, source, out.flow, &out.phi);
  const Eigen::ArrayXd chain = dk * interpolate_permeability_drho(density);
  out.d_phi_d_rho = (filter.transpose() * chain.matrix()).array();
  return out;
}

namespace {

struct OcResult {
  Eigen::ArrayXd rho;
  double lagrange_lo = 0.0;
  double lagrange_hi = 0.0;
};

// Multiplicative optimality-criteria step for minimizing J subject to the
// filtered volume bound. Returns the feasible-side bisection result.
OcResult oc_step(const StructuredGrid& grid, const Eigen::SparseMatrix<double>& filter,
                 const Eigen::ArrayXd& rho, const Eigen::ArrayXd& dJ_drho, double gamma,
                 double move, double eta, double volume_tol) {
  const int nc = static_cast<int>(rho.size());
  Eigen::ArrayXd vols(nc);
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) vols[grid.cell_index(i, j)] = grid.cell_volume(i);
  const Eigen::ArrayXd dV_drho = (filter.transpose() * vols.matrix()).array();
  const Eigen::ArrayXd descent = (-dJ_drho).max(0.0);

  auto candidate = [&](double lam) {
    Eigen::ArrayXd next(nc);
    for (int c = 0; c < nc; ++c) {
      const double b = descent[c] / (lam * dV_drho[c]);
      const double target = rho[c] * std::pow(b, eta);
      next[c] = std::clamp(target, std::max(0.0, rho[c] - move), std::min(1.0, rho[c] + move));
    }
    return next;
  };
  auto vol_of = [&](const Eigen::ArrayXd& r) {
    return volume_fraction(grid, (filter * r.matrix()).array());
  };

  double lo = 1e-30, hi = 1e30;
  Eigen::ArrayXd at_lo = candidate(lo);
  if (vol_of(at_lo) <= gamma) {
    // Constraint inactive: take the unconstrained ascent step.
    return {at_lo, lo, lo};
  }
  Eigen::ArrayXd feasible = candidate(hi);
  if (vol_of(feasible) > gamma)
    throw std::runtime_error("volume bisection: no feasible multiplier (initial design infeasible?)");
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    const Eigen::ArrayXd cand = candidate(mid);
    const double v = vol_of(cand);
    if (v > gamma) {
      lo = mid;
    } else {
      hi = mid;
      feasible = cand;
      if (gamma - v <= volume_tol * gamma) break;
    }
    if (hi / lo < 1.0 + 1e-13) break;
  }
  return {feasible, lo, hi};
}

}  // namespace

OptimizerState optimize(const DesignProblem& prob, const Eigen::ArrayXd& rho0,
                        const OptimizerSettings& settings, const IterationCallback& cb) {
  prob.validate();
  const Eigen::SparseMatrix<double> filter = build_filter(prob.grid, prob.filter_radius);
  const int nc = prob.grid.n_cells();

  Eigen::ArrayXd rho;
  if (rho0.size() == 0) {
    rho = Eigen::ArrayXd::Constant(nc, prob.gamma);
  } else if (rho0.size() == nc) {
    rho = rho0.min(1.0).max(0.0);
    const double v = volume_fraction(prob.grid, (filter * rho.matrix()).array());
    if (v > prob.gamma * (1.0 + 1e-12) + 1e-15)
      throw std::invalid_argument("optimize: initial rho violates the volume constraint");
  } else {
    throw std::invalid_argument("optimize: rho0 must be empty or per-cell");
  }

  if (settings.jitter > 0.0) {
    std::mt19937_64 rng(settings.seed);
    auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int c = 0; c < nc; ++c)
      rho[c] = std::clamp(rho[c] + settings.jitter * (2.0 * uniform() - 1.0), 0.0, 1.0);
    const double v = volume_fraction(prob.grid, (filter * rho.matrix()).array());
    if (v > prob.gamma) {
      if (prob.gamma <= 0.0) rho.setZero();
      else rho *= prob.gamma / v;  // linear filter: scales the volume exactly
    }
  }

  const double sign = prob.direction == Direction::Maximize ? -1.0 : 1.0;
  Objective obj = objective_and_gradient(prob, filter, rho, settings.solver);

  OptimizerState state;
  state.rho = rho;
  state.rho_physical = obj.rho_physical;
  state.permeability = obj.permeability;
  state.flow = obj.flow;
  state.phi_history.push_back(obj.phi);
  state.volume_history.push_back(volume_fraction(prob.grid, obj.rho_physical));
  state.change_history.push_back(0.0);
  if (cb) cb(state);

  for (int it = 1; it <= settings.max_iterations; ++it) {
    const Eigen::ArrayXd dJ = sign * obj.d_phi_d_rho;
    double move = settings.move;
    bool accepted = false;
    Eigen::ArrayXd rho_new;
    Objective obj_new;
    OcResult oc;
    while (move >= 1e-6) {
      oc = oc_step(prob.grid, filter, rho, dJ, prob.gamma, move, settings.eta,
                   settings.volume_tol);
      rho_new = oc.rho;
      obj_new = objective_and_gradient(prob, filter, rho_new, settings.solver);
      const double j_old = sign * obj.phi;
      const double j_new = sign * obj_new.phi;
      if (j_new <= j_old + 1e-12 * std::abs(j_old)) {
        accepted = true;
        break;
      }
      move *= 0.5;  // objective regressed: shorten the step and retry
    }
    if (!accepted) break;

    state.change = (rho_new - rho).abs().maxCoeff();
    rho = rho_new;
    obj = obj_new;
    state.rho = rho;
    state.rho_physical = obj.rho_physical;
    state.permeability = obj.permeability;
    state.flow = obj.flow;
    state.iterations = it;
    state.lagrange_lo = oc.lagrange_lo;
    state.lagrange_hi = oc.lagrange_hi;
    state.phi_history.push_back(obj.phi);
    state.volume_history.push_back(volume_fraction(prob.grid, obj.rho_physical));
    state.change_history.push_back(state.change);
    if (cb) cb(state);
    if (state.change < settings.change_tol) break;
  }
  return state;
}

double interface_position(const StructuredGrid& grid, const Eigen::ArrayXd& rho_physical) {
  if (!grid.is_one_dimensional())
    throw std::invalid_argument("interface_position expects a 1D or radial grid");
  int last_high = -1;
  for (int i = 0; i < grid.nx(); ++i)
    if (rho_physical[i] >= 0.5) last_high = i;
  if (last_high < 0) return grid.x0();
  if (last_high == grid.nx() - 1) return grid.x1();
  const double r0 = rho_physical[last_high], r1 = rho_physical[last_high + 1];
  const double frac = r0 == r1 ? 0.5 : (r0 - 0.5) / (r0 - r1);
  return grid.cell_x(last_high) + frac * grid.dx();
}

double binary_fraction(const Eigen::ArrayXd& rho, double lo, double hi) {
  if (rho.size() == 0) return 1.0;
  const auto outside = ((rho <= lo) || (rho >= hi)).count();
  return static_cast<double>(outside) / static_cast<double>(rho.size());
}

}  // namespace porotopt::topopt
