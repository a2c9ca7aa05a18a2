#include "porotopt/primal.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cmath>
#include <limits>
#include <sstream>

namespace porotopt {

namespace {

FaceRecord make_boundary_record(const StructuredGrid& grid, const BoundaryConditions& bcs,
                                Side side, double arc) {
  const auto& seg = grid.segment_at(side, arc);
  const auto& bc = bcs.at(seg.tag);
  FaceRecord f;
  f.out_sign = (side == Side::Right || side == Side::Top) ? 1.0 : -1.0;
  if (bc.kind == BoundaryCondition::Kind::PrescribedPressure) {
    f.kind = FaceRecord::Kind::Dirichlet;
    f.bc_value = bc.value;
  } else {
    f.kind = FaceRecord::Kind::Neumann;
    // bc.value is v . n_hat (outward); store the +axis component.
    f.bc_value = f.out_sign * bc.value;
  }
  return f;
}

}  // namespace

FaceSet FaceSet::build(const StructuredGrid& grid, const BoundaryConditions& bcs) {
  grid.validate_boundary_conditions(bcs);
  FaceSet set;
  set.x.resize(grid.n_faces_x());
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i <= grid.nx(); ++i) {
      FaceRecord f;
      if (i == 0) {
        f = make_boundary_record(grid, bcs, Side::Left, grid.cell_y(j));
      } else if (i == grid.nx()) {
        f = make_boundary_record(grid, bcs, Side::Right, grid.cell_y(j));
      }
      f.area = grid.face_area_x(i);
      if (i > 0) {
        f.cell_minus = grid.cell_index(i - 1, j);
        f.geo_minus = grid.half_resistance_x(i - 1, true);
      }
      if (i < grid.nx()) {
        f.cell_plus = grid.cell_index(i, j);
        f.geo_plus = grid.half_resistance_x(i, false);
      }
      set.x[grid.face_x_index(i, j)] = f;
    }
  }
  if (grid.geometry() == Geometry::Cartesian2D) {
    set.y.resize(grid.n_faces_y());
    for (int j = 0; j <= grid.ny(); ++j) {
      for (int i = 0; i < grid.nx(); ++i) {
        FaceRecord f;
        if (j == 0) {
          f = make_boundary_record(grid, bcs, Side::Bottom, grid.cell_x(i));
        } else if (j == grid.ny()) {
          f = make_boundary_record(grid, bcs, Side::Top, grid.cell_x(i));
        }
        f.area = grid.face_area_y();
        if (j > 0) {
          f.cell_minus = grid.cell_index(i, j - 1);
          f.geo_minus = grid.half_resistance_y();
        }
        if (j < grid.ny()) {
          f.cell_plus = grid.cell_index(i, j);
          f.geo_plus = grid.half_resistance_y();
        }
        set.y[grid.face_y_index(i, j)] = f;
      }
    }
  }
  return set;
}

double face_base_resistance(const FaceRecord& f, const Eigen::ArrayXd& permeability, double mu0) {
  double r = 0.0;
  if (f.cell_minus >= 0) r += f.geo_minus / permeability[f.cell_minus];
  if (f.cell_plus >= 0) r += f.geo_plus / permeability[f.cell_plus];
  return mu0 * r;
}

Eigen::ArrayXd face_pressures(const std::vector<FaceRecord>& faces, const Eigen::ArrayXd& p) {
  Eigen::ArrayXd pf(static_cast<Eigen::Index>(faces.size()));
  for (size_t f = 0; f < faces.size(); ++f) {
    const FaceRecord& r = faces[f];
    switch (r.kind) {
      case FaceRecord::Kind::Interior: pf[f] = 0.5 * (p[r.cell_minus] + p[r.cell_plus]); break;
      case FaceRecord::Kind::Dirichlet: pf[f] = 0.5 * (p[r.adjacent_cell()] + r.bc_value); break;
      case FaceRecord::Kind::Neumann: pf[f] = p[r.adjacent_cell()]; break;
    }
  }
  return pf;
}

void tangential_means(const StructuredGrid& grid, const FaceField& v, Eigen::ArrayXd& tx,
                      Eigen::ArrayXd& ty) {
  if (grid.geometry() != Geometry::Cartesian2D) {
    tx.resize(0);
    ty.resize(0);
    return;
  }
  tx.resize(grid.n_faces_x());
  ty.resize(grid.n_faces_y());
  const int nx = grid.nx(), ny = grid.ny();
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      double t = 0.0;
      int n = 0;
      for (int ci : {i - 1, i}) {
        if (ci < 0 || ci >= nx) continue;
        t += v.y[grid.face_y_index(ci, j)] + v.y[grid.face_y_index(ci, j + 1)];
        n += 2;
      }
      tx[grid.face_x_index(i, j)] = t / n;
    }
  }
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double t = 0.0;
      int n = 0;
      for (int cj : {j - 1, j}) {
        if (cj < 0 || cj >= ny) continue;
        t += v.x[grid.face_x_index(i, cj)] + v.x[grid.face_x_index(i + 1, cj)];
        n += 2;
      }
      ty[grid.face_y_index(i, j)] = t / n;
    }
  }
}

void face_speeds(const StructuredGrid& grid, const FaceField& v, Eigen::ArrayXd& sx,
                 Eigen::ArrayXd& sy) {
  sx.resize(grid.n_faces_x());
  sy.resize(grid.n_faces_y());
  if (grid.geometry() != Geometry::Cartesian2D) {
    sx = v.x.abs();
    return;
  }
  Eigen::ArrayXd tx, ty;
  tangential_means(grid, v, tx, ty);
  for (Eigen::Index f = 0; f < sx.size(); ++f) sx[f] = std::hypot(v.x[f], tx[f]);
  for (Eigen::Index f = 0; f < sy.size(); ++f) sy[f] = std::hypot(v.y[f], ty[f]);
}

namespace {

struct LinearizedSweep {
  Eigen::ArrayXd p;
  FaceField velocity;
};

// One Picard sweep: assemble the TPFA system with frozen multipliers and
// solve for cell pressures, then recover face fluxes from the momentum
// relations so discrete continuity holds to the linear solver tolerance.
LinearizedSweep sweep(const StructuredGrid& grid, const FaceSet& faces,
                      const Eigen::ArrayXd& permeability, const MaterialModel& model,
                      const Eigen::ArrayXd& source, const Eigen::ArrayXd& gx,
                      const Eigen::ArrayXd& gy, const SolverSettings& settings,
                      const Eigen::ArrayXd* warm_start) {
  const int nc = grid.n_cells();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nc);
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) {
      const int c = grid.cell_index(i, j);
      rhs[c] = source[c] * grid.cell_volume(i);
    }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * static_cast<size_t>(nc));
  Eigen::ArrayXd diag = Eigen::ArrayXd::Zero(nc);

  auto add_faces = [&](const std::vector<FaceRecord>& list, const Eigen::ArrayXd& g) {
    for (size_t f = 0; f < list.size(); ++f) {
      const FaceRecord& r = list[f];
      if (r.kind == FaceRecord::Kind::Neumann) {
        // Known flux: moves to the right-hand side of the adjacent cell. The
        // outward orientation sign of a boundary face equals out_sign.
        rhs[r.adjacent_cell()] -= r.out_sign * r.bc_value * r.area;
        continue;
      }
      const double T = 1.0 / (face_base_resistance(r, permeability, model.mu0) * g[f]);
      if (r.kind == FaceRecord::Kind::Interior) {
        diag[r.cell_minus] += T;
        diag[r.cell_plus] += T;
        trips.emplace_back(r.cell_minus, r.cell_plus, -T);
        trips.emplace_back(r.cell_plus, r.cell_minus, -T);
      } else {
        const int c = r.adjacent_cell();
        diag[c] += T;
        rhs[c] += T * r.bc_value;
      }
    }
  };
  add_faces(faces.x, gx);
  if (!faces.y.empty()) add_faces(faces.y, gy);
  for (int c = 0; c < nc; ++c) trips.emplace_back(c, c, diag[c]);

  Eigen::SparseMatrix<double> A(nc, nc);
  A.setFromTriplets(trips.begin(), trips.end());

  LinearizedSweep out;
  Eigen::VectorXd p;
  if (grid.geometry() == Geometry::Cartesian2D) {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>>
        cg;
    cg.setTolerance(settings.linear_tol);
    cg.setMaxIterations(200 * static_cast<int>(std::sqrt(double(nc))) + 2000);
    cg.compute(A);
    if (cg.info() != Eigen::Success) throw std::runtime_error("pressure solve: preconditioner failed");
    p = warm_start != nullptr ? cg.solveWithGuess(rhs, warm_start->matrix().eval())
                              : cg.solve(rhs).eval();
    if (cg.info() != Eigen::Success)
      throw std::runtime_error("pressure solve: conjugate gradient did not converge");
  } else {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success)
      throw std::runtime_error("pressure solve: factorization failed");
    p = ldlt.solve(rhs);
  }
  out.p = p.array();

  auto recover = [&](const std::vector<FaceRecord>& list, const Eigen::ArrayXd& g,
                     Eigen::ArrayXd& vel) {
    vel.resize(static_cast<Eigen::Index>(list.size()));
    for (size_t f = 0; f < list.size(); ++f) {
      const FaceRecord& r = list[f];
      if (r.kind == FaceRecord::Kind::Neumann) {
        vel[f] = r.bc_value;
        continue;
      }
      const double pm = r.cell_minus >= 0 ? out.p[r.cell_minus] : r.bc_value;
      const double pp = r.cell_plus >= 0 ? out.p[r.cell_plus] : r.bc_value;
      const double T = 1.0 / (face_base_resistance(r, permeability, model.mu0) * g[f]);
      vel[f] = T * (pm - pp) / r.area;
    }
  };
  recover(faces.x, gx, out.velocity.x);
  if (!faces.y.empty()) recover(faces.y, gy, out.velocity.y);
  else out.velocity.y.resize(0);
  return out;
}

Eigen::ArrayXd multiplier_for(const MaterialModel& model, const std::vector<FaceRecord>& faces,
                              const Eigen::ArrayXd& pf, const Eigen::ArrayXd& sf) {
  Eigen::ArrayXd g(static_cast<Eigen::Index>(faces.size()));
  for (Eigen::Index f = 0; f < g.size(); ++f) g[f] = drag_multiplier(model, pf[f], sf[f]);
  return g;
}

}  // namespace

FlowState solve_flow(const StructuredGrid& grid, const Eigen::ArrayXd& permeability,
                     const MaterialModel& model, const BoundaryConditions& bcs,
                     const Eigen::ArrayXd& source, const SolverSettings& settings) {
  model.validate();
  if (permeability.size() != grid.n_cells())
    throw std::invalid_argument("solve_flow: permeability must have one value per cell");
  if ((permeability <= 0.0).any())
    throw std::invalid_argument("solve_flow: permeability must be positive");
  if (source.size() != grid.n_cells())
    throw std::invalid_argument("solve_flow: source must have one value per cell");

  const FaceSet faces = FaceSet::build(grid, bcs);
  Eigen::ArrayXd gx = Eigen::ArrayXd::Ones(static_cast<Eigen::Index>(faces.x.size()));
  Eigen::ArrayXd gy = Eigen::ArrayXd::Ones(static_cast<Eigen::Index>(faces.y.size()));

  // First sweep with unit multipliers is the Darcy solution.
  LinearizedSweep cur = sweep(grid, faces, permeability, model, source, gx, gy, settings, nullptr);
  FlowState state;
  state.pressure = cur.p;
  state.velocity = cur.velocity;
  state.picard_iterations = 1;
  state.residual_norm = 0.0;
  if (model.is_linear() || (!model.depends_on_pressure() && !model.depends_on_speed()))
    return state;

  double relax = settings.effective_relaxation(model);
  Eigen::ArrayXd p_rel = cur.p;
  FaceField v_rel = cur.velocity;
  std::vector<double> history;
  double prev_change = std::numeric_limits<double>::infinity();
  int stalled = 0;

  for (int it = 2; it <= settings.picard_max_iterations; ++it) {
    Eigen::ArrayXd sx, sy;
    face_speeds(grid, v_rel, sx, sy);
    gx = multiplier_for(model, faces.x, face_pressures(faces.x, p_rel), sx);
    if (!faces.y.empty())
      gy = multiplier_for(model, faces.y, face_pressures(faces.y, p_rel), sy);

    const Eigen::ArrayXd p_prev = cur.p;
    const FaceField v_prev = cur.velocity;
    cur = sweep(grid, faces, permeability, model, source, gx, gy, settings, &p_prev);

    // The change metric must watch the velocity too: a uniform multiplier
    // rescales matrix and right-hand side alike, so pressure alone can be
    // stationary while the fluxes are still far from the fixed point.
    const double p_scale = std::max(cur.p.abs().maxCoeff(), 1e-300);
    double change = (cur.p - p_prev).abs().maxCoeff() / p_scale;
    double v_scale = cur.velocity.x.abs().maxCoeff();
    double v_change = (cur.velocity.x - v_prev.x).abs().maxCoeff();
    if (cur.velocity.y.size() > 0) {
      v_scale = std::max(v_scale, cur.velocity.y.abs().maxCoeff());
      v_change = std::max(v_change, (cur.velocity.y - v_prev.y).abs().maxCoeff());
    }
    change = std::max(change, v_change / std::max(v_scale, 1e-300));
    history.push_back(change);

    // A non-decreasing change signals a limit cycle of the fixed-point map;
    // damping the relaxed state restores contraction without changing the
    // fixed point itself.
    if (change >= 0.999 * prev_change) {
      if (++stalled >= 2 && relax > 0.05) {
        relax = std::max(0.05, 0.5 * relax);
        stalled = 0;
      }
    } else {
      stalled = 0;
    }
    prev_change = change;

    p_rel = relax * cur.p + (1.0 - relax) * p_rel;
    v_rel.x = relax * cur.velocity.x + (1.0 - relax) * v_rel.x;
    if (v_rel.y.size() > 0) v_rel.y = relax * cur.velocity.y + (1.0 - relax) * v_rel.y;

    if (change < settings.picard_tol) {
      state.pressure = cur.p;
      state.velocity = cur.velocity;
      state.picard_iterations = it;
      state.residual_norm = change;
      return state;
    }
    if (!std::isfinite(change)) break;
  }

  std::ostringstream os;
  os << "Picard iteration did not reach tol " << settings.picard_tol << " within "
     << settings.picard_max_iterations << " sweeps (last change "
     << (history.empty() ? 0.0 : history.back()) << ")";
  throw PicardDivergence(os.str(), history);
}

FlowState solve_flow(const StructuredGrid& grid, const Eigen::ArrayXd& permeability,
                     const MaterialModel& model, const BoundaryConditions& bcs,
                     double uniform_source, const SolverSettings& settings) {
  return solve_flow(grid, permeability, model, bcs,
                    Eigen::ArrayXd::Constant(grid.n_cells(), uniform_source), settings);
}

double boundary_outflow(const StructuredGrid& grid, const BoundaryConditions& bcs,
                        const FlowState& flow) {
  const FaceSet faces = FaceSet::build(grid, bcs);
  double out = 0.0;
  auto accumulate = [&](const std::vector<FaceRecord>& list, const Eigen::ArrayXd& v) {
    for (size_t f = 0; f < list.size(); ++f) {
      const FaceRecord& r = list[f];
      if (r.kind == FaceRecord::Kind::Interior) continue;
      out += r.out_sign * v[f] * r.area;
    }
  };
  accumulate(faces.x, flow.velocity.x);
  if (!faces.y.empty()) accumulate(faces.y, flow.velocity.y);
  return out;
}

double mass_balance_error(const StructuredGrid& grid, const BoundaryConditions& bcs,
                          const FlowState& flow, const Eigen::ArrayXd& source) {
  const double net_out = boundary_outflow(grid, bcs, flow);
  double q_total = 0.0;
  double gross = 0.0;
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i)
      q_total += source[grid.cell_index(i, j)] * grid.cell_volume(i);
  const FaceSet faces = FaceSet::build(grid, bcs);
  auto add_gross = [&](const std::vector<FaceRecord>& list, const Eigen::ArrayXd& v) {
    for (size_t f = 0; f < list.size(); ++f)
      if (list[f].kind != FaceRecord::Kind::Interior) gross += std::abs(v[f]) * list[f].area;
  };
  add_gross(faces.x, flow.velocity.x);
  if (!faces.y.empty()) add_gross(faces.y, flow.velocity.y);
  const double scale = std::max({std::abs(q_total), gross, 1e-300});
  return std::abs(net_out - q_total) / scale;
}

}  // namespace porotopt
