#include "porotopt/power.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace porotopt::power {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double max_cell_divergence(const StructuredGrid& grid, const FaceField& dv) {
  double worst = 0.0;
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) {
      double net = dv.x[grid.face_x_index(i + 1, j)] * grid.face_area_x(i + 1) -
                   dv.x[grid.face_x_index(i, j)] * grid.face_area_x(i);
      if (grid.geometry() == Geometry::Cartesian2D)
        net += (dv.y[grid.face_y_index(i, j + 1)] - dv.y[grid.face_y_index(i, j)]) *
               grid.face_area_y();
      worst = std::max(worst, std::abs(net));
    }
  return worst;
}

void check_admissible(const StructuredGrid& grid, const BoundaryConditions& bcs,
                      const FaceField& dv, double tol) {
  if (dv.x.size() != grid.n_faces_x() || dv.y.size() != grid.n_faces_y())
    throw std::invalid_argument("perturbation: face field sizes do not match the grid");
  const FaceSet faces = FaceSet::build(grid, bcs);
  auto check_neumann = [](const std::vector<FaceRecord>& list, const Eigen::ArrayXd& v) {
    for (size_t f = 0; f < list.size(); ++f)
      if (list[f].kind == FaceRecord::Kind::Neumann && v[f] != 0.0)
        throw std::invalid_argument(
            "perturbation: nonzero normal component on a velocity boundary face");
  };
  check_neumann(faces.x, dv.x);
  if (!faces.y.empty()) check_neumann(faces.y, dv.y);

  double flux_scale = 0.0;
  for (Eigen::Index f = 0; f < dv.x.size(); ++f) {
    const int i = static_cast<int>(f) % (grid.nx() + 1);
    flux_scale = std::max(flux_scale, std::abs(dv.x[f]) * grid.face_area_x(i));
  }
  if (grid.geometry() == Geometry::Cartesian2D)
    flux_scale = std::max(flux_scale, dv.y.abs().maxCoeff() * grid.face_area_y());
  const double div = max_cell_divergence(grid, dv);
  if (div > tol * std::max(flux_scale, 1.0))
    throw std::invalid_argument("perturbation: discrete divergence exceeds tolerance");
}

double psi(const StructuredGrid& grid, const Eigen::ArrayXd& permeability,
           const MaterialModel& model, const BoundaryConditions& bcs, const FaceField& w,
           const Eigen::ArrayXd* frozen_pressure) {
  if (model.depends_on_pressure() && frozen_pressure == nullptr)
    throw std::invalid_argument(
        "psi: a pressure-dependent drag law needs the frozen solution pressure");
  const FaceSet faces = FaceSet::build(grid, bcs);
  Eigen::ArrayXd sx, sy;
  face_speeds(grid, w, sx, sy);
  Eigen::ArrayXd pf_x, pf_y;
  if (model.depends_on_pressure()) {
    pf_x = face_pressures(faces.x, *frozen_pressure);
    pf_y = face_pressures(faces.y, *frozen_pressure);
  } else {
    pf_x = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(faces.x.size()));
    pf_y = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(faces.y.size()));
  }

  // Accumulate in extended precision: stationarity checks difference Psi at
  // nearby fields and live off the trailing digits.
  long double total = 0.0L;
  auto add_faces = [&](const std::vector<FaceRecord>& list, const Eigen::ArrayXd& v,
                       const Eigen::ArrayXd& pf, const Eigen::ArrayXd& sf) {
    for (size_t f = 0; f < list.size(); ++f) {
      const FaceRecord& r = list[f];
      const double flux = v[f] * r.area;
      const double resistance = face_base_resistance(r, permeability, model.mu0);
      const double g = drag_multiplier(model, pf[f], sf[f]);
      total += 0.5L * static_cast<long double>(resistance) * g * flux * flux;
      if (r.kind == FaceRecord::Kind::Dirichlet)
        total += static_cast<long double>(r.out_sign) * flux * r.bc_value;
    }
  };
  add_faces(faces.x, w.x, pf_x, sx);
  if (!faces.y.empty()) add_faces(faces.y, w.y, pf_y, sy);
  return static_cast<double>(total);
}

std::vector<double> default_epsilon_ladder() {
  std::vector<double> eps;
  for (double mag = 1e-2; mag >= 1e-4; mag *= 0.5) {
    eps.push_back(mag);
    eps.push_back(-mag);
  }
  return eps;
}

StationarityFit mpt_stationarity_check(const StructuredGrid& grid,
                                       const Eigen::ArrayXd& permeability,
                                       const MaterialModel& model, const BoundaryConditions& bcs,
                                       const FlowState& solution,
                                       const AdmissiblePerturbation& pert,
                                       const std::vector<double>& epsilons) {
  check_admissible(grid, bcs, pert.dv);
  const std::vector<double> ladder = epsilons.empty() ? default_epsilon_ladder() : epsilons;
  if (ladder.size() < 2)
    throw std::invalid_argument("mpt_stationarity_check: need at least two epsilon values");
  const Eigen::ArrayXd* frozen = model.depends_on_pressure() ? &solution.pressure : nullptr;

  StationarityFit fit;
  fit.perturbation_id = pert.id;
  fit.psi_at_solution = psi(grid, permeability, model, bcs, solution.velocity, frozen);

  Eigen::MatrixXd design(static_cast<Eigen::Index>(ladder.size()), 2);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(ladder.size()));
  for (size_t n = 0; n < ladder.size(); ++n) {
    const double eps = ladder[n];
    FaceField w;
    w.x = solution.velocity.x + eps * pert.dv.x;
    if (solution.velocity.y.size() > 0) w.y = solution.velocity.y + eps * pert.dv.y;
    else w.y.resize(0);
    design(static_cast<Eigen::Index>(n), 0) = eps;
    design(static_cast<Eigen::Index>(n), 1) = eps * eps;
    rhs[static_cast<Eigen::Index>(n)] =
        psi(grid, permeability, model, bcs, w, frozen) - fit.psi_at_solution;
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  fit.a1 = coef[0];
  fit.a2 = coef[1];

  // Predicted first-order term of the drag linearization in the perturbation
  // direction (zero unless the multiplier depends on the speed).
  if (model.depends_on_speed()) {
    const FaceSet faces = FaceSet::build(grid, bcs);
    Eigen::ArrayXd sx, sy, tx, ty, dtx, dty;
    face_speeds(grid, solution.velocity, sx, sy);
    tangential_means(grid, solution.velocity, tx, ty);
    tangential_means(grid, pert.dv, dtx, dty);
    Eigen::ArrayXd pf_x, pf_y;
    if (model.depends_on_pressure()) {
      pf_x = face_pressures(faces.x, solution.pressure);
      pf_y = face_pressures(faces.y, solution.pressure);
    } else {
      pf_x = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(faces.x.size()));
      pf_y = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(faces.y.size()));
    }
    long double predicted = 0.0L;
    auto add = [&](const std::vector<FaceRecord>& list, const Eigen::ArrayXd& v,
                   const Eigen::ArrayXd& dv, const Eigen::ArrayXd& sf, const Eigen::ArrayXd& pf,
                   const Eigen::ArrayXd* tmean, const Eigen::ArrayXd* dtmean) {
      for (size_t f = 0; f < list.size(); ++f) {
        if (sf[f] <= 0.0) continue;
        const FaceRecord& r = list[f];
        const double flux = v[f] * r.area;
        const double resistance = face_base_resistance(r, permeability, model.mu0);
        double ds = v[f] * dv[f];
        if (tmean != nullptr && tmean->size() > 0) ds += (*tmean)[f] * (*dtmean)[f];
        ds /= sf[f];
        predicted += 0.5L * static_cast<long double>(resistance) * flux * flux *
                     drag_multiplier_dspeed(model, pf[f], sf[f]) * ds;
      }
    };
    add(faces.x, solution.velocity.x, pert.dv.x, sx, pf_x, &tx, &dtx);
    if (!faces.y.empty()) add(faces.y, solution.velocity.y, pert.dv.y, sy, pf_y, &ty, &dty);
    fit.predicted_a1 = static_cast<double>(predicted);
  }
  return fit;
}

double pressure_failure_term(const StructuredGrid& grid, const Eigen::ArrayXd& permeability,
                             const MaterialModel& model, const FlowState& solution,
                             const Eigen::ArrayXd& dp) {
  if (dp.size() != grid.n_cells())
    throw std::invalid_argument("pressure_failure_term: dp must have one value per cell");
  Eigen::ArrayXd vx, vy;
  cell_average_velocity(grid, solution.velocity, vx, vy);
  long double total = 0.0L;
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) {
      const int c = grid.cell_index(i, j);
      const double s2 = vx[c] * vx[c] + vy[c] * vy[c];
      const double dgdp = drag_multiplier_dp(model, solution.pressure[c], std::sqrt(s2));
      total += 0.5L * static_cast<long double>(grid.cell_volume(i)) *
               (model.mu0 / permeability[c]) * dgdp * s2 * dp[c];
    }
  return static_cast<double>(total);
}

AdmissiblePerturbation flux_constant_perturbation(const StructuredGrid& grid,
                                                  const BoundaryConditions& bcs, double amplitude,
                                                  const std::string& id) {
  if (grid.geometry() == Geometry::Cartesian2D)
    throw std::invalid_argument("flux_constant_perturbation: 1D and radial grids only");
  for (const auto& seg : grid.segments())
    if (bcs.at(seg.tag).kind == BoundaryCondition::Kind::PrescribedNormalVelocity)
      throw std::invalid_argument(
          "flux_constant_perturbation: inadmissible when a boundary prescribes normal velocity");
  AdmissiblePerturbation pert;
  pert.id = id;
  pert.dv = FaceField::zero(grid);
  for (int i = 0; i <= grid.nx(); ++i)
    pert.dv.x[grid.face_x_index(i, 0)] = amplitude / grid.face_area_x(i);
  return pert;
}

AdmissiblePerturbation stream_potential_perturbation(const StructuredGrid& grid,
                                                     const Eigen::ArrayXd& nodal_potential,
                                                     const std::string& id) {
  if (grid.geometry() != Geometry::Cartesian2D)
    throw std::invalid_argument("stream_potential_perturbation: Cartesian grids only");
  const int nx = grid.nx(), ny = grid.ny();
  if (nodal_potential.size() != static_cast<Eigen::Index>((nx + 1) * (ny + 1)))
    throw std::invalid_argument("stream_potential_perturbation: potential must be nodal");
  auto node = [nx](int i, int j) { return j * (nx + 1) + i; };
  AdmissiblePerturbation pert;
  pert.id = id;
  pert.dv = FaceField::zero(grid);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i)
      pert.dv.x[grid.face_x_index(i, j)] =
          (nodal_potential[node(i, j + 1)] - nodal_potential[node(i, j)]) / grid.face_area_x(i);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i)
      pert.dv.y[grid.face_y_index(i, j)] =
          -(nodal_potential[node(i + 1, j)] - nodal_potential[node(i, j)]) / grid.face_area_y();
  return pert;
}

std::vector<AdmissiblePerturbation> random_perturbations(const StructuredGrid& grid,
                                                         const BoundaryConditions& bcs, int count,
                                                         unsigned long long seed,
                                                         double amplitude) {
  if (grid.geometry() != Geometry::Cartesian2D)
    throw std::invalid_argument("random_perturbations: Cartesian grids only");
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const int nx = grid.nx(), ny = grid.ny();
  std::vector<AdmissiblePerturbation> out;
  out.reserve(static_cast<size_t>(count));
  for (int n = 0; n < count; ++n) {
    double modes[3][3];
    for (auto& row : modes)
      for (double& a : row) a = 2.0 * uniform() - 1.0;
    Eigen::ArrayXd phi((nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        // sin(pi m) only nearly vanishes in floating point; admissibility on
        // velocity boundaries needs boundary nodes at exact zero.
        if (i == 0 || i == nx || j == 0 || j == ny) {
          phi[j * (nx + 1) + i] = 0.0;
          continue;
        }
        const double xh = static_cast<double>(i) / nx;
        const double yh = static_cast<double>(j) / ny;
        double value = 0.0;
        for (int m = 1; m <= 3; ++m)
          for (int k = 1; k <= 3; ++k)
            value += modes[m - 1][k - 1] * std::sin(kPi * m * xh) * std::sin(kPi * k * yh);
        phi[j * (nx + 1) + i] = value;
      }
    AdmissiblePerturbation pert =
        stream_potential_perturbation(grid, phi, "sine-modes-" + std::to_string(n));
    const double peak = std::max(pert.dv.x.abs().maxCoeff(), pert.dv.y.abs().maxCoeff());
    if (peak > 0.0) {
      pert.dv.x *= amplitude / peak;
      pert.dv.y *= amplitude / peak;
    }
    check_admissible(grid, bcs, pert.dv);
    out.push_back(std::move(pert));
  }
  return out;
}

}  // namespace porotopt::power
