#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "porotopt/analytic.hpp"
#include "porotopt/config.hpp"
#include "porotopt/dissipation.hpp"
#include "porotopt/io.hpp"
#include "porotopt/power.hpp"
#include "porotopt/primal.hpp"
#include "porotopt/problems.hpp"
#include "porotopt/topopt.hpp"
#include "porotopt/verify.hpp"

namespace {

using namespace porotopt;

std::string output_root() {
  const char* env = std::getenv("POROTOPT_OUTPUT_ROOT");
  return env != nullptr && *env != '\0' ? std::string(env) : std::string("./output");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

DragLaw law_from_alias(std::string name) {
  if (name == "df" || name == "forchheimer") name = "darcy-forchheimer";
  if (name == "lb") name = "linearized-barus";
  return drag_law_from_string(name);
}

std::string fmt(double v) { return io::format_double(v); }

// Flag overrides applied after the config file so the command line wins.
struct RunOptions {
  std::string config_path;
  std::string builtin;
  std::string output;
  std::string model;
  std::optional<double> gamma, beta_b, beta_f, q, penal, filter_radius_cells;
  std::optional<int> max_iterations;
  std::optional<unsigned long long> seed;
  bool emit_only = false;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config_path, "configuration file (strict TOML subset)");
  cmd->add_option("--builtin", o.builtin, "built-in problem name");
  cmd->add_option("--output", o.output, "output directory");
  cmd->add_option("--model", o.model, "drag law: darcy | barus | linearized-barus (lb) | "
                                      "darcy-forchheimer (df)");
  cmd->add_option("--gamma", o.gamma, "volume fraction bound");
  cmd->add_option("--beta-b", o.beta_b, "pressure coefficient");
  cmd->add_option("--beta-f", o.beta_f, "velocity coefficient");
  cmd->add_option("--q", o.q, "uniform volumetric source");
  cmd->add_option("--penal", o.penal, "interpolation penalization exponent");
  cmd->add_option("--filter-radius-cells", o.filter_radius_cells, "filter radius in cell widths");
  cmd->add_option("--max-iterations", o.max_iterations, "design iteration cap");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_flag("--emit-config", o.emit_only,
                "print the fully explicit configuration and exit without running");
}

cfg::RunConfig assemble_config(const RunOptions& o) {
  cfg::ConfigDoc doc;
  if (!o.config_path.empty()) doc = cfg::parse_config(read_file(o.config_path));

  std::string builtin = o.builtin;
  if (const cfg::Value* v = doc.find("problem", "builtin")) {
    if (v->type != cfg::Value::Type::String)
      throw std::runtime_error("[problem] builtin must be a string");
    if (!builtin.empty() && builtin != v->s)
      throw std::runtime_error("--builtin '" + builtin + "' disagrees with config builtin '" +
                               v->s + "'");
    builtin = v->s;
  }

  cfg::RunConfig rc =
      builtin.empty() ? cfg::default_run_config() : problems::builtin_run_config(builtin);
  cfg::apply_doc(rc, doc);

  if (!o.model.empty()) rc.model.law = law_from_alias(o.model);
  if (o.beta_b) rc.model.beta_b = *o.beta_b;
  if (o.beta_f) rc.model.beta_f = *o.beta_f;
  if (o.gamma) rc.gamma = *o.gamma;
  if (o.q) rc.q = *o.q;
  if (o.penal) rc.penal = *o.penal;
  if (o.filter_radius_cells) rc.filter_radius_cells = *o.filter_radius_cells;
  if (o.max_iterations) rc.max_iterations = *o.max_iterations;
  if (o.seed) rc.seed = *o.seed;
  if (!o.output.empty()) rc.output_directory = o.output;
  rc.model.validate();
  return rc;
}

std::string run_directory(const cfg::RunConfig& rc, const std::string& command) {
  if (!rc.output_directory.empty()) return rc.output_directory;
  const std::string name = rc.builtin.empty() ? "custom" : rc.builtin;
  return output_root() + "/" + command + "-" + name;
}

void write_flow_outputs(const cfg::RunConfig& rc, const std::string& dir,
                        const StructuredGrid& grid, const Eigen::ArrayXd& permeability,
                        const FlowState& flow) {
  if (rc.write_csv) {
    std::ostringstream os;
    io::write_fields_csv(os, grid, flow);
    io::write_text_file(dir, "fields.csv", os.str());
  }
  if (rc.write_vtk) {
    std::ostringstream os;
    io::write_vtk(os, grid,
                  {{"pressure", flow.pressure},
                   {"speed", io::cell_speeds(grid, flow)},
                   {"permeability", permeability}});
    io::write_text_file(dir, "fields.vtk", os.str());
  }
}

int cmd_solve(const RunOptions& o) {
  const cfg::RunConfig rc = assemble_config(o);
  if (o.emit_only) {
    std::cout << cfg::emit_config(cfg::run_config_to_doc(rc));
    return 0;
  }
  const problems::Assembled assembled = problems::build_problem(rc);
  const StructuredGrid& grid = assembled.problem.grid;
  // Plain flow solve: the domain is uniformly the permeable material.
  const Eigen::ArrayXd k = Eigen::ArrayXd::Constant(grid.n_cells(), rc.k_high);
  const Eigen::ArrayXd source = assembled.problem.source_or_zero();

  const FlowState flow =
      solve_flow(grid, k, rc.model, assembled.problem.bcs, source, rc.solver);
  const double mass = mass_balance_error(grid, assembled.problem.bcs, flow, source);
  const double phi = total_dissipation(grid, k, rc.model, flow);
  const Eigen::ArrayXd speeds = io::cell_speeds(grid, flow);

  std::ostringstream sum;
  sum << "problem = " << (rc.builtin.empty() ? "custom" : rc.builtin) << "\n"
      << "cells = " << grid.n_cells() << "\n"
      << "picard_iterations = " << flow.picard_iterations << "\n"
      << "residual = " << fmt(flow.residual_norm) << "\n"
      << "mass_balance_error = " << fmt(mass) << "\n"
      << "dissipation = " << fmt(phi) << "\n"
      << "max_speed = " << fmt(speeds.maxCoeff()) << "\n";

  const std::string dir = run_directory(rc, "solve");
  write_flow_outputs(rc, dir, grid, k, flow);
  io::write_text_file(dir, "config.toml", cfg::emit_config(cfg::run_config_to_doc(rc)));
  io::write_text_file(dir, "summary.txt", sum.str());
  std::cout << sum.str() << "output: " << dir << "\n";
  return 0;
}

int cmd_optimize(const RunOptions& o) {
  const cfg::RunConfig rc = assemble_config(o);
  if (o.emit_only) {
    std::cout << cfg::emit_config(cfg::run_config_to_doc(rc));
    return 0;
  }
  const problems::Assembled assembled = problems::build_problem(rc);
  const topopt::OptimizerState state =
      topopt::optimize(assembled.problem, Eigen::ArrayXd(), assembled.optimizer);
  const StructuredGrid& grid = assembled.problem.grid;

  std::ostringstream sum;
  sum << "problem = " << (rc.builtin.empty() ? "custom" : rc.builtin) << "\n"
      << "iterations = " << state.iterations << "\n"
      << "dissipation = " << fmt(state.phi_history.back()) << "\n"
      << "volume_fraction = " << fmt(state.volume_history.back()) << "\n"
      << "last_change = " << fmt(state.change) << "\n"
      << "binary_fraction = " << fmt(topopt::binary_fraction(state.rho_physical)) << "\n";
  if (const std::optional<double> oracle = problems::interface_oracle(rc)) {
    const double pos = topopt::interface_position(grid, state.rho_physical);
    sum << "interface = " << fmt(pos) << "\n"
        << "interface_oracle = " << fmt(*oracle) << "\n"
        << "interface_offset_cells = " << fmt((pos - *oracle) / grid.dx()) << "\n";
  }

  const std::string dir = run_directory(rc, "optimize");
  io::write_text_file(dir, "config.toml", cfg::emit_config(cfg::run_config_to_doc(rc)));
  if (rc.write_csv) {
    {
      std::ostringstream os;
      io::write_history_csv(os, state.phi_history, state.volume_history, state.change_history);
      io::write_text_file(dir, "history.csv", os.str());
    }
    {
      std::ostringstream os;
      io::write_density_csv(os, grid, state.rho, state.rho_physical, state.permeability);
      io::write_text_file(dir, "density.csv", os.str());
    }
  }
  if (rc.write_vtk) {
    std::ostringstream os;
    io::write_vtk(os, grid,
                  {{"rho", state.rho},
                   {"rho_filtered", state.rho_physical},
                   {"permeability", state.permeability}});
    io::write_text_file(dir, "density.vtk", os.str());
  }
  write_flow_outputs(rc, dir, grid, state.permeability, state.flow);
  io::write_text_file(dir, "summary.txt", sum.str());
  std::cout << sum.str() << "output: " << dir << "\n";
  return 0;
}

int cmd_mpt_check(const RunOptions& o, int n_perturbations, double amplitude) {
  const cfg::RunConfig rc = assemble_config(o);
  if (o.emit_only) {
    std::cout << cfg::emit_config(cfg::run_config_to_doc(rc));
    return 0;
  }
  const problems::Assembled assembled = problems::build_problem(rc);
  const StructuredGrid& grid = assembled.problem.grid;
  const BoundaryConditions& bcs = assembled.problem.bcs;
  const Eigen::ArrayXd k = Eigen::ArrayXd::Constant(grid.n_cells(), rc.k_high);

  const FlowState sol = solve_flow(grid, k, rc.model, bcs, 0.0, rc.solver);

  std::vector<power::AdmissiblePerturbation> perts;
  if (grid.geometry() == Geometry::Cartesian2D)
    perts = power::random_perturbations(grid, bcs, n_perturbations, rc.seed, amplitude);
  else
    perts.push_back(power::flux_constant_perturbation(grid, bcs, amplitude));

  std::ostringstream csv;
  csv << "perturbation,a1,predicted_a1,a2\n";
  double psi0 = 0.0;
  for (const auto& pert : perts) {
    const power::StationarityFit fit =
        power::mpt_stationarity_check(grid, k, rc.model, bcs, sol, pert);
    psi0 = fit.psi_at_solution;
    csv << pert.id << ',' << fmt(fit.a1) << ',' << fmt(fit.predicted_a1) << ',' << fmt(fit.a2)
        << "\n";
  }

  const std::string dir = run_directory(rc, "mpt-check");
  io::write_text_file(dir, "mpt.csv", csv.str());
  std::cout << "psi_at_solution = " << fmt(psi0) << "\n"
            << csv.str() << "output: " << dir << "\n";
  return 0;
}

int cmd_verify(const std::string& suite, unsigned long long seed, int samples,
               const std::string& output) {
  const verify::Report report = verify::run_suite(suite, seed, samples);
  const std::string dir = output.empty() ? output_root() + "/verify" : output;
  io::write_text_file(dir, "report.csv", verify::report_csv(report));
  io::write_text_file(dir, "summary.txt", verify::report_summary(report));
  std::cout << verify::report_summary(report) << "output: " << dir << "\n";
  return report.all_passed() ? 0 : 1;
}

void write_profile_csv(const std::string& path, const analytic::AnalyticSolution& sol, double x0,
                       double x1, int samples) {
  std::ostringstream os;
  os << "x,p,v\n";
  for (int i = 0; i < samples; ++i) {
    const double x = x0 + (x1 - x0) * i / (samples - 1);
    os << fmt(x) << ',' << fmt(sol.pressure(x)) << ',' << fmt(sol.velocity(x)) << "\n";
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write profile '" + path + "'");
  out << os.str();
}

void print_solution(const analytic::AnalyticSolution& sol, const char* constant_name) {
  std::cout << constant_name << " = " << fmt(sol.flow_constant) << "\n"
            << "dissipation = " << fmt(sol.dissipation) << "\n"
            << "upsilon = " << fmt(sol.upsilon) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dissipation-optimal material layout toolkit for porous-media flow"};
  app.require_subcommand(1);

  // ---- analytic ----------------------------------------------------------
  auto* analytic_cmd = app.add_subcommand("analytic", "closed-form benchmark solutions");
  analytic_cmd->require_subcommand(1);

  struct {
    double gamma = 0.3, ri = 0.1, ro = 1.0, k_low = 1.0, k_high = 10.0;
  } ann_opt;
  auto* annulus_optimum =
      analytic_cmd->add_subcommand("annulus-optimum", "optimal annulus interface radius");
  annulus_optimum->add_option("--gamma", ann_opt.gamma)->required();
  annulus_optimum->add_option("--ri", ann_opt.ri)->required();
  annulus_optimum->add_option("--ro", ann_opt.ro)->required();
  annulus_optimum->add_option("--k-low", ann_opt.k_low);
  annulus_optimum->add_option("--k-high", ann_opt.k_high);

  struct {
    double gamma = 0.1, ri = 0.1, k_low = 1.0, k_high = 10.0;
  } sph_opt;
  auto* sphere_optimum =
      analytic_cmd->add_subcommand("sphere-optimum", "optimal spherical interface radius");
  sphere_optimum->add_option("--gamma", sph_opt.gamma)->required();
  sphere_optimum->add_option("--ri", sph_opt.ri)->required();
  sphere_optimum->add_option("--k-low", sph_opt.k_low);
  sphere_optimum->add_option("--k-high", sph_opt.k_high);

  struct {
    std::string model = "darcy", driving = "pressure", csv;
    double beta_b = 0.0, beta_f = 0.0, k1 = 1.0, k2 = 1.0, xi = 0.5;
    int samples = 101;
  } s1d;
  auto* solve_1d = analytic_cmd->add_subcommand("solve-1d", "closed-form 1D column solution");
  solve_1d->add_option("--model", s1d.model);
  solve_1d->add_option("--betaB", s1d.beta_b);
  solve_1d->add_option("--betaF", s1d.beta_f);
  solve_1d->add_option("--k1", s1d.k1);
  solve_1d->add_option("--k2", s1d.k2);
  solve_1d->add_option("--xi", s1d.xi);
  solve_1d->add_option("--driving", s1d.driving, "pressure | velocity");
  solve_1d->add_option("--csv", s1d.csv, "write a sampled x,p,v profile");
  solve_1d->add_option("--samples", s1d.samples);

  struct {
    std::string model = "darcy", csv;
    double beta_b = 0.0, ri = 0.1, ro = 1.0, xi = 0.55, k1 = 10.0, k2 = 1.0;
    double pi = 100.0, po = 1.0, mu = 1.0;
    int samples = 101;
  } sann;
  auto* solve_ann = analytic_cmd->add_subcommand("annulus", "closed-form annulus solution");
  solve_ann->add_option("--model", sann.model);
  solve_ann->add_option("--betaB", sann.beta_b);
  solve_ann->add_option("--ri", sann.ri);
  solve_ann->add_option("--ro", sann.ro);
  solve_ann->add_option("--xi", sann.xi);
  solve_ann->add_option("--k1", sann.k1);
  solve_ann->add_option("--k2", sann.k2);
  solve_ann->add_option("--pi", sann.pi);
  solve_ann->add_option("--po", sann.po);
  solve_ann->add_option("--mu", sann.mu);
  solve_ann->add_option("--csv", sann.csv);
  solve_ann->add_option("--samples", sann.samples);

  struct {
    std::string csv;
    double ri = 0.1, xi = 0.55, k1 = 10.0, k2 = 1.0;
    int samples = 101;
  } ssph;
  auto* solve_sph = analytic_cmd->add_subcommand("sphere", "closed-form spherical solution");
  solve_sph->add_option("--ri", ssph.ri);
  solve_sph->add_option("--xi", ssph.xi);
  solve_sph->add_option("--k1", ssph.k1);
  solve_sph->add_option("--k2", ssph.k2);
  solve_sph->add_option("--csv", ssph.csv);
  solve_sph->add_option("--samples", ssph.samples);

  // ---- solve / optimize / mpt-check --------------------------------------
  RunOptions solve_opts, optimize_opts, mpt_opts;
  auto* solve_cmd = app.add_subcommand("solve", "flow solve on the uniform permeable medium");
  add_run_options(solve_cmd, solve_opts);
  auto* optimize_cmd = app.add_subcommand("optimize", "volume-constrained layout optimization");
  add_run_options(optimize_cmd, optimize_opts);
  auto* mpt_cmd =
      app.add_subcommand("mpt-check", "power-functional stationarity fits on a flow solve");
  add_run_options(mpt_cmd, mpt_opts);
  int mpt_perturbations = 6;
  double mpt_amplitude = 1.0;
  mpt_cmd->add_option("--perturbations", mpt_perturbations, "perturbation count (2D grids)");
  mpt_cmd->add_option("--amplitude", mpt_amplitude, "perturbation amplitude");

  // ---- verify -------------------------------------------------------------
  std::string verify_suite = "all", verify_output;
  unsigned long long verify_seed = 42;
  int verify_samples = 10000;
  auto* verify_cmd = app.add_subcommand("verify", "oracle and property verification suites");
  verify_cmd->add_option("--suite", verify_suite,
                         "all | convergence | proposition | lemma | amgm | drag | permutation "
                         "| mpt");
  verify_cmd->add_option("--seed", verify_seed);
  verify_cmd->add_option("--samples", verify_samples);
  verify_cmd->add_option("--output", verify_output);

  CLI11_PARSE(app, argc, argv);

  try {
    if (annulus_optimum->parsed()) {
      const auto opt = analytic::optimal_interface_2d(ann_opt.gamma, ann_opt.ri, ann_opt.ro,
                                                      ann_opt.k_low, ann_opt.k_high);
      std::cout << "xi_hat = " << fmt(opt.xi_hat) << "\n"
                << "verdict: high-k inner\n"
                << "xi_hat_outer = " << fmt(opt.xi_hat_outer) << "\n"
                << "upsilon_min_inner = " << fmt(opt.upsilon_min_inner) << "\n"
                << "upsilon_min_outer = " << fmt(opt.upsilon_min_outer) << "\n";
      return 0;
    }
    if (sphere_optimum->parsed()) {
      const auto opt = analytic::optimal_interface_3d(sph_opt.gamma, sph_opt.ri, sph_opt.k_low,
                                                      sph_opt.k_high);
      std::cout << "xi_hat = " << fmt(opt.xi_hat) << "\n"
                << "verdict: high-k inner\n"
                << "xi_hat_outer = " << fmt(opt.xi_hat_outer) << "\n"
                << "phi_max_inner = " << fmt(opt.phi_max_inner) << "\n"
                << "phi_max_outer = " << fmt(opt.phi_max_outer) << "\n";
      return 0;
    }
    if (solve_1d->parsed()) {
      MaterialModel model;
      model.law = law_from_alias(s1d.model);
      model.beta_b = s1d.beta_b;
      model.beta_f = s1d.beta_f;
      const Driving driving =
          s1d.driving == "velocity" ? Driving::VelocityDriven : Driving::PressureDriven;
      const auto sol = analytic::solve_1d(model, driving, {s1d.xi, s1d.k1, s1d.k2});
      print_solution(sol, "C");
      if (!s1d.csv.empty()) write_profile_csv(s1d.csv, sol, 0.0, 1.0, s1d.samples);
      return 0;
    }
    if (solve_ann->parsed()) {
      MaterialModel model = MaterialModel::darcy();
      if (law_from_alias(sann.model) == DragLaw::Barus) model = MaterialModel::barus(sann.beta_b);
      else if (law_from_alias(sann.model) != DragLaw::Darcy)
        throw std::runtime_error("analytic annulus supports darcy and barus");
      const auto sol = analytic::solve_annulus({sann.ri, sann.ro, sann.xi, sann.k1, sann.k2},
                                               Driving::PressureDriven, sann.pi, sann.po, 0.0,
                                               sann.mu, model);
      print_solution(sol, "C");
      if (!sann.csv.empty()) write_profile_csv(sann.csv, sol, sann.ri, sann.ro, sann.samples);
      return 0;
    }
    if (solve_sph->parsed()) {
      const auto sol = analytic::solve_sphere({ssph.ri, ssph.xi, ssph.k1, ssph.k2});
      print_solution(sol, "A");
      if (!ssph.csv.empty()) write_profile_csv(ssph.csv, sol, ssph.ri, 1.0, ssph.samples);
      return 0;
    }
    if (solve_cmd->parsed()) return cmd_solve(solve_opts);
    if (optimize_cmd->parsed()) return cmd_optimize(optimize_opts);
    if (mpt_cmd->parsed()) return cmd_mpt_check(mpt_opts, mpt_perturbations, mpt_amplitude);
    if (verify_cmd->parsed()) return cmd_verify(verify_suite, verify_seed, verify_samples,
                                                verify_output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
