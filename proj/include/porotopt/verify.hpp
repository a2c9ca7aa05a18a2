#pragma once

#include <string>
#include <vector>

#include "porotopt/grid.hpp"
#include "porotopt/material.hpp"
#include "porotopt/nondim.hpp"

namespace porotopt::verify {

// One analytic-vs-numeric comparison: a benchmark family solved on a ladder
// of grids and measured against its closed-form solution.
struct VerificationCase {
  std::string id;
  Geometry geometry = Geometry::Interval1D;
  MaterialModel model;
  Driving driving = Driving::PressureDriven;

  // Two-material layout, interface at xi (inner/left region has k1).
  double xi = 0.5, k1 = 1.0, k2 = 1.0;
  double r_i = 0.0, r_o = 1.0;  // domain extent (radial families: radii)
  double p_in = 1.0, p_out = 0.0, v_in = 1.0, mu = 1.0;

  std::string oracle_ref;        // analytic operation + arguments, recorded verbatim
  double tolerance = 1e-6;       // gate on the finest-grid max relative error
  std::vector<int> ladder{64, 128, 256};

  void validate() const;  // tolerance > 0, ladder strictly refining
};

// The comparison cases backing the report: six 1D law/driving combinations,
// the degenerate equal-permeability column, and the radial families.
std::vector<VerificationCase> builtin_cases();

struct CaseResult {
  std::string id;
  std::vector<int> grids;
  std::vector<double> l2_error;   // larger of the relative pressure/velocity RMS errors
  std::vector<double> max_error;  // larger of the relative pressure/velocity max errors
  std::string order;              // observed order from the finest pair; "n/a" at the
                                  // round-off floor (exactly represented cases)
  bool pass = false;
  std::string reason;             // non-empty when the solver failed
};

CaseResult run_case(const VerificationCase& c);

// status: "pass" | "fail" | "info" (ungated measurement).
struct ReportRow {
  std::string case_id;
  std::string suite;
  std::string metric;
  std::string grid;   // level the metric belongs to, empty if none
  std::string value;
  std::string gate;   // human-readable bound, empty for info rows
  std::string status;
};

struct Report {
  std::string suite;
  unsigned long long seed = 42;
  int n_samples = 10000;
  std::vector<ReportRow> rows;
  bool all_passed() const;
};

// Randomized theorem sweeps: interface-optimum comparison, spherical slack
// bound, interface-product bound, piezoviscous drag reduction, and 1D layout
// permutation invariance. Deterministic under a fixed seed; adversarial
// near-degenerate samples are always included.
Report run_property_sweeps(unsigned long long seed, int n_samples);

// suite: all | convergence | proposition | lemma | amgm | drag | permutation
// | mpt. Throws std::invalid_argument on an unknown selector.
Report run_suite(const std::string& suite, unsigned long long seed, int n_samples = 10000);

// Deterministic serializations; byte-identical for equal reports. The CSV
// starts with a `#` metadata line recording the generator and seed.
std::string report_csv(const Report& r);
std::string report_summary(const Report& r);

}  // namespace porotopt::verify
