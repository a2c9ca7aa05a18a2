#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "porotopt/material.hpp"
#include "porotopt/primal.hpp"

namespace porotopt::cfg {

// Strict subset of TOML: [section] headers, key = value lines, # comments,
// scalar values (bool, integer, float, double-quoted string) and single-line
// arrays of scalars. No dotted keys, no multi-line values, no date types.
// Parsing rejects anything outside the subset with a line-numbered error, and
// emit() is canonical: emit(parse(emit(doc))) == emit(doc).
struct Value {
  enum class Type { Bool, Integer, Float, String, Array };
  Type type = Type::Integer;
  bool b = false;
  long long i = 0;
  double f = 0.0;
  std::string s;
  std::vector<Value> array;

  static Value boolean(bool v);
  static Value integer(long long v);
  static Value real(double v);
  static Value string(std::string v);

  // Numeric coercion: Integer or Float. Throws on other types.
  double as_double() const;
  long long as_integer() const;  // Integer only
  bool operator==(const Value& o) const;
};

struct Entry {
  std::string key;
  Value value;
  int line = 0;  // 1-based source line, 0 if synthesized
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;

  const Value* find(const std::string& key) const;
};

struct ConfigDoc {
  std::vector<Section> sections;

  Section* find_section(const std::string& name);
  const Section* find_section(const std::string& name) const;
  const Value* find(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, Value v);
};

// Throws std::runtime_error with "line N:" context on malformed input.
ConfigDoc parse_config(const std::string& text);
std::string emit_config(const ConfigDoc& doc);
std::string emit_value(const Value& v);

// Full run description. Defaults describe a generic Cartesian problem; the
// [problem] section may instead name a built-in case which seeds every field
// before explicit keys are applied on top.
struct RunConfig {
  // [problem]
  std::string builtin;         // empty = custom geometry below
  std::string geometry = "cartesian";  // interval | annulus | sphere | cartesian
  int nx = 64;
  int ny = 48;
  double x0 = 0.0, x1 = 2.0, y0 = 0.0, y1 = 1.5;
  // Whole-side or centered-patch conditions, keyed by side name (left, right,
  // bottom, top for Cartesian; inner, outer for radial). Values: "wall",
  // "pressure <v>", "velocity <vn>", or "pressure <v> patch <lo> <hi>" which
  // puts the condition on [lo, hi] of the side and walls elsewhere.
  std::map<std::string, std::string> boundaries;
  double q = 0.0;

  // [model]
  MaterialModel model = MaterialModel::darcy();

  // [design]
  double gamma = 0.3;
  double k_low = 1.0;
  double k_high = 10.0;
  double penal = 3.0;
  double filter_radius_cells = 1.5;
  std::string direction = "maximize";
  int max_iterations = 300;
  double change_tol = 1e-3;
  double move = 0.2;
  double jitter = 0.0;

  // [solver]
  SolverSettings solver;

  // [run]
  unsigned long long seed = 42;

  // [output]
  std::string output_directory;  // empty = derive from POROTOPT_OUTPUT_ROOT
  bool write_csv = true;
  bool write_vtk = true;
};

RunConfig default_run_config();
// Strict: unknown sections or keys are errors (reported with line numbers).
RunConfig run_config_from_doc(const ConfigDoc& doc);
// Applies a parsed document's entries over an existing (e.g. built-in seeded)
// config, same strictness.
void apply_doc(RunConfig& rc, const ConfigDoc& doc);
// Every field explicit, canonical order; the generated reference config.
ConfigDoc run_config_to_doc(const RunConfig& rc);

}  // namespace porotopt::cfg
