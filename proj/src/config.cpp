#include "porotopt/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "porotopt/io.hpp"

namespace porotopt::cfg {

Value Value::boolean(bool v) {
  Value x;
  x.type = Type::Bool;
  x.b = v;
  return x;
}

Value Value::integer(long long v) {
  Value x;
  x.type = Type::Integer;
  x.i = v;
  return x;
}

Value Value::real(double v) {
  Value x;
  x.type = Type::Float;
  x.f = v;
  return x;
}

Value Value::string(std::string v) {
  Value x;
  x.type = Type::String;
  x.s = std::move(v);
  return x;
}

double Value::as_double() const {
  if (type == Type::Float) return f;
  if (type == Type::Integer) return static_cast<double>(i);
  throw std::runtime_error("expected a number");
}

long long Value::as_integer() const {
  if (type == Type::Integer) return i;
  throw std::runtime_error("expected an integer");
}

bool Value::operator==(const Value& o) const {
  if (type != o.type) return false;
  switch (type) {
    case Type::Bool: return b == o.b;
    case Type::Integer: return i == o.i;
    case Type::Float: return f == o.f;
    case Type::String: return s == o.s;
    case Type::Array: return array == o.array;
  }
  return false;
}

const Value* Section::find(const std::string& key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e.value;
  return nullptr;
}

Section* ConfigDoc::find_section(const std::string& name) {
  for (auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

const Section* ConfigDoc::find_section(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

const Value* ConfigDoc::find(const std::string& section, const std::string& key) const {
  const Section* s = find_section(section);
  return s ? s->find(key) : nullptr;
}

void ConfigDoc::set(const std::string& section, const std::string& key, Value v) {
  Section* s = find_section(section);
  if (s == nullptr) {
    sections.push_back({section, 0, {}});
    s = &sections.back();
  }
  for (auto& e : s->entries)
    if (e.key == key) {
      e.value = std::move(v);
      return;
    }
  s->entries.push_back({key, std::move(v), 0});
}

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::runtime_error("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool valid_bare_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

// Removes a trailing comment, honoring quoted strings.
std::string strip_comment(const std::string& s, int line) {
  std::string out;
  bool in_string = false;
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      out += c;
      if (c == '\\') {
        if (i + 1 >= s.size()) fail(line, "dangling escape in string");
        out += s[++i];
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '#') break;
    if (c == '"') in_string = true;
    out += c;
  }
  if (in_string) fail(line, "unterminated string");
  return out;
}

std::string parse_string_literal(const std::string& raw, int line) {
  if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
    fail(line, "malformed string literal");
  std::string out;
  for (size_t i = 1; i + 1 < raw.size(); ++i) {
    char c = raw[i];
    if (c == '"') fail(line, "unexpected '\"' inside string");
    if (c != '\\') {
      out += c;
      continue;
    }
    if (i + 1 >= raw.size() - 1) fail(line, "dangling escape");
    char e = raw[++i];
    switch (e) {
      case '"': out += '"'; break;
      case '\\': out += '\\'; break;
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      default: fail(line, std::string("unsupported escape '\\") + e + "'");
    }
  }
  return out;
}

Value parse_scalar(const std::string& raw, int line) {
  if (raw.empty()) fail(line, "missing value");
  if (raw == "true") return Value::boolean(true);
  if (raw == "false") return Value::boolean(false);
  if (raw.front() == '"') return Value::string(parse_string_literal(raw, line));

  // Integer if it consumes as one; otherwise float.
  errno = 0;
  char* end = nullptr;
  const bool has_float_marks = raw.find_first_of(".eEnN") != std::string::npos;
  if (!has_float_marks) {
    const long long v = std::strtoll(raw.c_str(), &end, 10);
    if (end == raw.c_str() + raw.size() && errno == 0) return Value::integer(v);
    if (end == raw.c_str() + raw.size() && errno == ERANGE) fail(line, "integer out of range");
  }
  errno = 0;
  const double d = std::strtod(raw.c_str(), &end);
  if (end != raw.c_str() + raw.size()) fail(line, "malformed value '" + raw + "'");
  return Value::real(d);
}

// Splits a bracketed array body on top-level commas.
std::vector<std::string> split_array_items(const std::string& body, int line) {
  std::vector<std::string> items;
  std::string cur;
  bool in_string = false;
  for (size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (in_string) {
      cur += c;
      if (c == '\\' && i + 1 < body.size()) cur += body[++i];
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') {
      in_string = true;
      cur += c;
    } else if (c == ',') {
      items.push_back(trim(cur));
      cur.clear();
    } else if (c == '[' || c == ']') {
      fail(line, "nested arrays are not supported");
    } else {
      cur += c;
    }
  }
  const std::string last = trim(cur);
  if (!last.empty()) items.push_back(last);
  else if (!items.empty()) fail(line, "trailing comma in array");
  return items;
}

Value parse_value(const std::string& raw, int line) {
  if (!raw.empty() && raw.front() == '[') {
    if (raw.back() != ']') fail(line, "unterminated array");
    Value v;
    v.type = Value::Type::Array;
    for (const auto& item : split_array_items(raw.substr(1, raw.size() - 2), line))
      v.array.push_back(parse_scalar(item, line));
    for (const auto& e : v.array)
      if (e.type != v.array.front().type) fail(line, "array elements must share one type");
    return v;
  }
  return parse_scalar(raw, line);
}

}  // namespace

ConfigDoc parse_config(const std::string& text) {
  ConfigDoc doc;
  Section* cur = nullptr;
  int line_no = 0;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw, line_no));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (!valid_bare_name(name)) fail(line_no, "invalid section name '" + name + "'");
      if (doc.find_section(name) != nullptr) fail(line_no, "duplicate section [" + name + "]");
      doc.sections.push_back({name, line_no, {}});
      cur = &doc.sections.back();
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (!valid_bare_name(key)) fail(line_no, "invalid key '" + key + "'");
    if (cur == nullptr) fail(line_no, "key '" + key + "' outside any [section]");
    if (cur->find(key) != nullptr) fail(line_no, "duplicate key '" + key + "'");
    const std::string value = trim(line.substr(eq + 1));
    cur->entries.push_back({key, parse_value(value, line_no), line_no});
  }
  return doc;
}

std::string emit_value(const Value& v) {
  switch (v.type) {
    case Value::Type::Bool: return v.b ? "true" : "false";
    case Value::Type::Integer: return std::to_string(v.i);
    case Value::Type::Float: {
      if (!std::isfinite(v.f)) return v.f > 0 ? "inf" : (v.f < 0 ? "-inf" : "nan");
      std::string s = io::format_double(v.f);
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      return s;
    }
    case Value::Type::String: {
      std::string out = "\"";
      for (char c : v.s) {
        switch (c) {
          case '"': out += "\\\""; break;
          case '\\': out += "\\\\"; break;
          case '\n': out += "\\n"; break;
          case '\t': out += "\\t"; break;
          case '\r': out += "\\r"; break;
          default: out += c;
        }
      }
      return out + "\"";
    }
    case Value::Type::Array: {
      std::string out = "[";
      for (size_t i = 0; i < v.array.size(); ++i) {
        if (i) out += ", ";
        out += emit_value(v.array[i]);
      }
      return out + "]";
    }
  }
  return "";
}

std::string emit_config(const ConfigDoc& doc) {
  std::string out;
  bool first = true;
  for (const auto& s : doc.sections) {
    if (!first) out += "\n";
    first = false;
    out += "[" + s.name + "]\n";
    for (const auto& e : s.entries) out += e.key + " = " + emit_value(e.value) + "\n";
  }
  return out;
}

RunConfig default_run_config() { return RunConfig{}; }

namespace {

double need_double(const Entry& e) {
  if (e.value.type != Value::Type::Float && e.value.type != Value::Type::Integer)
    fail(e.line, "key '" + e.key + "' expects a number");
  return e.value.as_double();
}

long long need_integer(const Entry& e) {
  if (e.value.type != Value::Type::Integer) fail(e.line, "key '" + e.key + "' expects an integer");
  return e.value.i;
}

std::string need_string(const Entry& e) {
  if (e.value.type != Value::Type::String) fail(e.line, "key '" + e.key + "' expects a string");
  return e.value.s;
}

bool need_bool(const Entry& e) {
  if (e.value.type != Value::Type::Bool) fail(e.line, "key '" + e.key + "' expects a boolean");
  return e.value.b;
}

void apply_entry(RunConfig& rc, const std::string& section, const Entry& e) {
  const std::string& k = e.key;
  if (section == "problem") {
    if (k == "builtin") rc.builtin = need_string(e);
    else if (k == "geometry") rc.geometry = need_string(e);
    else if (k == "nx") rc.nx = static_cast<int>(need_integer(e));
    else if (k == "ny") rc.ny = static_cast<int>(need_integer(e));
    else if (k == "x0") rc.x0 = need_double(e);
    else if (k == "x1") rc.x1 = need_double(e);
    else if (k == "y0") rc.y0 = need_double(e);
    else if (k == "y1") rc.y1 = need_double(e);
    else if (k == "q") rc.q = need_double(e);
    else fail(e.line, "unknown key 'problem." + k + "'");
  } else if (section == "bc") {
    rc.boundaries[k] = need_string(e);
  } else if (section == "model") {
    if (k == "law") rc.model.law = drag_law_from_string(need_string(e));
    else if (k == "mu0") rc.model.mu0 = need_double(e);
    else if (k == "beta_b") rc.model.beta_b = need_double(e);
    else if (k == "beta_f") rc.model.beta_f = need_double(e);
    else fail(e.line, "unknown key 'model." + k + "'");
  } else if (section == "design") {
    if (k == "gamma") rc.gamma = need_double(e);
    else if (k == "k_low") rc.k_low = need_double(e);
    else if (k == "k_high") rc.k_high = need_double(e);
    else if (k == "penal") rc.penal = need_double(e);
    else if (k == "filter_radius_cells") rc.filter_radius_cells = need_double(e);
    else if (k == "direction") {
      rc.direction = need_string(e);
      if (rc.direction != "maximize" && rc.direction != "minimize")
        fail(e.line, "direction must be \"maximize\" or \"minimize\"");
    } else if (k == "max_iterations") rc.max_iterations = static_cast<int>(need_integer(e));
    else if (k == "change_tol") rc.change_tol = need_double(e);
    else if (k == "move") rc.move = need_double(e);
    else if (k == "jitter") rc.jitter = need_double(e);
    else fail(e.line, "unknown key 'design." + k + "'");
  } else if (section == "solver") {
    if (k == "picard_tol") rc.solver.picard_tol = need_double(e);
    else if (k == "picard_max_iterations")
      rc.solver.picard_max_iterations = static_cast<int>(need_integer(e));
    else if (k == "linear_tol") rc.solver.linear_tol = need_double(e);
    else if (k == "relaxation") rc.solver.relaxation = need_double(e);
    else fail(e.line, "unknown key 'solver." + k + "'");
  } else if (section == "run") {
    if (k == "seed") {
      const long long v = need_integer(e);
      if (v < 0) fail(e.line, "seed must be nonnegative");
      rc.seed = static_cast<unsigned long long>(v);
    } else fail(e.line, "unknown key 'run." + k + "'");
  } else if (section == "output") {
    if (k == "directory") rc.output_directory = need_string(e);
    else if (k == "write_csv") rc.write_csv = need_bool(e);
    else if (k == "write_vtk") rc.write_vtk = need_bool(e);
    else fail(e.line, "unknown key 'output." + k + "'");
  } else {
    fail(e.line, "unknown section [" + section + "]");
  }
}

}  // namespace

void apply_doc(RunConfig& rc, const ConfigDoc& doc) {
  for (const auto& s : doc.sections)
    for (const auto& e : s.entries) apply_entry(rc, s.name, e);
}

RunConfig run_config_from_doc(const ConfigDoc& doc) {
  RunConfig rc = default_run_config();
  apply_doc(rc, doc);
  return rc;
}

ConfigDoc run_config_to_doc(const RunConfig& rc) {
  ConfigDoc doc;
  doc.set("problem", "builtin", Value::string(rc.builtin));
  doc.set("problem", "geometry", Value::string(rc.geometry));
  doc.set("problem", "nx", Value::integer(rc.nx));
  doc.set("problem", "ny", Value::integer(rc.ny));
  doc.set("problem", "x0", Value::real(rc.x0));
  doc.set("problem", "x1", Value::real(rc.x1));
  doc.set("problem", "y0", Value::real(rc.y0));
  doc.set("problem", "y1", Value::real(rc.y1));
  doc.set("problem", "q", Value::real(rc.q));
  for (const auto& [side, desc] : rc.boundaries) doc.set("bc", side, Value::string(desc));
  doc.set("model", "law", Value::string(to_string(rc.model.law)));
  doc.set("model", "mu0", Value::real(rc.model.mu0));
  doc.set("model", "beta_b", Value::real(rc.model.beta_b));
  doc.set("model", "beta_f", Value::real(rc.model.beta_f));
  doc.set("design", "gamma", Value::real(rc.gamma));
  doc.set("design", "k_low", Value::real(rc.k_low));
  doc.set("design", "k_high", Value::real(rc.k_high));
  doc.set("design", "penal", Value::real(rc.penal));
  doc.set("design", "filter_radius_cells", Value::real(rc.filter_radius_cells));
  doc.set("design", "direction", Value::string(rc.direction));
  doc.set("design", "max_iterations", Value::integer(rc.max_iterations));
  doc.set("design", "change_tol", Value::real(rc.change_tol));
  doc.set("design", "move", Value::real(rc.move));
  doc.set("design", "jitter", Value::real(rc.jitter));
  doc.set("solver", "picard_tol", Value::real(rc.solver.picard_tol));
  doc.set("solver", "picard_max_iterations", Value::integer(rc.solver.picard_max_iterations));
  doc.set("solver", "linear_tol", Value::real(rc.solver.linear_tol));
  doc.set("solver", "relaxation", Value::real(rc.solver.relaxation));
  doc.set("run", "seed", Value::integer(static_cast<long long>(rc.seed)));
  doc.set("output", "directory", Value::string(rc.output_directory));
  doc.set("output", "write_csv", Value::boolean(rc.write_csv));
  doc.set("output", "write_vtk", Value::boolean(rc.write_vtk));
  return doc;
}

}  // namespace porotopt::cfg
