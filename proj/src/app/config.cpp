#include "finsler/app/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace finsler::app {

using nlohmann::json;

std::string to_string(Mode m) { return m == Mode::jet ? "jet" : "fd"; }

Mode parse_mode(const std::string& text) {
  if (text == "jet") return Mode::jet;
  if (text == "fd" || text == "finite_difference") return Mode::fd;
  throw ConfigError("mode must be 'jet' or 'fd', got '" + text + "'");
}

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items())
    if (!ok.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  return v.get<double>();
}

// Expression entries may be written as strings or plain numbers.
std::string expr_text(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  throw ConfigError(where + " must be an expression string or a number");
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

void parse_structure(const json& s, RunConfig& c) {
  only_keys(s, "structure", {"kind", "dimension", "a", "b", "F", "description"});
  if (!s.contains("kind") || !s["kind"].is_string()) throw ConfigError("structure.kind is required");
  const std::string kind = s["kind"].get<std::string>();
  if (kind == "euclidean")
    c.kind = StructureKind::euclidean;
  else if (kind == "riemannian")
    c.kind = StructureKind::riemannian;
  else if (kind == "randers")
    c.kind = StructureKind::randers;
  else if (kind == "kropina")
    c.kind = StructureKind::kropina;
  else if (kind == "expression")
    c.kind = StructureKind::expression;
  else
    throw ConfigError("unknown structure kind '" + kind + "'");

  if (!s.contains("dimension") || !s["dimension"].is_number_integer())
    throw ConfigError("structure.dimension must be an integer");
  c.dimension = s["dimension"].get<int>();
  if (c.dimension < 2 || c.dimension > 4)
    throw ConfigError("dimension out of range: " + std::to_string(c.dimension) + " (expected 2..4)");
  const int n = c.dimension;

  const bool needs_a = c.kind == StructureKind::riemannian || c.kind == StructureKind::randers ||
                       c.kind == StructureKind::kropina;
  const bool needs_b = c.kind == StructureKind::randers || c.kind == StructureKind::kropina;
  if (needs_a) {
    if (!s.contains("a") || !s["a"].is_array() || static_cast<int>(s["a"].size()) != n)
      throw ConfigError("structure.a must be an n x n array");
    for (int i = 0; i < n; ++i) {
      const json& row = s["a"][i];
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        throw ConfigError("structure.a must be an n x n array");
      std::vector<std::string> r;
      for (int j = 0; j < n; ++j)
        r.push_back(expr_text(row[j], "structure.a[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
      c.a.push_back(std::move(r));
    }
  } else if (s.contains("a")) {
    throw ConfigError("structure.a is not used by kind '" + kind + "'");
  }
  if (needs_b) {
    if (!s.contains("b") || !s["b"].is_array() || static_cast<int>(s["b"].size()) != n)
      throw ConfigError("structure.b must be an array of n entries");
    for (int i = 0; i < n; ++i) c.b.push_back(expr_text(s["b"][i], "structure.b[" + std::to_string(i) + "]"));
  } else if (s.contains("b")) {
    throw ConfigError("structure.b is not used by kind '" + kind + "'");
  }
  if (c.kind == StructureKind::expression) {
    if (!s.contains("F") || !s["F"].is_string()) throw ConfigError("structure.F must be an expression string");
    c.expression = s["F"].get<std::string>();
  }
}

void parse_grid(const json& g, RunConfig& c) {
  only_keys(g, "grid", {"lower", "upper", "counts", "directions", "radii", "jitter", "lie_samples"});
  const std::size_t n = static_cast<std::size_t>(c.dimension);
  auto sized = [&](const char* key) {
    auto v = numbers(g[key], std::string("grid.") + key);
    if (v.size() != n) throw ConfigError(std::string("grid.") + key + " must have n entries");
    return v;
  };
  if (g.contains("lower")) c.grid.lower = sized("lower");
  if (g.contains("upper")) c.grid.upper = sized("upper");
  if (g.contains("counts")) {
    std::vector<int> counts;
    for (double v : sized("counts")) {
      if (v < 1 || v != static_cast<int>(v)) throw ConfigError("grid.counts must be positive integers");
      counts.push_back(static_cast<int>(v));
    }
    c.grid.counts = counts;
  }
  if (g.contains("directions")) {
    if (!g["directions"].is_array() || g["directions"].empty())
      throw ConfigError("grid.directions must be a nonempty array");
    std::vector<std::vector<double>> dirs;
    for (const auto& d : g["directions"]) {
      auto v = numbers(d, "grid.directions");
      if (v.size() != n) throw ConfigError("grid.directions entries must have n components");
      dirs.push_back(std::move(v));
    }
    c.grid.directions = dirs;
  }
  if (g.contains("radii")) {
    auto r = numbers(g["radii"], "grid.radii");
    if (r.empty()) throw ConfigError("grid.radii must be nonempty");
    for (double v : r)
      if (!(v > 0)) throw ConfigError("grid.radii must be positive");
    c.grid.radii = r;
  }
  if (g.contains("jitter")) {
    c.grid.jitter = number(g["jitter"], "grid.jitter");
    if (c.grid.jitter < 0) throw ConfigError("grid.jitter must be nonnegative");
  }
  if (g.contains("lie_samples")) {
    if (!g["lie_samples"].is_number_integer() || g["lie_samples"].get<int>() < 1)
      throw ConfigError("grid.lie_samples must be a positive integer");
    c.grid.lie_samples = g["lie_samples"].get<int>();
  }
  if (c.grid.lower && c.grid.upper)
    for (std::size_t i = 0; i < n; ++i)
      if ((*c.grid.lower)[i] > (*c.grid.upper)[i]) throw ConfigError("grid.lower exceeds grid.upper");
}

}  // namespace

RunConfig parse_config(const json& doc) {
  only_keys(doc, "config", {"structure", "lift", "fields", "grid", "tolerances", "mode", "seed", "description"});
  RunConfig c;
  c.source = doc;
  if (!doc.contains("structure")) throw ConfigError("config needs a 'structure' section");
  parse_structure(doc["structure"], c);

  if (doc.contains("lift")) {
    const json& l = doc["lift"];
    only_keys(l, "lift", {"alpha", "beta", "gamma"});
    if (l.contains("alpha")) c.lift.alpha = number(l["alpha"], "lift.alpha");
    if (l.contains("beta")) c.lift.beta = number(l["beta"], "lift.beta");
    if (l.contains("gamma")) c.lift.gamma = number(l["gamma"], "lift.gamma");
  }

  if (doc.contains("fields")) {
    if (!doc["fields"].is_array()) throw ConfigError("fields must be an array");
    int k = 0;
    for (const auto& f : doc["fields"]) {
      FieldSpec spec;
      const json* comps = &f;
      if (f.is_object()) {
        only_keys(f, "fields entry", {"name", "components"});
        if (f.contains("name")) spec.name = f["name"].get<std::string>();
        if (!f.contains("components")) throw ConfigError("fields entry needs 'components'");
        comps = &f["components"];
      }
      if (!comps->is_array() || static_cast<int>(comps->size()) != c.dimension)
        throw ConfigError("vector field needs " + std::to_string(c.dimension) + " components");
      for (const auto& e : *comps) spec.components.push_back(expr_text(e, "fields component"));
      if (spec.name.empty()) spec.name = "field_" + std::to_string(k);
      c.fields.push_back(std::move(spec));
      ++k;
    }
  }

  if (doc.contains("grid")) parse_grid(doc["grid"], c);

  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) throw ConfigError("tolerances must be an object");
    for (const auto& [k, v] : t.items()) {
      const double x = number(v, "tolerances." + k);
      if (!(x > 0)) throw ConfigError("tolerance '" + k + "' must be positive");
      c.tolerances[k] = x;
    }
  }
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw ConfigError("mode must be a string");
    c.mode = parse_mode(doc["mode"].get<std::string>());
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() || doc["seed"].get<long long>() < 0)
      throw ConfigError("seed must be a nonnegative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

GridSpec grid_spec(const RunConfig& c, GridPurpose purpose) {
  GridSpec g = purpose == GridPurpose::validation ? default_validation_grid(c.dimension)
                                                  : default_classification_grid(c.dimension);
  if (c.grid.lower) g.lower = *c.grid.lower;
  if (c.grid.upper) g.upper = *c.grid.upper;
  if (c.grid.counts) g.counts = *c.grid.counts;
  if (c.grid.directions) g.directions = *c.grid.directions;
  if (c.grid.radii) g.radii = *c.grid.radii;
  g.jitter = c.grid.jitter;
  g.seed = static_cast<unsigned>(c.seed);
  return g;
}

FinslerStructure build_structure(const RunConfig& c) {
  const int n = c.dimension;
  try {
    // Positive definiteness (and |b| < 1 for Randers) is checked at the base
    // points of the configured grid.
    const auto base = grid_base_points(grid_spec(c, GridPurpose::validation));
    switch (c.kind) {
      case StructureKind::euclidean: return FinslerStructure::euclidean(n);
      case StructureKind::riemannian: return FinslerStructure::riemannian(ExprMatrix::parse(c.a, n), base);
      case StructureKind::randers:
        return FinslerStructure::randers(ExprMatrix::parse(c.a, n), parse_covector(c.b, n), base);
      case StructureKind::kropina:
        return FinslerStructure::kropina(ExprMatrix::parse(c.a, n), parse_covector(c.b, n), base);
      case StructureKind::expression: return FinslerStructure::expression(c.expression, n);
    }
  } catch (const ParseError& e) {
    throw ConfigError(std::string("structure: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("structure: ") + e.what());
  }
  throw ConfigError("unsupported structure kind");
}

std::vector<VectorFieldOnM> build_fields(const RunConfig& c) {
  std::vector<VectorFieldOnM> out;
  for (const auto& f : c.fields) {
    try {
      out.push_back(VectorFieldOnM::parse(f.components, c.dimension, f.name));
    } catch (const ParseError& e) {
      throw ConfigError("field '" + f.name + "': " + e.what());
    } catch (const ArgumentError& e) {
      throw ConfigError("field '" + f.name + "': " + e.what());
    }
  }
  return out;
}

}  // namespace finsler::app
