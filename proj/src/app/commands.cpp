#include "finsler/app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace finsler::app {

using nlohmann::json;

const std::vector<ToleranceDefault>& tolerance_defaults() {
  static const std::vector<ToleranceDefault> table = {
      {"homogeneity", 1e-9, 1e-9},
      {"euler_identity", 1e-9, 1e-9},
      {"g_symmetry", 1e-12, 1e-8},
      {"inverse", 1e-10, 1e-8},
      {"cartan_symmetry", 1e-10, 1e-6},
      {"cartan_y_contraction", 1e-8, 1e-6},
      {"deflection", 1e-8, 1e-6},
      {"torsion_free", 1e-10, 1e-6},
      {"horizontal_metricity", 1e-8, 1e-8},
      {"vertical_metricity", 1e-8, 1e-8},
      {"delta_F", 1e-8, 1e-8},
      {"spray_homogeneity", 1e-8, 1e-6},
      {"connection_homogeneity", 1e-8, 1e-6},
      {"curvature_antisymmetry", 1e-10, 1e-10},
      {"curvature_contraction", 1e-6, 1e-4},
      {"cross_mode", 1e-5, 1e-5},
      {"det_identity", 1e-8, 1e-8},
      {"brackets", 1e-4, 1e-4},
      {"lie_y", 1e-12, 1e-12},
      {"lie_nonlinear_connection", 1e-5, 1e-5},
      {"lie_frame", 1e-5, 1e-5},
      {"lie_lift_forms", 1e-4, 1e-4},
      {"lie_lift_flow", 1e-4, 1e-4},
      {"lie_assembly_consistency", 1e-10, 1e-10},
      {"interchange", 1e-5, 1e-5},
      {"conformal_residual", 1e-6, 1e-6},
      {"omega_spread", 1e-6, 1e-6},
      {"proof_step", 1e-6, 1e-6},
      {"omega_vertical", 1e-6, 1e-6},
  };
  return table;
}

double tolerance(const RunConfig& c, const std::string& name, Mode mode) {
  if (auto it = c.tolerances.find(name); it != c.tolerances.end()) return it->second;
  for (const auto& d : tolerance_defaults())
    if (name == d.name) return mode == Mode::jet ? d.jet : d.fd;
  throw ConfigError("unknown tolerance '" + name + "'");
}

void check_tolerance_names(const RunConfig& c) {
  for (const auto& [name, value] : c.tolerances) {
    bool known = false;
    for (const auto& d : tolerance_defaults()) known = known || name == d.name;
    if (!known) throw ConfigError("unknown tolerance '" + name + "'");
  }
}

VectorFieldOnM quadratic_test_field(int n) {
  std::vector<std::string> comps;
  char buf[128];
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    std::snprintf(buf, sizeof buf, "0.5*x%d^2 + 0.3*x%d*x%d - 0.2*x%d + 0.1", i + 1, i + 1, j + 1, j + 1);
    comps.emplace_back(buf);
  }
  return VectorFieldOnM::parse(comps, n, "quadratic_test");
}

namespace {

double rel(double residual, double scale) { return residual / std::max(1.0, scale); }

std::vector<TangentSample> subset(const std::vector<TangentSample>& grid, int count) {
  const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(count), grid.size());
  std::vector<TangentSample> out;
  for (std::size_t k = 0; k < m; ++k) out.push_back(grid[k * grid.size() / m]);
  return out;
}

CheckRecord from_validation(const ValidationReport& v, const std::string& anchor,
                            const std::string& statistic) {
  CheckRecord r;
  r.name = v.name;
  r.anchor = anchor;
  r.statistic = statistic;
  r.value = v.max_residual;
  r.tolerance = v.tolerance;
  r.pass = v.pass;
  r.samples = v.samples_checked;
  r.worst = v.worst;
  return r;
}

// Tensor-level identities on one TensorSet, shared by both modes.
struct TensorChecks {
  CheckAccumulator symmetry, inverse, cartan_sym, cartan_y, deflection, torsion, antisym, contraction;

  TensorChecks(const RunConfig& c, Mode m)
      : symmetry("g_symmetry", "g_ij = g_ji", tolerance(c, "g_symmetry", m)),
        inverse("inverse", "g_ij g^jk = delta_i^k", tolerance(c, "inverse", m)),
        cartan_sym("cartan_symmetry", "C_ijk totally symmetric", tolerance(c, "cartan_symmetry", m)),
        cartan_y("cartan_y_contraction", "y^m C_mij = 0", tolerance(c, "cartan_y_contraction", m)),
        deflection("deflection", "y^m F_m^h_i = N^h_i", tolerance(c, "deflection", m)),
        torsion("torsion_free", "F_i^h_j = F_j^h_i", tolerance(c, "torsion_free", m)),
        antisym("curvature_antisymmetry", "R^h_ij = -R^h_ji", tolerance(c, "curvature_antisymmetry", m)),
        contraction("curvature_contraction", "y^m R_m^h_ij = R^h_ij",
                    tolerance(c, "curvature_contraction", m)) {}

  void add(const TensorSet& t, const TangentSample& s) {
    const int n = s.dimension();
    const std::string where = s.describe();
    const double gs = max_abs(t.g);
    double sym = 0, inv = 0, csym = 0, cy = 0, defl = 0, tor = 0, anti = 0, con = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        sym = std::max(sym, std::abs(t.g(i, j) - t.g(j, i)));
        double e = (i == j) ? -1.0 : 0.0;
        for (int k = 0; k < n; ++k) e += t.g(i, k) * t.g_inv(k, j);
        inv = std::max(inv, std::abs(e));
        double yc = 0.0, yf = -t.N(i, j);
        for (int m = 0; m < n; ++m) {
          yc += s.y[m] * t.C(m, i, j);
          yf += s.y[m] * t.F(m, i, j);
        }
        cy = std::max(cy, std::abs(yc));
        defl = std::max(defl, std::abs(yf));
        for (int k = 0; k < n; ++k) {
          csym = std::max({csym, std::abs(t.C(i, j, k) - t.C(j, i, k)), std::abs(t.C(i, j, k) - t.C(i, k, j))});
          tor = std::max(tor, std::abs(t.F(i, j, k) - t.F(k, j, i)));
          anti = std::max(anti, std::abs(t.Rh(i, j, k) + t.Rh(i, k, j)));
          // y^m R_m^h_ij = R^h_ij; R_m^h_ij sits at R(m, h, i, j).
          double yr = -t.Rh(i, j, k);
          for (int m = 0; m < n; ++m) yr += s.y[m] * t.R(m, i, j, k);
          con = std::max(con, std::abs(yr));
        }
      }
    symmetry.add(rel(sym, gs), where);
    inverse.add(inv, where);
    cartan_sym.add(rel(csym, max_abs(t.C)), where);
    cartan_y.add(rel(cy, max_abs(t.C)), where);
    defl = rel(defl, max_abs(t.N));
    deflection.add(defl, where);
    torsion.add(rel(tor, max_abs(t.F)), where);
    antisym.add(rel(anti, max_abs(t.Rh)), where);
    contraction.add(rel(con, max_abs(t.Rh)), where);
  }

  void finish(Report& r) const {
    for (const auto* a : {&symmetry, &inverse, &cartan_sym, &cartan_y, &deflection, &torsion, &antisym, &contraction})
      r.checks.push_back(a->finish());
  }
};

TensorSet tensor_set(const LocalGeometry& geo) {
  const auto curv = hh_curvature(geo);
  return {values(geo.g()), values(geo.g_inv()), values(geo.C()), values(geo.spray()),
          values(geo.N()), values(geo.F()),     curv.Rh,         curv.R};
}

double cross_mode_diff(const TensorSet& a, const TensorSet& b) {
  const auto ea = tensor_entries(a);
  const auto eb = tensor_entries(b);
  double worst = 0.0;
  for (std::size_t k = 0; k < ea.size(); ++k)
    worst = std::max(worst, rel(max_abs_diff(*ea[k].second, *eb[k].second), max_abs(*ea[k].second)));
  return worst;
}

// Lie-derivative of y^i as a (1,0) field; must vanish identically.
double lie_of_y(const VectorFieldOnM& v, const TangentSample& s) {
  const int n = s.dimension();
  JetTensor y(n, {upper("i")});
  for (int i = 0; i < n; ++i) y(i) = Jet::variable(s.y[i], y_var(i, n), 2 * n, 1);
  return max_abs(lie_derivative_tensor(y, v, s));
}

}  // namespace

Report cmd_verify(const RunConfig& c, std::optional<Mode> mode_override) {
  check_tolerance_names(c);
  const Mode mode = mode_override.value_or(c.mode);
  const FinslerStructure f = build_structure(c);
  auto fields = build_fields(c);
  fields.push_back(quadratic_test_field(c.dimension));
  const int n = c.dimension;

  Report r;
  r.command = "verify";
  r.config = c.source;
  r.mode = to_string(mode);
  r.notes.push_back("tensor identities use " + std::string(mode == Mode::jet ? "jet" : "finite-difference") +
                    " tensors; Lie-derivative checks run on a subset of " +
                    std::to_string(c.grid.lie_samples) + " samples");

  std::vector<TangentSample> grid;
  try {
    grid = make_grid(grid_spec(c, GridPurpose::validation));
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }

  const std::vector<double> lambdas{0.5, 2.0, 3.7};
  r.checks.push_back(from_validation(check_homogeneity(f, grid, lambdas, tolerance(c, "homogeneity", mode)),
                                     "F(x, t y) = t F(x, y), t > 0", "max_residual"));
  r.checks.push_back(from_validation(check_euler(f, grid, tolerance(c, "euler_identity", mode)),
                                     "y^i dF/dy^i = F", "max_residual"));
  r.checks.push_back(from_validation(check_positivity(f, grid), "F > 0 off the zero section", "min_value"));
  r.checks.push_back(from_validation(check_strong_convexity(f, grid), "g_ij positive definite", "min_eigenvalue"));

  TensorChecks tc(c, mode);
  CheckAccumulator hmetric("horizontal_metricity", "nabla_k g_ij = 0 (horizontal)",
                           tolerance(c, "horizontal_metricity", mode));
  CheckAccumulator vmetric("vertical_metricity", "nabla_k g_ij = 0 (vertical)",
                           tolerance(c, "vertical_metricity", mode));
  CheckAccumulator deltaF("delta_F", "delta_i F = 0", tolerance(c, "delta_F", mode));
  CheckAccumulator spray_h("spray_homogeneity", "G^i(x, t y) = t^2 G^i(x, y)", tolerance(c, "spray_homogeneity", mode));
  CheckAccumulator conn_h("connection_homogeneity", "N^i_j(x, t y) = t N^i_j(x, y)",
                          tolerance(c, "connection_homogeneity", mode));
  CheckAccumulator det("det_identity", "det G = (alpha gamma - beta^2)^n det(g)^2",
                       tolerance(c, "det_identity", mode));
  CheckRecord signature{"lift_signature", "lift classification matches eigenvalue signs", "mismatches",
                        0.0, 0.0, true, 0, ""};
  const LiftClass lift_class = classify_lift(c.lift);

  for (const auto& s : grid) {
    const std::string where = s.describe();
    const auto geo = LocalGeometry::compute(f, s, 4);
    const TensorSet jet_set = tensor_set(geo);
    const TensorSet set = mode == Mode::jet ? jet_set : tensors_fd(f, s);
    tc.add(set, s);

    hmetric.add(rel(max_abs(values(h_covariant_derivative(geo, geo.g()))), max_abs(set.g)), where);
    vmetric.add(rel(max_abs(values(v_covariant_derivative(geo, geo.g()))), max_abs(set.g)), where);
    {
      JetTensor F0(n, {}, evaluate_F(f, s, 2));
      deltaF.add(rel(max_abs(values(delta_derivative(geo, F0))), F0.data()[0].value()), where);
    }

    // A scale that is not a power of two, so the comparison is not exact by
    // floating-point accident.
    constexpr double t = 1.7;
    TangentSample scaled = s;
    for (auto& v : scaled.y) v *= t;
    TensorSet at_scaled;
    if (mode == Mode::jet) {
      const auto g2 = LocalGeometry::compute(f, scaled, 3);
      at_scaled.spray = values(g2.spray());
      at_scaled.N = values(g2.N());
    } else {
      at_scaled = tensors_fd(f, scaled);
    }
    double sh = 0.0, nh = 0.0;
    for (int i = 0; i < n; ++i) {
      sh = std::max(sh, std::abs(at_scaled.spray(i) - t * t * set.spray(i)));
      for (int j = 0; j < n; ++j) nh = std::max(nh, std::abs(at_scaled.N(i, j) - t * set.N(i, j)));
    }
    spray_h.add(rel(sh, t * t * max_abs(set.spray)), where);
    conn_h.add(rel(nh, t * max_abs(set.N)), where);

    det.add(det_identity_residual(set.g, c.lift), where);
    ++signature.samples;
    const auto lift = build_lift_metric(set.g, c.lift);
    if (!signature_consistent(lift_class, signature_of(lift.matrix), n)) {
      signature.value += 1.0;
      signature.pass = false;
      if (signature.worst.empty()) signature.worst = where;
    }
  }
  tc.finish(r);
  for (const auto* a : {&hmetric, &vmetric, &deltaF, &spray_h, &conn_h, &det}) r.checks.push_back(a->finish());
  r.checks.push_back(signature);

  // Finite-difference and Lie-derivative checks on an evenly spaced subset.
  CheckAccumulator cross("cross_mode", "jet tensors = finite-difference tensors", tolerance(c, "cross_mode", mode));
  CheckAccumulator brackets("brackets",
                            "[delta_i, delta_j] = R^h_ij d/dy^h; [delta_i, d/dy^j] = (dN^h_i/dy^j) d/dy^h; "
                            "[d/dy^i, d/dy^j] = 0",
                            tolerance(c, "brackets", mode));
  CheckAccumulator lie_y("lie_y", "L_V y^i = 0", tolerance(c, "lie_y", mode));
  CheckAccumulator lie_n("lie_nonlinear_connection", "L_{X^c} delta_i = -d_i v^h delta_h - L_V N^h_i d/dy^h",
                         tolerance(c, "lie_nonlinear_connection", mode));
  CheckAccumulator lie_frame("lie_frame",
                             "L_{X^c} d/dy^i = -d_i v^h d/dy^h; L_{X^c} dx^h = d_m v^h dx^m; "
                             "L_{X^c} delta y^h = L_V N^h_m dx^m + d_m v^h delta y^m",
                             tolerance(c, "lie_frame", mode));
  CheckAccumulator forms("lie_lift_forms", "L_{X^c} g1, g2, g3 = their coordinate expansions",
                         tolerance(c, "lie_lift_forms", mode));
  CheckAccumulator flow("lie_lift_flow", "L_{X^c} G from the block equations = flow derivative of G",
                        tolerance(c, "lie_lift_flow", mode));
  CheckAccumulator assembly("lie_assembly_consistency", "term-by-term expansion of L_{X^c} G = block equations",
                            tolerance(c, "lie_assembly_consistency", mode));
  CheckAccumulator inter("interchange",
                         "nabla_k L g_ij - L nabla_k g_ij = g_aj L F^a_ik + g_ai L F^a_jk + 2 C_ijm L N^m_k",
                         tolerance(c, "interchange", mode));

  for (const auto& s : subset(grid, c.grid.lie_samples)) {
    const std::string where = s.describe();
    const auto geo = LocalGeometry::compute(f, s, 4);
    cross.add(cross_mode_diff(tensor_set(geo), tensors_fd(f, s)), where);
    brackets.add(bracket_check(f, s).max(), where);
    for (const auto& v : fields) {
      const std::string at = v.name + " at " + where;
      lie_y.add(lie_of_y(v, s), at);
      const auto lr = lemma_32_33_check(f, v, s, c.lift);
      lie_n.add(lr.lie_delta, at);
      lie_frame.add(std::max({lr.lie_vertical, lr.lie_dx, lr.lie_delta_y}), at);
      forms.add(std::max({lr.forms[0], lr.forms[1], lr.forms[2]}), at);
      flow.add(lr.lift_flow, at);
      const LieInputs in = lie_inputs(geo, v);
      const Eigen::MatrixXd blocks = lift_lie_blocks(in, c.lift);
      const Eigen::MatrixXd terms = lift_lie_terms(in, c.lift);
      assembly.add((blocks - terms).cwiseAbs().maxCoeff() / std::max(1.0, blocks.cwiseAbs().maxCoeff()), at);
      inter.add(interchange_residual(geo, v).max_residual, at);
    }
  }
  for (const auto* a : {&cross, &brackets, &lie_y, &lie_n, &lie_frame, &forms, &flow, &assembly, &inter})
    r.checks.push_back(a->finish());
  return r;
}

Report cmd_classify(const RunConfig& c) {
  check_tolerance_names(c);
  if (classify_lift(c.lift) == LiftClass::singular)
    throw ConfigError("lift metric singular: alpha*gamma - beta^2 = 0");
  const FinslerStructure f = build_structure(c);
  const auto fields = build_fields(c);
  if (fields.empty()) throw ConfigError("classify needs at least one vector field");
  const Mode mode = Mode::jet;

  std::vector<TangentSample> grid;
  try {
    grid = make_grid(grid_spec(c, GridPurpose::classification));
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }

  ConformalTolerances tol;
  tol.residual = tolerance(c, "conformal_residual", mode);
  tol.spread = tolerance(c, "omega_spread", mode);
  tol.proof_step = tolerance(c, "proof_step", mode);
  tol.vertical = tolerance(c, "omega_vertical", mode);

  Theorem1Summary summary;
  try {
    summary = theorem1_suite(f, c.lift, fields, grid, tol);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }

  Report r;
  r.command = "classify";
  r.config = c.source;
  r.mode = to_string(mode);
  r.notes.push_back("constancy of the conformal factor is tested on the sampled grid only");
  for (const auto& cr : summary.reports) r.classification.push_back(to_json(cr));

  CheckRecord none{"no_conformal_nonhomothetic", "every conformal complete lift is homothetic",
                   "count", static_cast<double>(summary.conformal_nonhomothetic), 0.0,
                   summary.conformal_nonhomothetic == 0, static_cast<int>(fields.size()), ""};
  CheckAccumulator lie_n("proof_step_lie_N", "conformal with gamma != 0 implies L_V N = 0", tol.proof_step);
  CheckAccumulator vert("proof_step_vertical", "conformal factor independent of y", tol.vertical);
  CheckAccumulator gz("proof_step_gamma_zero", "gamma = 0: y^k (g_ai L F^a_jk + g_aj L F^a_ik) = 0",
                      tol.proof_step);
  for (const auto& cr : summary.reports) {
    if (cr.verdict == Verdict::conformal_nonhomothetic && none.worst.empty()) none.worst = cr.field;
    const bool conformal = cr.verdict == Verdict::killing || cr.verdict == Verdict::homothetic;
    if (!conformal) continue;
    if (c.lift.gamma != 0.0) {
      lie_n.add(cr.lie_n_max, cr.field);
      vert.add(cr.vertical_gradient_max, cr.field);
    } else if (c.lift.beta != 0.0) {
      gz.add(cr.gamma_zero_identity_max, cr.field);
    }
  }
  r.checks.push_back(none);
  for (const auto* a : {&lie_n, &vert, &gz}) r.checks.push_back(a->finish());
  return r;
}

Report cmd_tensors(const RunConfig& c, const TangentSample& s, std::optional<Mode> mode_override) {
  check_tolerance_names(c);
  const Mode mode = mode_override.value_or(c.mode);
  if (s.dimension() != c.dimension) throw ConfigError("sample dimension does not match the structure");
  const FinslerStructure f = build_structure(c);
  const TensorSet jet = tensors_jet(f, s);
  const TensorSet fd = tensors_fd(f, s);
  const TensorSet& shown = mode == Mode::jet ? jet : fd;

  Report r;
  r.command = "tensors";
  r.config = c.source;
  r.mode = to_string(mode);
  json t = {{"sample", {{"x", s.x}, {"y", s.y}}}};
  for (const auto& [name, value] : tensor_entries(shown)) t[name] = to_json(*value);
  r.tensors = t;
  CheckAccumulator cross("cross_mode", "jet tensors = finite-difference tensors", tolerance(c, "cross_mode", mode));
  cross.add(cross_mode_diff(jet, fd), s.describe());
  r.checks.push_back(cross.finish());
  return r;
}

}  // namespace finsler::app
