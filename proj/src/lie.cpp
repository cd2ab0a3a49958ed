#include "finsler/lie.hpp"

#include <cmath>
#include <random>

namespace finsler {

VectorFieldOnM VectorFieldOnM::parse(const std::vector<std::string>& components, int n,
                                     std::string name) {
  if (static_cast<int>(components.size()) != n)
    throw ArgumentError("vector field needs " + std::to_string(n) + " components, got " +
                        std::to_string(components.size()));
  VectorFieldOnM v;
  v.name = std::move(name);
  for (const auto& text : components) {
    ExprTree e = parse_expression(text, n);
    if (e.uses_fiber_variables())
      throw ArgumentError("vector field component '" + text + "' depends on y");
    v.components.push_back(std::move(e));
  }
  return v;
}

std::vector<double> VectorFieldOnM::at(const std::vector<double>& x) const {
  std::vector<double> out;
  for (const auto& c : components) out.push_back(c.evaluate<double>(x, x));
  return out;
}

std::vector<Jet> VectorFieldOnM::jets(const TangentSample& s, int order) const {
  if (s.dimension() != dimension()) throw ArgumentError("sample dimension does not match field");
  const auto vars = seed_sample(s, order);
  const int n = dimension();
  std::span<const Jet> all(vars);
  std::vector<Jet> out;
  for (const auto& c : components) out.push_back(c.evaluate<Jet>(all.first(n), all.subspan(n)));
  return out;
}

namespace {

// dv[b][a] = d_a v^b as jets of the given order.
std::vector<std::vector<Jet>> field_gradient(const std::vector<Jet>& v, int n, int order) {
  std::vector<std::vector<Jet>> dv(n, std::vector<Jet>(n));
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) dv[b][a] = v[b].derivative(x_var(a)).truncated(order);
  return dv;
}

struct FieldDerivatives {
  std::vector<double> v;
  Eigen::MatrixXd dv;             // (b, a) = d_a v^b
  std::vector<Eigen::MatrixXd> d2v;  // d2v[b](a, c) = d_a d_c v^b
};

FieldDerivatives field_derivatives(const VectorFieldOnM& v, const TangentSample& s) {
  const int n = v.dimension();
  const auto j = v.jets(s, 2);
  FieldDerivatives out{{}, Eigen::MatrixXd(n, n), {}};
  for (int b = 0; b < n; ++b) {
    out.v.push_back(j[b].value());
    Eigen::MatrixXd h(n, n);
    for (int a = 0; a < n; ++a) {
      out.dv(b, a) = extract_partial(j[b], {x_var(a)});
      for (int c = 0; c < n; ++c) h(a, c) = extract_partial(j[b], {x_var(a), x_var(c)});
    }
    out.d2v.push_back(h);
  }
  return out;
}

}  // namespace

JetTensor lie_derivative(const JetTensor& t, const VectorFieldOnM& v, const TangentSample& s) {
  const int n = t.dim();
  if (v.dimension() != n) throw ArgumentError("field dimension does not match tensor");
  const int out_order = jet_order(t) - 1;
  if (out_order < 0) throw ArgumentError("Lie derivative needs a jet of order >= 1");
  const auto vj = v.jets(s, out_order + 1);
  const auto dv = field_gradient(vj, n, out_order);

  std::vector<Jet> vt(n), w(n);
  for (int a = 0; a < n; ++a) vt[a] = vj[a].truncated(out_order);
  for (int b = 0; b < n; ++b) {
    Jet acc = vt[0].constant_like(0.0);
    for (int a = 0; a < n; ++a)
      acc += Jet::variable(s.y[a], y_var(a, n), 2 * n, out_order) * dv[b][a];
    w[b] = std::move(acc);
  }

  const JetTensor tv = truncated(t, out_order);
  const int rank = t.rank();
  JetTensor out(n, t.signature());
  std::vector<int> moved(rank);
  for_each_index(rank, n, [&](std::span<const int> idx) {
    const Jet& te = t.at(idx);
    Jet acc = vt[0].constant_like(0.0);
    for (int a = 0; a < n; ++a) {
      acc += vt[a] * te.derivative(x_var(a)).truncated(out_order);
      acc += w[a] * te.derivative(y_var(a, n)).truncated(out_order);
    }
    for (int slot = 0; slot < rank; ++slot) {
      std::copy(idx.begin(), idx.end(), moved.begin());
      const bool up = t.signature()[slot].variance == Variance::upper;
      for (int a = 0; a < n; ++a) {
        moved[slot] = a;
        if (up)
          acc -= tv.at(moved) * dv[idx[slot]][a];
        else
          acc += tv.at(moved) * dv[a][idx[slot]];
      }
    }
    out.at(idx) = std::move(acc);
  });
  return out;
}

TensorValue lie_derivative_tensor(const JetTensor& t, const VectorFieldOnM& v,
                                  const TangentSample& s) {
  return values(lie_derivative(t, v, s));
}

JetTensor lie_derivative_nonlinear_connection(const LocalGeometry& geo, const VectorFieldOnM& v) {
  const int n = geo.dimension();
  const TangentSample& s = geo.sample();
  JetTensor out = lie_derivative(geo.N(), v, s);
  const int order = jet_order(out);
  const auto vj = v.jets(s, order + 2);
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out(h, i) += geo.y(j, order) *
                     vj[h].derivative(x_var(i)).derivative(x_var(j)).truncated(order);
  return out;
}

TensorValue lie_derivative_nonlinear_connection(const FinslerStructure& f, const VectorFieldOnM& v,
                                                const TangentSample& s) {
  return values(lie_derivative_nonlinear_connection(LocalGeometry::compute(f, s, 4), v));
}

JetTensor lie_derivative_connection(const LocalGeometry& geo, const VectorFieldOnM& v) {
  const int n = geo.dimension();
  const TangentSample& s = geo.sample();
  JetTensor out = lie_derivative(geo.F(), v, s);
  const int order = jet_order(out);
  const auto vj = v.jets(s, order + 2);
  for (int i = 0; i < n; ++i)
    for (int h = 0; h < n; ++h)
      for (int j = 0; j < n; ++j)
        out(i, h, j) += vj[h].derivative(x_var(i)).derivative(x_var(j)).truncated(order);
  return out;
}

CompleteLiftValue complete_lift(const LocalGeometry& geo, const VectorFieldOnM& v) {
  const int n = geo.dimension();
  const auto vj = v.jets(geo.sample(), 1);
  JetTensor V(n, {upper("i")});
  V.data() = vj;
  const TensorValue nabla = values(h_covariant_derivative(geo, V));  // (i, j) = nabla_j v^i
  CompleteLiftValue out{std::vector<double>(n), std::vector<double>(n, 0.0), geo.sample()};
  for (int i = 0; i < n; ++i) {
    out.horizontal[i] = vj[i].value();
    for (int j = 0; j < n; ++j) out.vertical[i] += geo.sample().y[j] * nabla(i, j);
  }
  return out;
}

CompleteLiftValue complete_lift(const FinslerStructure& f, const VectorFieldOnM& v,
                                const TangentSample& s) {
  return complete_lift(LocalGeometry::compute(f, s, 3), v);
}

LieInputs lie_inputs(const LocalGeometry& geo, const VectorFieldOnM& v) {
  if (geo.order() < 4) throw ArgumentError("Lie derivatives need a geometry of jet order 4");
  return {values(geo.g()), values(lie_derivative(truncated(geo.g(), 1), v, geo.sample())),
          values(lie_derivative_nonlinear_connection(geo, v))};
}

namespace {

// P_ij = g_ai L N^a_j
Eigen::MatrixXd g_times_lie_n(const LieInputs& in) {
  const int n = in.g.dim();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < n; ++a) p(i, j) += in.g(a, i) * in.lie_N(a, j);
  return p;
}

}  // namespace

Eigen::MatrixXd lift_lie_blocks(const LieInputs& in, const LiftCoefficients& c) {
  const int n = in.g.dim();
  const Eigen::MatrixXd lg = to_matrix(in.lie_g);
  const Eigen::MatrixXd p = g_times_lie_n(in);
  Eigen::MatrixXd m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = c.alpha * lg + c.beta * (p + p.transpose());
  m.topRightCorner(n, n) = c.beta * lg + c.gamma * p.transpose();
  m.bottomLeftCorner(n, n) = m.topRightCorner(n, n).transpose();
  m.bottomRightCorner(n, n) = c.gamma * lg;
  return m;
}

Eigen::MatrixXd lift_lie_terms(const LieInputs& in, const LiftCoefficients& c) {
  const int n = in.g.dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  // A term 2 S_ij dx^i delta y^j fills hv with S and vh with S^T; a term
  // 2 S_ij dx^i dx^j fills hh with S + S^T.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double gn_ij = 0.0, gn_ji = 0.0;  // g_ai L N^a_j and g_aj L N^a_i
      for (int a = 0; a < n; ++a) {
        gn_ij += in.g(a, i) * in.lie_N(a, j);
        gn_ji += in.g(a, j) * in.lie_N(a, i);
      }
      const double lg = in.lie_g(i, j);
      // alpha L g_ij dx^i dx^j
      m(i, j) += c.alpha * lg;
      // 2 beta L g_ij dx^i delta y^j
      m(i, n + j) += c.beta * lg;
      m(n + j, i) += c.beta * lg;
      // 2 beta g_ai L N^a_j dx^i dx^j
      m(i, j) += c.beta * gn_ij;
      m(j, i) += c.beta * gn_ij;
      // gamma L g_ij delta y^i delta y^j
      m(n + i, n + j) += c.gamma * lg;
      // 2 gamma g_aj L N^a_i dx^i delta y^j
      m(i, n + j) += c.gamma * gn_ji;
      m(n + j, i) += c.gamma * gn_ji;
    }
  return m;
}

std::array<Eigen::MatrixXd, 3> lift_lie_forms(const LieInputs& in) {
  const int n = in.g.dim();
  const Eigen::MatrixXd lg = to_matrix(in.lie_g);
  const Eigen::MatrixXd p = g_times_lie_n(in);
  std::array<Eigen::MatrixXd, 3> out;
  for (auto& m : out) m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  // L g1 = L g_ij dx^i dx^j
  out[0].topLeftCorner(n, n) = lg;
  // L g2 = 2 L g_ij dx^i delta y^j + 2 g_ij L N^j_m dx^i dx^m
  out[1].topLeftCorner(n, n) = p + p.transpose();
  out[1].topRightCorner(n, n) = lg;
  out[1].bottomLeftCorner(n, n) = lg.transpose();
  // L g3 = L g_ij delta y^i delta y^j + 2 g_ij L N^i_m dx^m delta y^j
  out[2].bottomRightCorner(n, n) = lg;
  out[2].topRightCorner(n, n) = p.transpose();
  out[2].bottomLeftCorner(n, n) = p;
  return out;
}

Eigen::MatrixXd lie_derivative_lift_metric(const FinslerStructure& f, const VectorFieldOnM& v,
                                           const TangentSample& s, const LiftCoefficients& c) {
  return lift_lie_blocks(lie_inputs(LocalGeometry::compute(f, s, 4), v), c);
}

InterchangeResult interchange_residual(const LocalGeometry& geo, const VectorFieldOnM& v) {
  if (geo.order() < 4) throw ArgumentError("interchange check needs a geometry of jet order 4");
  const int n = geo.dimension();
  const TangentSample& s = geo.sample();
  const TensorValue nabla_lg = values(h_covariant_derivative(geo, lie_derivative(geo.g(), v, s)));
  const TensorValue lie_ng = values(lie_derivative(h_covariant_derivative(geo, geo.g()), v, s));
  const TensorValue lF = values(lie_derivative_connection(geo, v));
  const TensorValue lN = values(lie_derivative_nonlinear_connection(geo, v));
  const TensorValue g = values(geo.g());
  const TensorValue C = values(geo.C());

  InterchangeResult r;
  r.residual = TensorValue(n, {lower("i"), lower("j"), lower("k")});
  r.vertical_term = TensorValue(n, {lower("i"), lower("j"), lower("k")});
  double scale = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double d = nabla_lg(i, j, k) - lie_ng(i, j, k);
        double vert = 0.0;
        for (int a = 0; a < n; ++a) {
          d -= g(a, j) * lF(i, a, k) + g(a, i) * lF(j, a, k);
          vert += 2.0 * C(i, j, a) * lN(a, k);
        }
        scale = std::max(scale, std::abs(nabla_lg(i, j, k)));
        r.vertical_term(i, j, k) = vert;
        r.residual(i, j, k) = d - vert;
        r.max_residual_without_vertical = std::max(r.max_residual_without_vertical, std::abs(d));
      }
  r.max_residual = max_abs(r.residual) / scale;
  r.max_residual_without_vertical /= scale;
  return r;
}

InterchangeResult interchange_residual(const FinslerStructure& f, const VectorFieldOnM& v,
                                       const TangentSample& s) {
  return interchange_residual(LocalGeometry::compute(f, s, 4), v);
}

// ---------------------------------------------------------------------------

namespace {

TangentSample point(const Eigen::VectorXd& z) {
  const int n = static_cast<int>(z.size()) / 2;
  TangentSample s;
  s.x.assign(z.data(), z.data() + n);
  s.y.assign(z.data() + n, z.data() + 2 * n);
  return s;
}

Eigen::VectorXd coords(const TangentSample& s) {
  const int n = s.dimension();
  Eigen::VectorXd z(2 * n);
  for (int i = 0; i < n; ++i) {
    z(i) = s.x[i];
    z(n + i) = s.y[i];
  }
  return z;
}

// (W u)(z) for the vector-valued u.
Eigen::VectorXd directional(const TMVectorField& w, const TMVectorField& u, const Eigen::VectorXd& z,
                            double h) {
  const Eigen::VectorXd dir = w(point(z));
  return (u(point(z + h * dir)) - u(point(z - h * dir))) / (2.0 * h);
}

double directional_scalar(const TMVectorField& w, const std::function<double(const TangentSample&)>& f,
                          const Eigen::VectorXd& z, double h) {
  const Eigen::VectorXd dir = w(point(z));
  return (f(point(z + h * dir)) - f(point(z - h * dir))) / (2.0 * h);
}

Eigen::MatrixXd inverse_coframe(const TensorValue& N) {
  const int n = N.dim();
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  for (int h = 0; h < n; ++h)
    for (int m = 0; m < n; ++m) e(n + h, m) = -N(h, m);
  return e;
}

double rel_diff(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

// Compares two bilinear forms on a fixed set of random tangent vectors.
double bilinear_diff(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> normal;
  const int dim = static_cast<int>(want.rows());
  const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
  double worst = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    Eigen::VectorXd a(dim), b(dim);
    for (int i = 0; i < dim; ++i) {
      a(i) = normal(rng);
      b(i) = normal(rng);
    }
    a.normalize();
    b.normalize();
    worst = std::max(worst, std::abs(a.dot((got - want) * b)));
  }
  return worst / scale;
}

}  // namespace

TMVectorField complete_lift_field(const VectorFieldOnM& v) {
  return [v](const TangentSample& s) {
    const int n = s.dimension();
    const auto j = v.jets(s, 1);
    Eigen::VectorXd out(2 * n);
    for (int b = 0; b < n; ++b) {
      out(b) = j[b].value();
      double acc = 0.0;
      for (int a = 0; a < n; ++a) acc += extract_partial(j[b], {x_var(a)}) * s.y[a];
      out(n + b) = acc;
    }
    return out;
  };
}

TMVectorField delta_field(const FinslerStructure& f, int i) {
  return [&f, i](const TangentSample& s) {
    const int n = s.dimension();
    const TensorValue N = nonlinear_connection(f, s);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * n);
    out(i) = 1.0;
    for (int h = 0; h < n; ++h) out(n + h) = -N(h, i);
    return out;
  };
}

TMVectorField vertical_field(int n, int i) {
  return [n, i](const TangentSample&) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * n);
    out(n + i) = 1.0;
    return out;
  };
}

Eigen::VectorXd fd_bracket(const TMVectorField& a, const TMVectorField& b, const TangentSample& s,
                           double h) {
  const Eigen::VectorXd z = coords(s);
  return directional(a, b, z, h) - directional(b, a, z, h);
}

double fd_bracket_apply(const TMVectorField& a, const TMVectorField& b,
                        const std::function<double(const TangentSample&)>& f,
                        const TangentSample& s, double h) {
  const Eigen::VectorXd z = coords(s);
  auto bf = [&](const TangentSample& p) { return directional_scalar(b, f, coords(p), h); };
  auto af = [&](const TangentSample& p) { return directional_scalar(a, f, coords(p), h); };
  return directional_scalar(a, bf, z, h) - directional_scalar(b, af, z, h);
}

Eigen::VectorXd to_adapted_vector(const Eigen::VectorXd& coord, const TensorValue& N) {
  const int n = N.dim();
  Eigen::VectorXd out = coord;
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) out(n + b) += N(b, a) * coord(a);
  return out;
}

Eigen::MatrixXd coframe_matrix(const TensorValue& N) {
  const int n = N.dim();
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  for (int h = 0; h < n; ++h)
    for (int m = 0; m < n; ++m) e(n + h, m) = N(h, m);
  return e;
}

namespace {

// Extended point transformation z -> (x + t v, y + t (dv) y) and its Jacobian.
struct EulerStep {
  TangentSample image;
  Eigen::MatrixXd jacobian;
};

EulerStep euler_step(const FieldDerivatives& d, const TangentSample& s, double t) {
  const int n = s.dimension();
  EulerStep out{s, Eigen::MatrixXd::Identity(2 * n, 2 * n)};
  for (int b = 0; b < n; ++b) {
    out.image.x[b] += t * d.v[b];
    for (int a = 0; a < n; ++a) out.image.y[b] += t * d.dv(b, a) * s.y[a];
  }
  out.jacobian.topLeftCorner(n, n) += t * d.dv;
  out.jacobian.bottomRightCorner(n, n) += t * d.dv;
  for (int b = 0; b < n; ++b)
    for (int m = 0; m < n; ++m) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += d.d2v[b](m, j) * s.y[j];
      out.jacobian(n + b, m) = t * acc;
    }
  return out;
}

}  // namespace

Eigen::MatrixXd flow_lie_derivative(const VectorFieldOnM& v, const TangentSample& s,
                                    const std::function<Eigen::MatrixXd(const TangentSample&)>& field,
                                    double t) {
  const auto d = field_derivatives(v, s);
  auto pulled = [&](double step) {
    const auto e = euler_step(d, s, step);
    return Eigen::MatrixXd(e.jacobian.transpose() * field(e.image) * e.jacobian);
  };
  return (pulled(t) - pulled(-t)) / (2.0 * t);
}

Eigen::RowVectorXd flow_lie_derivative_form(
    const VectorFieldOnM& v, const TangentSample& s,
    const std::function<Eigen::RowVectorXd(const TangentSample&)>& field, double t) {
  const auto d = field_derivatives(v, s);
  auto pulled = [&](double step) {
    const auto e = euler_step(d, s, step);
    return Eigen::RowVectorXd(field(e.image) * e.jacobian);
  };
  return (pulled(t) - pulled(-t)) / (2.0 * t);
}

double BracketReport::max() const {
  return std::max({horizontal_horizontal, horizontal_vertical, vertical_vertical, scalar_test});
}

BracketReport bracket_check(const FinslerStructure& f, const TangentSample& s, double h) {
  const int n = f.dimension();
  const auto geo = LocalGeometry::compute(f, s, 4);
  const TensorValue N = values(geo.N());
  const CurvatureValue curv = hh_curvature(geo);
  BracketReport r;

  auto test_fn = [n](const TangentSample& p) {
    double sx = 0.0, sy2 = 0.0;
    for (int i = 0; i < n; ++i) {
      sx += p.x[i];
      sy2 += p.y[i] * p.y[i];
    }
    return std::sin(sx + 0.5 * p.y[0]) + 0.3 * sy2 * p.x[0] + std::exp(0.2 * p.y[n - 1]);
  };
  // d f / d y^h at s, by central differences.
  std::vector<double> df_dy(n);
  for (int k = 0; k < n; ++k) {
    TangentSample p = s, m = s;
    p.y[k] += h;
    m.y[k] -= h;
    df_dy[k] = (test_fn(p) - test_fn(m)) / (2.0 * h);
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto di = delta_field(f, i);
      const auto dj = delta_field(f, j);
      const auto vj = vertical_field(n, j);
      const auto vi = vertical_field(n, i);

      Eigen::VectorXd want = Eigen::VectorXd::Zero(2 * n);
      for (int k = 0; k < n; ++k) want(n + k) = curv.Rh(k, i, j);
      r.horizontal_horizontal =
          std::max(r.horizontal_horizontal, rel_diff(to_adapted_vector(fd_bracket(di, dj, s, h), N), want));

      double want_f = 0.0;
      for (int k = 0; k < n; ++k) want_f += curv.Rh(k, i, j) * df_dy[k];
      const double got_f = fd_bracket_apply(di, dj, test_fn, s, 1e-3);
      r.scalar_test = std::max(r.scalar_test, std::abs(got_f - want_f) / std::max(1.0, std::abs(want_f)));

      want.setZero();
      for (int k = 0; k < n; ++k) want(n + k) = extract_partial(geo.N()(k, i), {y_var(j, n)});
      r.horizontal_vertical =
          std::max(r.horizontal_vertical, rel_diff(to_adapted_vector(fd_bracket(di, vj, s, h), N), want));

      r.vertical_vertical =
          std::max(r.vertical_vertical, fd_bracket(vi, vj, s, h).cwiseAbs().maxCoeff());
    }
  return r;
}

double LieFrameReport::max() const {
  return std::max({lie_delta, lie_vertical, lie_dx, lie_delta_y, forms[0], forms[1], forms[2],
                   lift_flow});
}

LieFrameReport lemma_32_33_check(const FinslerStructure& f, const VectorFieldOnM& v,
                                 const TangentSample& s, const LiftCoefficients& c, double h) {
  const int n = f.dimension();
  const auto geo = LocalGeometry::compute(f, s, 4);
  const TensorValue N = values(geo.N());
  const LieInputs in = lie_inputs(geo, v);
  const auto d = field_derivatives(v, s);
  const Eigen::MatrixXd e_inv = inverse_coframe(N);
  const auto xc = complete_lift_field(v);
  LieFrameReport r;

  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd want(2 * n);
    for (int k = 0; k < n; ++k) {
      want(k) = -d.dv(k, i);
      want(n + k) = -in.lie_N(k, i);
    }
    r.lie_delta = std::max(
        r.lie_delta, rel_diff(to_adapted_vector(fd_bracket(xc, delta_field(f, i), s, h), N), want));

    want.setZero();
    for (int k = 0; k < n; ++k) want(n + k) = -d.dv(k, i);
    r.lie_vertical = std::max(
        r.lie_vertical, rel_diff(to_adapted_vector(fd_bracket(xc, vertical_field(n, i), s, h), N), want));
  }

  for (int k = 0; k < n; ++k) {
    auto dx = [n, k](const TangentSample&) {
      Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(2 * n);
      w(k) = 1.0;
      return w;
    };
    auto dy = [&f, n, k](const TangentSample& p) {
      const TensorValue Np = nonlinear_connection(f, p);
      Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(2 * n);
      for (int m = 0; m < n; ++m) w(m) = Np(k, m);
      w(n + k) = 1.0;
      return w;
    };
    Eigen::RowVectorXd want = Eigen::RowVectorXd::Zero(2 * n);
    for (int m = 0; m < n; ++m) want(m) = d.dv(k, m);
    r.lie_dx = std::max(r.lie_dx, rel_diff(flow_lie_derivative_form(v, s, dx, h) * e_inv, want));

    for (int m = 0; m < n; ++m) {
      want(m) = in.lie_N(k, m);
      want(n + m) = d.dv(k, m);
    }
    r.lie_delta_y = std::max(r.lie_delta_y, rel_diff(flow_lie_derivative_form(v, s, dy, h) * e_inv, want));
  }

  // The three lift forms, and the full lift metric, as coordinate fields.
  auto adapted_field = [&f, n](const std::function<Eigen::MatrixXd(const TensorValue&)>& block) {
    return [&f, n, block](const TangentSample& p) {
      const auto g = LocalGeometry::compute(f, p, 3);
      const Eigen::MatrixXd e = coframe_matrix(values(g.N()));
      return Eigen::MatrixXd(e.transpose() * block(values(g.g())) * e);
    };
  };
  const auto forms = lift_lie_forms(in);
  for (int k = 0; k < 3; ++k) {
    auto block = [k, n](const TensorValue& g) {
      const Eigen::MatrixXd m = to_matrix(g);
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2 * n, 2 * n);
      if (k == 0) b.topLeftCorner(n, n) = m;
      if (k == 1) {
        b.topRightCorner(n, n) = m;
        b.bottomLeftCorner(n, n) = m;
      }
      if (k == 2) b.bottomRightCorner(n, n) = m;
      return b;
    };
    const Eigen::MatrixXd fd = e_inv.transpose() * flow_lie_derivative(v, s, adapted_field(block), h) * e_inv;
    r.forms[k] = bilinear_diff(fd, forms[k]);
  }
  auto lift_block = [c](const TensorValue& g) { return build_lift_metric(g, c).matrix; };
  const Eigen::MatrixXd fd = e_inv.transpose() * flow_lie_derivative(v, s, adapted_field(lift_block), h) * e_inv;
  r.lift_flow = bilinear_diff(fd, lift_lie_blocks(in, c));
  return r;
}

}  // namespace finsler
