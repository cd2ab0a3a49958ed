#include "finsler/geometry.hpp"

#include <cmath>

namespace finsler {

namespace {

template <class Fn>
auto at_sample(const TangentSample& s, Fn&& fn) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw DomainError(std::string(e.what()) + " at " + s.describe());
  } catch (const LinearAlgebraError& e) {
    throw LinearAlgebraError(std::string("fundamental tensor is not invertible (") + e.what() +
                             ") at " + s.describe());
  }
}

JetTensor zeros_like(int n, std::vector<IndexSlot> sig, const Jet& proto) {
  return JetTensor(n, std::move(sig), proto.constant_like(0.0));
}

}  // namespace

Jet LocalGeometry::y(int i, int order) const {
  return Jet::variable(sample_.y[i], y_var(i, n_), 2 * n_, order);
}

Jet LocalGeometry::x(int i, int order) const {
  return Jet::variable(sample_.x[i], x_var(i), 2 * n_, order);
}

LocalGeometry LocalGeometry::compute(const FinslerStructure& f, const TangentSample& s, int order) {
  if (order < 3 || order > 4) throw ArgumentError("geometry jet order must be 3 or 4");
  if (s.dimension() != f.dimension()) throw ArgumentError("sample dimension does not match structure");
  return at_sample(s, [&] {
    LocalGeometry geo;
    const int n = f.dimension();
    geo.sample_ = s;
    geo.n_ = n;
    geo.order_ = order;
    geo.f2_ = evaluate_F2(f, s, order);

    const int og = order - 2;  // g, g_inv, spray
    const int oc = order - 3;  // C, N, delta g, F

    std::vector<Jet> dy(n);
    for (int i = 0; i < n; ++i) dy[i] = geo.f2_.derivative(y_var(i, n));

    geo.g_ = JetTensor(n, {lower("i"), lower("j")});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) geo.g_(i, j) = 0.5 * dy[i].derivative(y_var(j, n));

    auto inv = invert(geo.g_.data(), n);
    geo.g_inv_ = JetTensor(n, {upper("i"), upper("j")});
    geo.g_inv_.data() = std::move(inv);

    geo.c_ = JetTensor(n, {lower("i"), lower("j"), lower("k")});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) geo.c_(i, j, k) = 0.5 * geo.g_(i, j).derivative(y_var(k, n));

    const JetTensor ginv_c = truncated(geo.g_inv_, oc);
    geo.c_mixed_ = zeros_like(n, {lower("i"), upper("h"), lower("j")}, geo.c_(0, 0, 0));
    for (int i = 0; i < n; ++i)
      for (int h = 0; h < n; ++h)
        for (int j = 0; j < n; ++j)
          for (int m = 0; m < n; ++m) geo.c_mixed_(i, h, j) += ginv_c(h, m) * geo.c_(i, m, j);

    // Spray: G^i = 1/4 g^il (y^k d_k dy_l F^2 - d_l F^2).
    std::vector<Jet> w(n);
    for (int l = 0; l < n; ++l) {
      Jet acc = geo.f2_.derivative(x_var(l)).truncated(og) * -1.0;
      for (int k = 0; k < n; ++k) acc += geo.y(k, og) * dy[l].derivative(x_var(k));
      w[l] = acc;
    }
    geo.spray_ = zeros_like(n, {upper("i")}, w[0]);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) geo.spray_(i) += 0.25 * geo.g_inv_(i, l) * w[l];

    geo.n_conn_ = JetTensor(n, {upper("i"), lower("j")});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) geo.n_conn_(i, j) = geo.spray_(i).derivative(y_var(j, n));

    geo.delta_g_ = delta_derivative(geo, geo.g_);

    geo.f_conn_ = zeros_like(n, {lower("i"), upper("h"), lower("j")}, geo.delta_g_(0, 0, 0));
    const JetTensor& dg = geo.delta_g_;  // dg(k, i, j) = delta_k g_ij
    for (int i = 0; i < n; ++i)
      for (int h = 0; h < n; ++h)
        for (int j = 0; j < n; ++j)
          for (int m = 0; m < n; ++m)
            geo.f_conn_(i, h, j) +=
                0.5 * ginv_c(h, m) * (dg(i, m, j) + dg(j, i, m) - dg(m, i, j));
    (void)oc;
    return geo;
  });
}

JetTensor delta_derivative(const LocalGeometry& geo, const JetTensor& f) {
  const int n = geo.dimension();
  const int out_order = jet_order(f) - 1;
  if (out_order < 0) throw ArgumentError("delta_derivative needs a jet of order >= 1");
  if (out_order > jet_order(geo.N()))
    throw ArgumentError("geometry jet order too low for this delta derivative");
  const JetTensor N = truncated(geo.N(), out_order);

  std::vector<IndexSlot> sig{lower("k", Block::horizontal)};
  sig.insert(sig.end(), f.signature().begin(), f.signature().end());
  JetTensor out(n, std::move(sig));
  const std::size_t inner = f.size();
  for (int k = 0; k < n; ++k) {
    for (std::size_t e = 0; e < inner; ++e) {
      const Jet& fe = f.data()[e];
      Jet acc = fe.derivative(x_var(k)).truncated(out_order);
      for (int m = 0; m < n; ++m) acc -= N(m, k) * fe.derivative(y_var(m, n)).truncated(out_order);
      out.data()[k * inner + e] = std::move(acc);
    }
  }
  return out;
}

namespace {

// Shared body of the two covariant derivatives: `base(j, e)` is the partial
// part for derivative index j at flat entry e; `coeff` is F_i^h_j or C_i^h_j.
template <class Base>
JetTensor covariant(const LocalGeometry& geo, const JetTensor& t, const JetTensor& coeff_full,
                    Block block, Base&& base) {
  const int n = geo.dimension();
  const int rank = t.rank();
  const int out_order = jet_order(t) - 1;
  if (out_order < 0) throw ArgumentError("covariant derivative needs a jet of order >= 1");
  if (out_order > jet_order(coeff_full))
    throw ArgumentError("geometry jet order too low for this covariant derivative");
  const JetTensor coeff = truncated(coeff_full, out_order);
  const JetTensor tv = truncated(t, out_order);

  std::vector<IndexSlot> sig = t.signature();
  sig.push_back(lower("j", block));
  JetTensor out(n, std::move(sig));

  std::vector<int> idx(rank + 1), moved(rank);
  for_each_index(rank + 1, n, [&](std::span<const int> full) {
    const int j = full[rank];
    std::copy(full.begin(), full.begin() + rank, idx.begin());
    std::span<const int> tidx(idx.data(), rank);
    Jet acc = base(j, t.offset(tidx));
    for (int s = 0; s < rank; ++s) {
      std::copy(tidx.begin(), tidx.end(), moved.begin());
      const bool up = t.signature()[s].variance == Variance::upper;
      for (int m = 0; m < n; ++m) {
        moved[s] = m;
        const Jet& tm = tv.at(moved);
        if (up)
          acc += coeff(m, idx[s], j) * tm;
        else
          acc -= coeff(idx[s], m, j) * tm;
      }
    }
    out.at(full) = std::move(acc);
  });
  return out;
}

}  // namespace

JetTensor h_covariant_derivative(const LocalGeometry& geo, const JetTensor& t) {
  const JetTensor d = delta_derivative(geo, t);
  const std::size_t inner = t.size();
  return covariant(geo, t, geo.F(), Block::horizontal,
                   [&](int j, std::size_t e) { return d.data()[j * inner + e]; });
}

JetTensor v_covariant_derivative(const LocalGeometry& geo, const JetTensor& t) {
  const int n = geo.dimension();
  const int out_order = jet_order(t) - 1;
  return covariant(geo, t, geo.C_mixed(), Block::vertical, [&](int j, std::size_t e) {
    return t.data()[e].derivative(y_var(j, n)).truncated(out_order);
  });
}

CurvatureValue hh_curvature(const LocalGeometry& geo) {
  if (geo.order() < 4) throw ArgumentError("curvature needs a geometry of jet order 4");
  const int n = geo.dimension();
  const JetTensor dN = delta_derivative(geo, geo.N());  // dN(k, h, i) = delta_k N^h_i
  const JetTensor dF = delta_derivative(geo, geo.F());  // dF(l, k, h, j) = delta_l F_k^h_j
  const TensorValue F = values(geo.F());
  const TensorValue Cm = values(geo.C_mixed());

  CurvatureValue out;
  out.Rh = TensorValue(n, {upper("h"), lower("i"), lower("j")});
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.Rh(h, i, j) = dN(j, h, i).value() - dN(i, h, j).value();

  out.R = TensorValue(n, {lower("k"), upper("h"), lower("j"), lower("i")});
  for (int k = 0; k < n; ++k)
    for (int h = 0; h < n; ++h)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          double r = dF(i, k, h, j).value() - dF(j, k, h, i).value();
          for (int m = 0; m < n; ++m) {
            r += F(k, m, j) * F(m, h, i) - F(k, m, i) * F(m, h, j);
            r += Cm(k, h, m) * out.Rh(m, j, i);
          }
          out.R(k, h, j, i) = r;
        }
  return out;
}

TensorValue fundamental_tensor(const FinslerStructure& f, const TangentSample& s) {
  const int n = f.dimension();
  const Jet f2 = evaluate_F2(f, s, 2);
  TensorValue g(n, {lower("i"), lower("j")});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = 0.5 * extract_partial(f2, {y_var(i, n), y_var(j, n)});
  return g;
}

TensorValue cartan_tensor(const FinslerStructure& f, const TangentSample& s) {
  return values(LocalGeometry::compute(f, s, 3).C());
}

TensorValue spray_coefficients(const FinslerStructure& f, const TangentSample& s) {
  return values(LocalGeometry::compute(f, s, 3).spray());
}

TensorValue nonlinear_connection(const FinslerStructure& f, const TangentSample& s) {
  return values(LocalGeometry::compute(f, s, 3).N());
}

ConnectionBundle bundle_values(const LocalGeometry& geo) {
  return {values(geo.g()),       values(geo.g_inv()), values(geo.C()), values(geo.C_mixed()),
          values(geo.spray()),   values(geo.N()),     values(geo.F()), geo.sample()};
}

ConnectionBundle cartan_connection(const FinslerStructure& f, const TangentSample& s) {
  return bundle_values(LocalGeometry::compute(f, s, 3));
}

TensorSet tensors_jet(const FinslerStructure& f, const TangentSample& s) {
  const auto geo = LocalGeometry::compute(f, s, 4);
  const auto curv = hh_curvature(geo);
  return {values(geo.g()), values(geo.g_inv()), values(geo.C()), values(geo.spray()),
          values(geo.N()), values(geo.F()),     curv.Rh,         curv.R};
}

std::vector<std::pair<std::string, const TensorValue*>> tensor_entries(const TensorSet& t) {
  return {{"g", &t.g},         {"g_inv", &t.g_inv}, {"C", &t.C},   {"spray", &t.spray},
          {"N", &t.N},         {"F", &t.F},         {"R_h", &t.Rh}, {"R", &t.R}};
}

}  // namespace finsler
