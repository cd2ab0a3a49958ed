// Finite-difference evaluation of the tensor pipeline.  Each derivative layer
// is a central difference of the layer below it; the lower layers come from
// jet evaluation at the shifted points, so every derivative step is checked
// independently of the jet derivative extraction.

#include <functional>

#include "finsler/geometry.hpp"

namespace finsler {

namespace {

TangentSample shifted(const TangentSample& s, int var, double h) {
  TangentSample t = s;
  const int n = s.dimension();
  if (var < n)
    t.x[var] += h;
  else
    t.y[var - n] += h;
  return t;
}

// Central difference of a tensor-valued function along jet variable `var`.
TensorValue central(const std::function<TensorValue(const TangentSample&)>& fn,
                    const TangentSample& s, int var, double h) {
  TensorValue plus = fn(shifted(s, var, h));
  const TensorValue minus = fn(shifted(s, var, -h));
  for (std::size_t e = 0; e < plus.size(); ++e)
    plus.data()[e] = (plus.data()[e] - minus.data()[e]) / (2.0 * h);
  return plus;
}

}  // namespace

TensorSet tensors_fd(const FinslerStructure& f, const TangentSample& s, double h) {
  const int n = f.dimension();
  TensorSet out;

  auto F2 = [&](const TangentSample& p) { return f.F2(p); };
  auto second = [&](int a, int b) {
    const auto pp = shifted(shifted(s, a, h), b, h);
    const auto pm = shifted(shifted(s, a, h), b, -h);
    const auto mp = shifted(shifted(s, a, -h), b, h);
    const auto mm = shifted(shifted(s, a, -h), b, -h);
    return (F2(pp) - F2(pm) - F2(mp) + F2(mm)) / (4.0 * h * h);
  };

  out.g = TensorValue(n, {lower("i"), lower("j")});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.g(i, j) = 0.5 * second(y_var(i, n), y_var(j, n));

  // g_inv by Gauss-Jordan on order-0 jets.
  {
    std::vector<Jet> m;
    for (double v : out.g.data()) m.push_back(Jet::constant(v, 1, 0));
    const auto inv = invert(m, n);
    out.g_inv = TensorValue(n, {upper("i"), upper("j")});
    for (std::size_t e = 0; e < inv.size(); ++e) out.g_inv.data()[e] = inv[e].value();
  }

  auto g_jet = [&](const TangentSample& p) { return fundamental_tensor(f, p); };
  out.C = TensorValue(n, {lower("i"), lower("j"), lower("k")});
  for (int k = 0; k < n; ++k) {
    const TensorValue dg = central(g_jet, s, y_var(k, n), h);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.C(i, j, k) = 0.5 * dg(i, j);
  }

  out.spray = TensorValue(n, {upper("i")});
  {
    std::vector<double> w(n);
    for (int l = 0; l < n; ++l) {
      const double dl = (F2(shifted(s, x_var(l), h)) - F2(shifted(s, x_var(l), -h))) / (2.0 * h);
      double acc = -dl;
      for (int k = 0; k < n; ++k) acc += s.y[k] * second(y_var(l, n), x_var(k));
      w[l] = acc;
    }
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) out.spray(i) += 0.25 * out.g_inv(i, l) * w[l];
  }

  auto spray_jet = [&](const TangentSample& p) { return spray_coefficients(f, p); };
  out.N = TensorValue(n, {upper("i"), lower("j")});
  for (int j = 0; j < n; ++j) {
    const TensorValue dG = central(spray_jet, s, y_var(j, n), h);
    for (int i = 0; i < n; ++i) out.N(i, j) = dG(i);
  }

  const auto geo = LocalGeometry::compute(f, s, 4);
  const TensorValue N = values(geo.N());
  const TensorValue g_inv = values(geo.g_inv());
  const TensorValue Cm = values(geo.C_mixed());
  const TensorValue Fj = values(geo.F());

  // delta_k T = d_k T - N^m_k dot-d_m T, by central differences of T.
  auto delta_fd = [&](const std::function<TensorValue(const TangentSample&)>& fn) {
    std::vector<TensorValue> dx, dy;
    for (int k = 0; k < n; ++k) {
      dx.push_back(central(fn, s, x_var(k), h));
      dy.push_back(central(fn, s, y_var(k, n), h));
    }
    std::vector<TensorValue> out_k;
    for (int k = 0; k < n; ++k) {
      TensorValue d = dx[k];
      for (int m = 0; m < n; ++m)
        for (std::size_t e = 0; e < d.size(); ++e) d.data()[e] -= N(m, k) * dy[m].data()[e];
      out_k.push_back(std::move(d));
    }
    return out_k;
  };

  const auto dg = delta_fd(g_jet);
  out.F = TensorValue(n, {lower("i"), upper("h"), lower("j")});
  for (int i = 0; i < n; ++i)
    for (int hh = 0; hh < n; ++hh)
      for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m)
          out.F(i, hh, j) += 0.5 * g_inv(hh, m) * (dg[i](m, j) + dg[j](i, m) - dg[m](i, j));

  auto n_jet = [&](const TangentSample& p) { return nonlinear_connection(f, p); };
  const auto dN = delta_fd(n_jet);
  out.Rh = TensorValue(n, {upper("h"), lower("i"), lower("j")});
  for (int hh = 0; hh < n; ++hh)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.Rh(hh, i, j) = dN[j](hh, i) - dN[i](hh, j);

  auto f_jet = [&](const TangentSample& p) { return cartan_connection(f, p).F; };
  const auto dF = delta_fd(f_jet);
  out.R = TensorValue(n, {lower("k"), upper("h"), lower("j"), lower("i")});
  for (int k = 0; k < n; ++k)
    for (int hh = 0; hh < n; ++hh)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          double r = dF[i](k, hh, j) - dF[j](k, hh, i);
          for (int m = 0; m < n; ++m) {
            r += Fj(k, m, j) * Fj(m, hh, i) - Fj(k, m, i) * Fj(m, hh, j);
            r += Cm(k, hh, m) * out.Rh(m, j, i);
          }
          out.R(k, hh, j, i) = r;
        }
  return out;
}

}  // namespace finsler
