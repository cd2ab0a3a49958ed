#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace finsler;

namespace {

double max_matrix_diff(const TensorValue& t, const Eigen::MatrixXd& m) {
  double d = 0.0;
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) d = std::max(d, std::abs(t(i, j) - m(i, j)));
  return d;
}

// A (1,2) test field T^h_ik(x, y), smooth and y-dependent.
template <class S>
S test_field(std::span<const S> x, std::span<const S> y, int h, int i, int k) {
  using std::cos;
  using std::sin;
  const S q = y[0] * y[0] + y[1] * y[1] + 1.0;
  return sin(x[h] + 0.5 * x[i] + 0.1 * (k + 1)) * y[k] + cos(x[k] - 0.3 * h) * y[h] * y[i] / q;
}

JetTensor test_field_jets(const TangentSample& s, int order) {
  const auto vars = seed_sample(s, order);
  const std::span<const Jet> all(vars);
  JetTensor t(2, {upper("h"), lower("i"), lower("k")});
  for (int h = 0; h < 2; ++h)
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) t(h, i, k) = test_field<Jet>(all.first(2), all.subspan(2), h, i, k);
  return t;
}

double test_field_value(const oracle::Vec& z, int h, int i, int k) {
  const std::span<const double> all(z);
  return test_field<double>(all.first(2), all.subspan(2), h, i, k);
}

const TangentSample kPolarSample = TangentSample::make({2, 0}, {1, 1});

}  // namespace

TEST_CASE("fundamental tensor examples") {
  for (const auto& y : {std::vector<double>{3, 4}, std::vector<double>{-1, 0.2}}) {
    const auto g = fundamental_tensor(fixture::euclidean(), TangentSample::make({0.5, 1}, y));
    CHECK(max_matrix_diff(g, Eigen::Matrix2d::Identity()) <= 1e-14);
  }
  const auto f = fixture::polar();
  for (const auto& y : {std::vector<double>{1, 1}, std::vector<double>{-2, 0.5}}) {
    const auto g = fundamental_tensor(f, TangentSample::make({2, 0}, y));
    CHECK(max_matrix_diff(g, Eigen::Vector2d(1, 4).asDiagonal().toDenseMatrix()) <= 1e-12);
  }
  const auto s = TangentSample::make({0, 0}, {1, 0});
  const auto r = fixture::randers_constant();
  CHECK(max_matrix_diff(fundamental_tensor(r, s), oracle::fd_metric(r, s)) <= 1e-6);
}

TEST_CASE("Cartan tensor examples") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    const auto s = fixture::random_sample(fixture::curved_riemannian(), rng);
    CHECK(max_abs(cartan_tensor(fixture::curved_riemannian(), s)) <= 1e-10);
  }
  const auto r = fixture::randers_constant();
  const auto C = cartan_tensor(r, TangentSample::make({0, 0}, {1, 1}));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(C(0, i, j) + C(1, i, j)) <= 1e-8);

  // C_111 against half a central difference of g_11 in y1.
  const double h = 1e-4;
  const auto Cs = cartan_tensor(r, TangentSample::make({0, 0}, {1, 0}));
  const double g_plus = fundamental_tensor(r, TangentSample::make({0, 0}, {1 + h, 0}))(0, 0);
  const double g_minus = fundamental_tensor(r, TangentSample::make({0, 0}, {1 - h, 0}))(0, 0);
  CHECK(Cs(0, 0, 0) == doctest::Approx(0.5 * (g_plus - g_minus) / (2 * h)).epsilon(1e-6));
  CHECK(std::abs(Cs(0, 0, 0)) <= 1e-10);  // g_11 is constant along y = (t, 0) for this b
}

TEST_CASE("spray and nonlinear connection examples") {
  const auto e = fixture::euclidean();
  const auto s0 = TangentSample::make({0.1, 0.2}, {3, 4});
  CHECK(max_abs(spray_coefficients(e, s0)) <= 1e-14);
  CHECK(max_abs(nonlinear_connection(e, s0)) <= 1e-14);

  const auto f = fixture::polar();
  const auto G = spray_coefficients(f, kPolarSample);
  CHECK(G(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(G(1) == doctest::Approx(0.5).epsilon(1e-12));
  const auto G_fd = oracle::fd_spray(f, kPolarSample);
  CHECK(std::abs(G(0) - G_fd(0)) <= 1e-6);
  CHECK(std::abs(G(1) - G_fd(1)) <= 1e-6);

  // N^i_j = gamma^i_jk y^k with gamma^1_22 = -x1, gamma^2_12 = gamma^2_21 = 1/x1.
  const auto N = nonlinear_connection(f, kPolarSample);
  CHECK(std::abs(N(0, 0) - 0.0) <= 1e-8);
  CHECK(std::abs(N(0, 1) + 2.0) <= 1e-8);
  CHECK(std::abs(N(1, 0) - 0.5) <= 1e-8);
  CHECK(std::abs(N(1, 1) - 0.5) <= 1e-8);
}

TEST_CASE("spray agrees with the value-only oracle on curved families") {
  std::mt19937_64 rng(17);
  for (const auto& fam : fixture::families()) {
    for (int k = 0; k < 5; ++k) {
      const auto s = fixture::random_sample(fam, rng);
      const auto G = spray_coefficients(fam.f, s);
      const auto G_fd = oracle::fd_spray(fam.f, s);
      for (int i = 0; i < 2; ++i) CHECK_MESSAGE(std::abs(G(i) - G_fd(i)) <= 1e-6, fam.name);
      CHECK_MESSAGE(max_matrix_diff(fundamental_tensor(fam.f, s), oracle::fd_metric(fam.f, s)) <= 1e-6, fam.name);
    }
  }
}

TEST_CASE("delta derivative examples") {
  const auto e = LocalGeometry::compute(fixture::euclidean(), TangentSample::make({0.2, 0.3}, {1, 2}), 3);
  CHECK(max_abs(values(delta_derivative(e, e.g()))) <= 1e-14);

  std::mt19937_64 rng(8);
  for (const auto& f : {fixture::randers_constant(), fixture::randers_curved(), fixture::quartic()}) {
    for (int k = 0; k < 5; ++k) {
      const auto s = fixture::random_sample(f, rng);
      const auto geo = LocalGeometry::compute(f, s, 3);
      JetTensor F(2, {});
      F.data()[0] = evaluate_F(f, s, 1);
      CHECK(std::abs(values(delta_derivative(geo, F)).data()[0]) <= 1e-8);
    }
  }

  const auto f = fixture::polar();
  const auto geo = LocalGeometry::compute(f, kPolarSample, 3);
  CHECK(values(geo.delta_g())(0, 1, 1) == doctest::Approx(4.0).epsilon(1e-12));
  // FD oracle: d_x1 g_22 - N^m_1 d_ym g_22 from value-only metrics.  F^2 is
  // quadratic in y, so the inner Hessian stencil is exact at the wide step.
  const double h = 1e-4;
  auto g22 = [&](std::vector<double> x, std::vector<double> y) {
    return oracle::fd_metric(f, TangentSample::make(x, y), 1e-2)(1, 1);
  };
  const auto N = nonlinear_connection(f, kPolarSample);
  const double dx = (g22({2 + h, 0}, {1, 1}) - g22({2 - h, 0}, {1, 1})) / (2 * h);
  const double dy0 = (g22({2, 0}, {1 + h, 1}) - g22({2, 0}, {1 - h, 1})) / (2 * h);
  const double dy1 = (g22({2, 0}, {1, 1 + h}) - g22({2, 0}, {1, 1 - h})) / (2 * h);
  CHECK(std::abs(values(geo.delta_g())(0, 1, 1) - (dx - N(0, 0) * dy0 - N(1, 0) * dy1)) <= 1e-6);
  CHECK_THROWS_AS(delta_derivative(geo, truncated(geo.g(), 0)), ArgumentError);
}

TEST_CASE("Cartan connection examples") {
  const auto e = cartan_connection(fixture::euclidean(), TangentSample::make({0, 1}, {2, 1}));
  CHECK(max_abs(e.F) <= 1e-14);
  const auto p = cartan_connection(fixture::polar(), kPolarSample);
  CHECK(p.F(0, 1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.F(1, 1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.F(1, 0, 1) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(std::abs(p.F(0, 0, 0)) <= 1e-12);
  CHECK(std::abs(p.F(0, 1, 0)) <= 1e-12);
  CHECK(std::abs(p.F(1, 1, 1)) <= 1e-12);
}

TEST_CASE("covariant derivatives match a term-by-term FD assembly") {
  std::mt19937_64 rng(23);
  const double h = 1e-4;
  for (const auto& f : {fixture::randers_curved(), fixture::randers_constant()}) {
    for (int trial = 0; trial < 4; ++trial) {
      const auto s = fixture::random_sample(f, rng);
      const auto geo = LocalGeometry::compute(f, s, 4);
      const auto b = bundle_values(geo);
      const TensorValue hT = values(h_covariant_derivative(geo, test_field_jets(s, 1)));
      const TensorValue vT = values(v_covariant_derivative(geo, test_field_jets(s, 1)));
      const oracle::Vec z = oracle::join(s);
      double worst_h = 0.0, worst_v = 0.0;
      for (int hh = 0; hh < 2; ++hh)
        for (int i = 0; i < 2; ++i)
          for (int k = 0; k < 2; ++k) {
            auto T = [&](int a, int bb, int c) { return test_field_value(z, a, bb, c); };
            for (int j = 0; j < 2; ++j) {
              oracle::ScalarFn comp = [&](const oracle::Vec& p) { return test_field_value(p, hh, i, k); };
              double delta = oracle::d1(comp, z, j, h);
              for (int m = 0; m < 2; ++m) delta -= b.N(m, j) * oracle::d1(comp, z, 2 + m, h);
              double vert = oracle::d1(comp, z, 2 + j, h);
              for (int m = 0; m < 2; ++m) {
                delta += b.F(m, hh, j) * T(m, i, k) - b.F(i, m, j) * T(hh, m, k) - b.F(k, m, j) * T(hh, i, m);
                vert += b.C_mixed(m, hh, j) * T(m, i, k) - b.C_mixed(i, m, j) * T(hh, m, k) -
                        b.C_mixed(k, m, j) * T(hh, i, m);
              }
              worst_h = std::max(worst_h, std::abs(hT(hh, i, k, j) - delta));
              worst_v = std::max(worst_v, std::abs(vT(hh, i, k, j) - vert));
            }
          }
      CHECK(worst_h <= 1e-6);
      CHECK(worst_v <= 1e-6);
    }
  }
}

TEST_CASE("covariant derivatives of constants vanish on flat space") {
  const auto geo = LocalGeometry::compute(fixture::euclidean(), TangentSample::make({0.3, -0.2}, {1, 2}), 3);
  const auto vars = seed_sample(geo.sample(), 1);
  JetTensor T(2, {upper("h"), lower("i")});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) T(a, b) = vars[0].constant_like(1.5 * a - b + 0.25);
  CHECK(max_abs(values(h_covariant_derivative(geo, T))) <= 1e-14);
  CHECK(max_abs(values(v_covariant_derivative(geo, T))) <= 1e-14);
}

TEST_CASE("v-covariant derivative is plain vertical differentiation for Riemannian structures") {
  const auto geo = LocalGeometry::compute(fixture::curved_riemannian(), TangentSample::make({0.3, -0.2}, {1, 2}), 3);
  CHECK(max_abs(values(v_covariant_derivative(geo, geo.g()))) <= 1e-12);
  CHECK(max_abs(values(geo.C_mixed())) <= 1e-12);
}

TEST_CASE("connection invariants on every family at 50 random samples") {
  std::mt19937_64 rng(50);
  for (const auto& fam : fixture::families()) {
    double symm = 0, inverse = 0, c_sym = 0, y_c = 0, deflection = 0, h_metric = 0, v_metric = 0;
    double rh_anti = 0, contraction = 0;
    for (int k = 0; k < 50; ++k) {
      const auto s = fixture::random_sample(fam, rng);
      const auto geo = LocalGeometry::compute(fam.f, s, 4);
      const auto b = bundle_values(geo);
      const auto curv = hh_curvature(geo);
      const Eigen::MatrixXd g = to_matrix(b.g), gi = to_matrix(b.g_inv);
      symm = std::max(symm, (g - g.transpose()).cwiseAbs().maxCoeff());
      inverse = std::max(inverse, (g * gi - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff());
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double yc = 0.0;
          for (int m = 0; m < 2; ++m) yc += s.y[m] * b.C(m, i, j);
          y_c = std::max(y_c, std::abs(yc));
          for (int l = 0; l < 2; ++l) {
            c_sym = std::max({c_sym, std::abs(b.C(i, j, l) - b.C(j, i, l)), std::abs(b.C(i, j, l) - b.C(l, j, i))});
            rh_anti = std::max(rh_anti, std::abs(curv.Rh(i, j, l) + curv.Rh(i, l, j)));
            double yr = 0.0;
            for (int m = 0; m < 2; ++m) yr += s.y[m] * curv.R(m, i, j, l);
            contraction = std::max(contraction, std::abs(yr - curv.Rh(i, j, l)));
          }
          double yf = 0.0;
          for (int m = 0; m < 2; ++m) yf += s.y[m] * b.F(m, i, j);
          deflection = std::max(deflection, std::abs(yf - b.N(i, j)));
        }
      h_metric = std::max(h_metric, max_abs(values(h_covariant_derivative(geo, truncated(geo.g(), 1)))));
      v_metric = std::max(v_metric, max_abs(values(v_covariant_derivative(geo, truncated(geo.g(), 1)))));
    }
    INFO(fam.name);
    CHECK(symm <= 1e-12);
    CHECK(inverse <= 1e-10);
    CHECK(c_sym <= 1e-10);
    CHECK(y_c <= 1e-8);
    CHECK(deflection <= 1e-8);
    CHECK(h_metric <= 1e-8);
    CHECK(v_metric <= 1e-8);
    CHECK(rh_anti <= 1e-10);
    CHECK(contraction <= 1e-6);
  }
}

TEST_CASE("hh-curvature examples") {
  const auto e = hh_curvature(LocalGeometry::compute(fixture::euclidean(), TangentSample::make({0, 0}, {1, 2}), 4));
  CHECK(max_abs(e.R) <= 1e-14);
  CHECK(max_abs(e.Rh) <= 1e-14);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 10; ++k) {
    const auto s = fixture::random_sample(fixture::polar(), rng, true);
    const auto c = hh_curvature(LocalGeometry::compute(fixture::polar(), s, 4));
    CHECK(max_abs(c.R) <= 1e-6);
    CHECK(max_abs(c.Rh) <= 1e-6);
  }
  // A curved metric has nonzero curvature, so the flat checks above are not vacuous.
  const auto c = hh_curvature(LocalGeometry::compute(fixture::curved_riemannian(), TangentSample::make({0.5, 0.5}, {1, 1}), 4));
  CHECK(max_abs(c.R) > 1e-3);
  CHECK_THROWS_AS(hh_curvature(LocalGeometry::compute(fixture::euclidean(), TangentSample::make({0, 0}, {1, 2}), 3)),
                  ArgumentError);
}

TEST_CASE("jet and finite-difference tensors agree") {
  std::mt19937_64 rng(77);
  for (const auto& fam : fixture::families()) {
    for (int k = 0; k < 3; ++k) {
      const auto s = fixture::random_sample(fam, rng);
      const auto jet = tensors_jet(fam.f, s);
      const auto fd = tensors_fd(fam.f, s);
      const auto a = tensor_entries(jet), b = tensor_entries(fd);
      REQUIRE(a.size() == b.size());
      for (std::size_t t = 0; t < a.size(); ++t) {
        INFO(fam.name << " " << a[t].first);
        CHECK(max_abs_diff(*a[t].second, *b[t].second) <= 1e-5);
      }
    }
  }
}

TEST_CASE("singular fundamental tensor raises a linear-algebra error with the sample") {
  const auto f = FinslerStructure::expression("y1", 2);
  const auto s = TangentSample::make({0.5, 0.5}, {1, 1});
  try {
    cartan_connection(f, s);
    FAIL("expected a linear-algebra error");
  } catch (const LinearAlgebraError& e) {
    CHECK(std::string(e.what()).find(s.describe()) != std::string::npos);
  }
  CHECK_THROWS_AS(spray_coefficients(f, s), LinearAlgebraError);
}

TEST_CASE("tensor containers") {
  TensorValue t(3, {upper("h"), lower("i")});
  CHECK(t.size() == 9);
  t(2, 1) = 4.0;
  CHECK(t.data()[7] == 4.0);
  CHECK_THROWS_AS(t(1), ArgumentError);
  CHECK_THROWS_AS(TensorValue(0, {lower("i")}), ArgumentError);
  TensorValue u(3, {upper("h"), lower("i")});
  CHECK(max_abs_diff(t, u) == 4.0);
  TensorValue w(2, {upper("h"), lower("i")});
  CHECK_THROWS_AS(max_abs_diff(t, w), ArgumentError);
  int count = 0;
  for_each_index(3, 2, [&](std::span<const int>) { ++count; });
  CHECK(count == 8);
}
