#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "finsler/conformal.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace finsler;
using fixture::field;

namespace {

const VectorFieldOnM kTranslation = field({"1", "0"}, "translation");
const VectorFieldOnM kRotation = field({"-x2", "x1"}, "rotation");
const VectorFieldOnM kDilation = field({"x1", "x2"}, "dilation");
const VectorFieldOnM kQuadratic = field({"x1^2", "0"}, "quadratic");
const VectorFieldOnM kCurly = field({"0.3*x1*x2 + sin(x2)", "x1^2 - 0.5*x2"}, "curly");

JetTensor fiber_coordinates(const TangentSample& s) {
  const auto vars = seed_sample(s, 2);
  JetTensor y(s.dimension(), {upper("i")});
  for (int i = 0; i < s.dimension(); ++i) y(i) = vars[y_var(i, s.dimension())];
  return y;
}

// -(vertical adapted component of [X^c, delta_i]) from coordinate brackets.
TensorValue bracket_lie_n(const FinslerStructure& f, const VectorFieldOnM& v, const TangentSample& s) {
  const int n = s.dimension();
  const auto N = nonlinear_connection(f, s);
  TensorValue out(n, {upper("h"), lower("i")});
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd c = oracle::bracket(oracle::complete_lift(v), oracle::delta(f, i), oracle::join(s));
    const Eigen::VectorXd a = oracle::adapted(c, N);
    for (int h = 0; h < n; ++h) out(h, i) = -a(n + h);
  }
  return out;
}

// F_i^h_j by the tensor pattern plus d_i d_j v^h, every derivative by central
// differences of connection values at neighbouring points.
TensorValue fd_lie_connection(const FinslerStructure& f, const VectorFieldOnM& v, const TangentSample& s) {
  const int n = s.dimension();
  const double h = 1e-4;
  const oracle::Vec z = oracle::join(s);
  auto F_at = [&](const oracle::Vec& p) { return cartan_connection(f, oracle::split(p)).F; };
  const TensorValue F = F_at(z);
  std::vector<TensorValue> dF;  // derivative along each of the 2n coordinates
  for (int a = 0; a < 2 * n; ++a) {
    const TensorValue p = F_at(oracle::shifted(z, a, h)), m = F_at(oracle::shifted(z, a, -h));
    TensorValue d = F;
    for (std::size_t e = 0; e < d.size(); ++e) d.data()[e] = (p.data()[e] - m.data()[e]) / (2 * h);
    dF.push_back(d);
  }
  const auto vx = v.at(s.x);
  Eigen::MatrixXd dv(n, n);
  std::vector<Eigen::MatrixXd> d2v(n, Eigen::MatrixXd(n, n));
  for (int b = 0; b < n; ++b) {
    oracle::ScalarFn vb = [&](const oracle::Vec& p) { return v.at(p)[b]; };
    for (int a = 0; a < n; ++a) {
      dv(b, a) = oracle::d1(vb, s.x, a, 1e-5);
      for (int c = 0; c < n; ++c) d2v[b](a, c) = oracle::d2(vb, s.x, a, c, 1e-4);
    }
  }
  TensorValue out(n, F.signature());
  for (int i = 0; i < n; ++i)
    for (int hh = 0; hh < n; ++hh)
      for (int j = 0; j < n; ++j) {
        double acc = d2v[hh](i, j);
        for (int a = 0; a < n; ++a) {
          acc += vx[a] * dF[a](i, hh, j);
          for (int b = 0; b < n; ++b) acc += s.y[a] * dv(b, a) * dF[n + b](i, hh, j);
          acc += -F(i, a, j) * dv(hh, a) + F(a, hh, j) * dv(a, i) + F(i, hh, a) * dv(a, j);
        }
        out(i, hh, j) = acc;
      }
  return out;
}

// Lie derivative of the lift metric in the adapted coframe by the flow oracle.
Eigen::MatrixXd flow_lift(const FinslerStructure& f, const VectorFieldOnM& v, const TangentSample& s,
                          const LiftCoefficients& c) {
  auto coordinate_field = [&](const TangentSample& p) {
    const auto b = cartan_connection(f, p);
    const Eigen::MatrixXd E = oracle::coframe(b.N);
    return Eigen::MatrixXd(E.transpose() * build_lift_metric(b.g, c).matrix * E);
  };
  const Eigen::MatrixXd Lc = oracle::flow_lie(v, s, coordinate_field);
  const Eigen::MatrixXd Einv = oracle::coframe(nonlinear_connection(f, s)).inverse();
  return Einv.transpose() * Lc * Einv;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("vector fields on the base") {
  CHECK(kQuadratic.at({3, 1}) == std::vector<double>{9, 0});
  CHECK(kRotation.dimension() == 2);
  CHECK_THROWS_AS(field({"y1", "0"}), ArgumentError);
  CHECK_THROWS_AS(VectorFieldOnM::parse({"x1"}, 2), ArgumentError);
  CHECK_THROWS_AS(field({"x1 +", "0"}), ParseError);
}

TEST_CASE("complete lift examples") {
  const auto e = fixture::euclidean();
  std::mt19937_64 rng(1);
  for (int k = 0; k < 5; ++k) {
    const auto s = fixture::random_sample(e, rng);
    const auto t = complete_lift(e, kTranslation, s);
    CHECK(t.horizontal == std::vector<double>{1, 0});
    CHECK(std::abs(t.vertical[0]) + std::abs(t.vertical[1]) <= 1e-14);
  }
  const auto s = TangentSample::make({0.5, -0.25}, {2, 3});
  const auto d = complete_lift(e, kDilation, s);
  CHECK(d.horizontal == std::vector<double>{0.5, -0.25});
  CHECK(d.vertical[0] == doctest::Approx(2.0));
  CHECK(d.vertical[1] == doctest::Approx(3.0));
  const auto r = complete_lift(e, kRotation, TangentSample::make({0.5, -0.25}, {1, 0}));
  CHECK(std::abs(r.vertical[0]) <= 1e-14);
  CHECK(r.vertical[1] == doctest::Approx(1.0));
}

TEST_CASE("complete lift horizontal part is the field value and the vertical part matches the coordinate lift") {
  std::mt19937_64 rng(2);
  for (const auto& fam : fixture::families()) {
    for (int k = 0; k < 3; ++k) {
      const auto s = fixture::random_sample(fam, rng);
      const auto lift = complete_lift(fam.f, kCurly, s);
      CHECK(lift.horizontal == kCurly.at(s.x));
      // Coordinate X^c = (v, (dv) y); adapted vertical = (dv) y + N v.
      const Eigen::VectorXd a = oracle::adapted(oracle::complete_lift(kCurly)(oracle::join(s)),
                                                nonlinear_connection(fam.f, s));
      for (int h = 0; h < 2; ++h) CHECK_MESSAGE(std::abs(lift.vertical[h] - a(2 + h)) <= 1e-8, fam.name);
    }
  }
}

TEST_CASE("Lie derivative of tensors: examples") {
  const auto e = fixture::euclidean();
  const auto s = TangentSample::make({0.3, 0.7}, {1.5, -0.5});
  const auto geo = LocalGeometry::compute(e, s, 3);
  CHECK(finsler::max_abs(lie_derivative_tensor(geo.g(), kRotation, s)) <= 1e-14);
  const TensorValue d = lie_derivative_tensor(geo.g(), kDilation, s);
  CHECK(d(0, 0) == doctest::Approx(2.0));
  CHECK(d(1, 1) == doctest::Approx(2.0));
  CHECK(std::abs(d(0, 1)) <= 1e-14);
  CHECK(jet_order(lie_derivative(geo.g(), kDilation, s)) == jet_order(geo.g()) - 1);
}

TEST_CASE("Lie derivative of the fiber coordinates vanishes") {
  const auto fields = random_linear_fields(2, 10, 99);
  std::vector<VectorFieldOnM> all(fields.begin(), fields.end());
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (all.size() < 20) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%.6f*x1^2 + %.6f*x2*x1 + sin(%.6f*x2)", u(rng), u(rng), u(rng));
    std::string second = "x1*(" + std::to_string(u(rng)) + ")" + " - x2^3";
    all.push_back(field({buf, second}));
  }
  for (const auto& v : all) {
    for (int k = 0; k < 3; ++k) {
      const auto s = fixture::random_sample(fixture::randers_curved(), rng);
      CHECK(finsler::max_abs(lie_derivative_tensor(fiber_coordinates(s), v, s)) <= 1e-12);
    }
  }
}

TEST_CASE("Lie derivative is linear in the field") {
  const auto f = fixture::randers_curved();
  const VectorFieldOnM sum = field({"(0.3*x1*x2 + sin(x2)) + (x1^2)", "(x1^2 - 0.5*x2) + (0)"});
  std::mt19937_64 rng(21);
  for (int k = 0; k < 5; ++k) {
    const auto s = fixture::random_sample(f, rng);
    const auto geo = LocalGeometry::compute(f, s, 4);
    for (const JetTensor* t : {&geo.g(), &geo.C()}) {
      const TensorValue lhs = lie_derivative_tensor(*t, sum, s);
      const TensorValue a = lie_derivative_tensor(*t, kCurly, s), b = lie_derivative_tensor(*t, kQuadratic, s);
      TensorValue rhs = a;
      for (std::size_t e = 0; e < rhs.size(); ++e) rhs.data()[e] += b.data()[e];
      CHECK(max_abs_diff(lhs, rhs) <= 1e-13);
    }
  }
}

TEST_CASE("Lie derivative of the nonlinear connection: examples") {
  const auto e = fixture::euclidean();
  const auto s = TangentSample::make({0.3, 0.7}, {1.5, -0.5});
  CHECK(finsler::max_abs(lie_derivative_nonlinear_connection(e, kDilation, s)) <= 1e-14);
  // Euclidean with a nonlinear field: L_V N^h_i = y^j d_i d_j v^h.
  const TensorValue q = lie_derivative_nonlinear_connection(e, kQuadratic, s);
  CHECK(q(0, 0) == doctest::Approx(2.0 * s.y[0]));
  CHECK(std::abs(q(0, 1)) + std::abs(q(1, 0)) + std::abs(q(1, 1)) <= 1e-14);
}

TEST_CASE("Lie derivative of N equals minus the vertical part of [X^c, delta_i]") {
  std::mt19937_64 rng(30);
  struct Case {
    FinslerStructure f;
    VectorFieldOnM v;
    bool radial;
  };
  const std::vector<Case> cases{{fixture::euclidean(), kCurly, false},
                                {fixture::euclidean(), kQuadratic, false},
                                {fixture::polar(), kTranslation, true},
                                {fixture::polar(), kCurly, true},
                                {fixture::randers_curved(), kCurly, false},
                                {fixture::kropina(), kRotation, false},
                                {fixture::quartic(), kQuadratic, false}};
  for (const auto& c : cases) {
    for (int k = 0; k < 3; ++k) {
      const auto s = fixture::random_sample(c.f, rng, c.radial);
      const TensorValue lie = lie_derivative_nonlinear_connection(c.f, c.v, s);
      CHECK(max_abs_diff(lie, bracket_lie_n(c.f, c.v, s)) <= 1e-5);
    }
  }
}

TEST_CASE("Lie derivative of the Cartan connection matches a finite-difference assembly") {
  std::mt19937_64 rng(31);
  for (const auto& f : {fixture::randers_curved(), fixture::polar(), fixture::quartic()}) {
    for (int k = 0; k < 2; ++k) {
      const auto s = fixture::random_sample(f, rng, f.kind() == StructureKind::riemannian);
      const auto geo = LocalGeometry::compute(f, s, 4);
      CHECK(max_abs_diff(values(lie_derivative_connection(geo, kQuadratic)), fd_lie_connection(f, kQuadratic, s)) <=
            1e-5);
    }
  }
}

TEST_CASE("Lie derivative of the lift metric: examples") {
  const auto e = fixture::euclidean();
  std::mt19937_64 rng(40);
  for (const LiftCoefficients& c : {LiftCoefficients{1, 0, 1}, LiftCoefficients{0, 1, 0}, LiftCoefficients{2, 1, 1}}) {
    const auto s = fixture::random_sample(e, rng);
    CHECK(max_abs(lie_derivative_lift_metric(e, kTranslation, s, c)) <= 1e-14);
    const Eigen::MatrixXd d = lie_derivative_lift_metric(e, kDilation, s, c);
    const Eigen::MatrixXd G = build_lift_metric(fundamental_tensor(e, s), c).matrix;
    CHECK(max_abs(d - 2.0 * G) <= 1e-12);
  }
}

TEST_CASE("block assembly of the lift Lie derivative agrees with the term expansion") {
  std::mt19937_64 rng(41);
  const std::vector<LiftCoefficients> coeffs{{1, 0, 1}, {0, 1, 0}, {2, 1, 1}, {1, 0.5, 2}, {-1, 0.3, 0.7}};
  for (const auto& fam : fixture::families()) {
    double worst = 0.0;
    for (const auto& c : coeffs) {
      for (const auto* v : {&kCurly, &kRotation}) {
        const auto s = fixture::random_sample(fam, rng);
        const auto in = lie_inputs(LocalGeometry::compute(fam.f, s, 4), *v);
        worst = std::max(worst, max_abs(lift_lie_blocks(in, c) - lift_lie_terms(in, c)));
        const auto forms = lift_lie_forms(in);
        worst = std::max(worst, max_abs(lift_lie_blocks(in, c) -
                                        (c.alpha * forms[0] + c.beta * forms[1] + c.gamma * forms[2])));
      }
    }
    CHECK_MESSAGE(worst <= 1e-10, fam.name);
  }
}

TEST_CASE("lift Lie derivative matches the flow oracle") {
  std::mt19937_64 rng(42);
  const LiftCoefficients c{1, 0.5, 2};
  for (const auto& fam : fixture::families()) {
    for (const auto* v : {&kQuadratic, &kRotation}) {
      const auto s = fixture::random_sample(fam, rng);
      const Eigen::MatrixXd got = lie_derivative_lift_metric(fam.f, *v, s, c);
      const Eigen::MatrixXd want = flow_lift(fam.f, *v, s, c);
      CHECK_MESSAGE(max_abs(got - want) <= 1e-4 * std::max(1.0, max_abs(want)), fam.name);
    }
  }
}

TEST_CASE("Killing fields of a Riemannian base lift to Killing fields of every lift metric") {
  std::mt19937_64 rng(43);
  const VectorFieldOnM angular = field({"0", "1"}, "angular");
  for (const LiftCoefficients& c : {LiftCoefficients{1, 0, 1}, LiftCoefficients{0, 1, 0}, LiftCoefficients{2, 1, 1}}) {
    for (int k = 0; k < 5; ++k) {
      const auto s = fixture::random_sample(fixture::polar(), rng, true);
      CHECK(max_abs(lie_derivative_lift_metric(fixture::polar(), angular, s, c)) <= 1e-8);
      const auto e = fixture::random_sample(fixture::euclidean(), rng);
      CHECK(max_abs(lie_derivative_lift_metric(fixture::euclidean(), kRotation, e, c)) <= 1e-8);
    }
  }
}

TEST_CASE("interchange residual examples") {
  const auto e = interchange_residual(fixture::euclidean(), kRotation, TangentSample::make({0.2, 0.4}, {1, 2}));
  CHECK(e.max_residual <= 1e-14);
  std::mt19937_64 rng(50);
  double randers_worst = 0.0, randers_without = 0.0, polar_worst = 0.0, polar_vertical = 0.0;
  for (int k = 0; k < 8; ++k) {
    const auto r = interchange_residual(fixture::randers_curved(), kQuadratic,
                                        fixture::random_sample(fixture::randers_curved(), rng));
    randers_worst = std::max(randers_worst, r.max_residual);
    randers_without = std::max(randers_without, r.max_residual_without_vertical);
    const auto p = interchange_residual(fixture::polar(), kDilation, fixture::random_sample(fixture::polar(), rng, true));
    polar_worst = std::max(polar_worst, p.max_residual);
    polar_vertical = std::max(polar_vertical, finsler::max_abs(p.vertical_term));
  }
  CHECK(randers_worst <= 1e-5);
  CHECK(polar_worst <= 1e-6);
  // The C L N term vanishes when C does, and is what closes the identity otherwise.
  CHECK(polar_vertical <= 1e-12);
  CHECK(randers_without > 1e-3);
}

TEST_CASE("interchange residual on every family") {
  std::mt19937_64 rng(51);
  for (const auto& fam : fixture::families()) {
    for (const auto* v : {&kQuadratic, &kCurly}) {
      const auto r = interchange_residual(fam.f, *v, fixture::random_sample(fam, rng));
      CHECK_MESSAGE(r.max_residual <= 1e-5, fam.name);
    }
  }
  CHECK_THROWS_AS(interchange_residual(LocalGeometry::compute(fixture::euclidean(), TangentSample::make({0, 0}, {1, 0}), 3),
                                       kRotation),
                  ArgumentError);
}

TEST_CASE("bracket identities") {
  const auto e = bracket_check(fixture::euclidean(), TangentSample::make({0.1, 0.2}, {1, 1}));
  CHECK(e.max() <= 1e-9);
  std::mt19937_64 rng(60);
  for (int k = 0; k < 4; ++k) {
    const auto p = bracket_check(fixture::polar(), fixture::random_sample(fixture::polar(), rng, true));
    CHECK(p.horizontal_horizontal <= 1e-5);
    CHECK(p.scalar_test <= 1e-5);
    for (const auto& f : {fixture::randers_curved(), fixture::randers_constant()}) {
      const auto r = bracket_check(f, fixture::random_sample(f, rng));
      CHECK(r.horizontal_horizontal <= 1e-4);
      CHECK(r.horizontal_vertical <= 1e-4);
      CHECK(r.vertical_vertical <= 1e-4);
      CHECK(r.scalar_test <= 1e-4);
    }
  }
}

TEST_CASE("[delta_i, delta_j] has vertical part R^h_ij by an independent bracket") {
  std::mt19937_64 rng(61);
  const auto f = fixture::randers_curved();
  double worst = 0.0, largest = 0.0;
  for (int k = 0; k < 4; ++k) {
    const auto s = fixture::random_sample(f, rng);
    const auto Rh = hh_curvature(LocalGeometry::compute(f, s, 4)).Rh;
    const auto N = nonlinear_connection(f, s);
    const Eigen::VectorXd c = oracle::bracket(oracle::delta(f, 0), oracle::delta(f, 1), oracle::join(s));
    const Eigen::VectorXd a = oracle::adapted(c, N);
    for (int h = 0; h < 2; ++h) {
      worst = std::max({worst, std::abs(a(h)), std::abs(a(2 + h) - Rh(h, 0, 1))});
      largest = std::max(largest, std::abs(Rh(h, 0, 1)));
    }
  }
  CHECK(worst <= 1e-5);
  CHECK(largest > 1e-3);
}

TEST_CASE("frame and lift-form Lie derivatives") {
  const LiftCoefficients c{1, 0, 1};
  const auto e = fixture::euclidean();
  const auto s = TangentSample::make({0.4, -0.3}, {1, 2});
  CHECK(lemma_32_33_check(e, kTranslation, s, c).max() <= 1e-9);

  const auto d = lemma_32_33_check(e, kDilation, s, c);
  CHECK(d.forms[0] <= 1e-6);
  const auto forms = lift_lie_forms(lie_inputs(LocalGeometry::compute(e, s, 4), kDilation));
  Eigen::Matrix4d expect = Eigen::Matrix4d::Zero();
  expect.topLeftCorner(2, 2) = 2.0 * Eigen::Matrix2d::Identity();
  CHECK(max_abs(forms[0] - expect) <= 1e-12);

  std::mt19937_64 rng(70);
  for (int k = 0; k < 4; ++k) {
    const auto r = lemma_32_33_check(fixture::randers_curved(), kRotation,
                                     fixture::random_sample(fixture::randers_curved(), rng), {1, 0.5, 2});
    for (double form : r.forms) CHECK(form <= 1e-4);
    CHECK(r.max() <= 1e-4);
  }
}
