#include "finsler/lift_metric.hpp"

#include <cmath>

namespace finsler {

std::string to_string(LiftClass c) {
  switch (c) {
    case LiftClass::singular: return "singular";
    case LiftClass::pseudo_riemannian: return "pseudo_riemannian";
    case LiftClass::riemannian: return "riemannian";
  }
  return "unknown";
}

Eigen::MatrixXd to_matrix(const TensorValue& t) {
  if (t.rank() != 2) throw ArgumentError("expected a rank-2 tensor");
  const int n = t.dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = t(i, j);
  return m;
}

namespace {

Eigen::MatrixXd symmetric_matrix(const TensorValue& g) {
  Eigen::MatrixXd m = to_matrix(g);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ArgumentError("fundamental tensor is not symmetric");
  return m;
}

}  // namespace

LiftMetricValue build_lift_metric(const TensorValue& g, const LiftCoefficients& c) {
  const Eigen::MatrixXd m = symmetric_matrix(g);
  const int n = g.dim();
  LiftMetricValue out{Eigen::MatrixXd(2 * n, 2 * n), c, g};
  out.matrix.topLeftCorner(n, n) = c.alpha * m;
  out.matrix.topRightCorner(n, n) = c.beta * m;
  out.matrix.bottomLeftCorner(n, n) = c.beta * m;
  out.matrix.bottomRightCorner(n, n) = c.gamma * m;
  return out;
}

LiftClass classify_lift(const LiftCoefficients& c) {
  const double d = c.discriminant();
  if (!std::isfinite(d)) throw ArgumentError("lift coefficients must be finite");
  if (std::abs(d) < kSingularLiftThreshold) return LiftClass::singular;
  if (c.alpha > 0.0 && c.gamma > 0.0 && d > 0.0) return LiftClass::riemannian;
  return LiftClass::pseudo_riemannian;
}

LiftClass classify_lift(const TensorValue& g, const LiftCoefficients& c) {
  Eigen::LLT<Eigen::MatrixXd> llt(symmetric_matrix(g));
  if (llt.info() != Eigen::Success) throw ArgumentError("fundamental tensor is not positive definite");
  return classify_lift(c);
}

Signature signature_of(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  Signature s;
  for (int i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) <= rel_tol * scale)
      ++s.zero;
    else if (ev(i) > 0)
      ++s.positive;
    else
      ++s.negative;
  }
  return s;
}

bool signature_consistent(LiftClass c, const Signature& s, int n) {
  switch (c) {
    case LiftClass::singular: return s.zero > 0;
    case LiftClass::riemannian: return s.positive == 2 * n;
    case LiftClass::pseudo_riemannian: return s.zero == 0 && s.negative > 0;
  }
  return false;
}

double det_identity_residual(const TensorValue& g, const LiftCoefficients& c) {
  const auto lift = build_lift_metric(g, c);
  const double lhs = lift.matrix.determinant();
  const double rhs = std::pow(c.discriminant(), g.dim()) * std::pow(to_matrix(g).determinant(), 2);
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

}  // namespace finsler
