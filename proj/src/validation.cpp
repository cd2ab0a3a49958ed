#include <Eigen/Dense>
#include <cmath>

#include "finsler/geometry.hpp"
#include "finsler/structure.hpp"

namespace finsler {

namespace {

void note(ValidationReport& r, double residual, const std::string& where) {
  ++r.samples_checked;
  if (residual > r.max_residual || std::isnan(residual)) {
    r.max_residual = residual;
    r.worst = where;
  }
}

void fail_with(ValidationReport& r, const std::exception& e) {
  ++r.samples_checked;
  r.pass = false;
  if (r.worst.empty()) r.worst = e.what();
}

}  // namespace

ValidationReport check_homogeneity(const FinslerStructure& f, std::span<const TangentSample> samples,
                                   std::span<const double> lambdas, double tolerance) {
  ValidationReport r{"homogeneity", true, 0.0, tolerance, 0, {}};
  for (double lambda : lambdas)
    if (!(lambda > 0.0)) throw ArgumentError("homogeneity factors must be positive");
  for (const auto& s : samples) {
    try {
      const double base = f.F(s);
      for (double lambda : lambdas) {
        TangentSample scaled = s;
        for (auto& v : scaled.y) v *= lambda;
        const double expect = lambda * base;
        const double res = std::abs(f.F(scaled) - expect) / std::abs(expect);
        note(r, res, s.describe() + ", lambda=" + std::to_string(lambda));
      }
    } catch (const std::exception& e) {
      fail_with(r, e);
    }
  }
  r.pass = r.pass && r.max_residual <= tolerance;
  return r;
}

ValidationReport check_strong_convexity(const FinslerStructure& f,
                                        std::span<const TangentSample> samples) {
  ValidationReport r{"strong_convexity", true, 0.0, 0.0, 0, {}};
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    try {
      const TensorValue g = fundamental_tensor(f, s);
      const int n = g.dim();
      Eigen::MatrixXd m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = g(i, j);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
      const double lo = es.eigenvalues().minCoeff();
      const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
      ++r.samples_checked;
      if (lo < min_eig) {
        min_eig = lo;
        r.worst = s.describe();
      }
      if (!(lo > 1e-12 * scale)) r.pass = false;
    } catch (const std::exception& e) {
      fail_with(r, e);
    }
  }
  r.max_residual = std::isfinite(min_eig) ? min_eig : 0.0;
  return r;
}

ValidationReport check_euler(const FinslerStructure& f, std::span<const TangentSample> samples,
                             double tolerance) {
  ValidationReport r{"euler_identity", true, 0.0, tolerance, 0, {}};
  for (const auto& s : samples) {
    try {
      const int n = s.dimension();
      const Jet F = evaluate_F(f, s, 1);
      double lhs = 0.0;
      for (int i = 0; i < n; ++i) lhs += s.y[i] * extract_partial(F, {y_var(i, n)});
      note(r, std::abs(lhs - F.value()) / std::max(std::abs(F.value()), 1e-300), s.describe());
    } catch (const std::exception& e) {
      fail_with(r, e);
    }
  }
  r.pass = r.pass && r.max_residual <= tolerance;
  return r;
}

ValidationReport check_positivity(const FinslerStructure& f, std::span<const TangentSample> samples) {
  ValidationReport r{"positivity", true, 0.0, 0.0, 0, {}};
  double min_f = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    try {
      const double v = f.F(s);
      ++r.samples_checked;
      if (v < min_f) {
        min_f = v;
        r.worst = s.describe();
      }
      if (!(v > 0.0)) r.pass = false;
    } catch (const std::exception& e) {
      fail_with(r, e);
    }
  }
  r.max_residual = std::isfinite(min_f) ? min_f : 0.0;
  return r;
}

}  // namespace finsler
