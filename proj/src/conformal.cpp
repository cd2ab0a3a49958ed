#include "finsler/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>

namespace finsler {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::killing: return "killing";
    case Verdict::homothetic: return "homothetic";
    case Verdict::conformal_nonhomothetic: return "conformal_nonhomothetic";
    case Verdict::not_conformal: return "not_conformal";
  }
  return "unknown";
}

OmegaFit estimate_omega(const Eigen::MatrixXd& lie_g, const Eigen::MatrixXd& lift_g) {
  if (lie_g.rows() != lift_g.rows() || lie_g.cols() != lift_g.cols())
    throw ArgumentError("estimate_omega: shape mismatch");
  const double gg = lift_g.squaredNorm();
  if (gg == 0.0) throw ArgumentError("estimate_omega: lift metric has zero norm");
  OmegaFit fit;
  fit.omega = (lie_g.array() * lift_g.array()).sum() / (2.0 * gg);
  fit.residual = (lie_g - 2.0 * fit.omega * lift_g).norm() / std::max(1.0, std::sqrt(gg));
  return fit;
}

namespace {

struct SampleEval {
  OmegaFit fit;
  double lie_n = 0.0;
  double gamma_zero = 0.0;
};

OmegaFit fit_at(const FinslerStructure& f, const VectorFieldOnM& v, const LiftCoefficients& c,
                const TangentSample& s) {
  const auto geo = LocalGeometry::compute(f, s, 4);
  const LieInputs in = lie_inputs(geo, v);
  return estimate_omega(lift_lie_blocks(in, c), build_lift_metric(in.g, c).matrix);
}

SampleEval evaluate(const FinslerStructure& f, const VectorFieldOnM& v, const LiftCoefficients& c,
                    const TangentSample& s) {
  const int n = f.dimension();
  const auto geo = LocalGeometry::compute(f, s, 4);
  const LieInputs in = lie_inputs(geo, v);
  SampleEval out;
  out.fit = estimate_omega(lift_lie_blocks(in, c), build_lift_metric(in.g, c).matrix);
  out.lie_n = max_abs(in.lie_N);

  const TensorValue lF = values(lie_derivative_connection(geo, v));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a)
          acc += s.y[k] * (in.g(a, i) * lF(j, a, k) + in.g(a, j) * lF(i, a, k));
      out.gamma_zero = std::max(out.gamma_zero, std::abs(acc));
    }
  return out;
}

void require_grid_shape(const std::vector<TangentSample>& grid) {
  if (grid.empty()) throw ArgumentError("classification grid is empty");
  std::map<std::vector<double>, std::set<std::vector<double>>> fibers;
  for (const auto& s : grid) fibers[s.x].insert(s.y);
  if (fibers.size() < 2) throw ArgumentError("classification grid needs at least two base points");
  for (const auto& [x, ys] : fibers)
    if (ys.size() < 2)
      throw ArgumentError("classification grid needs at least two fiber points per base point");
}

}  // namespace

ConformalReport classify_field(const FinslerStructure& f, const VectorFieldOnM& v,
                               const LiftCoefficients& c, const std::vector<TangentSample>& grid,
                               const ConformalTolerances& tol) {
  if (classify_lift(c) == LiftClass::singular) throw ArgumentError("lift metric singular");
  if (v.dimension() != f.dimension()) throw ArgumentError("field dimension does not match structure");
  require_grid_shape(grid);
  const int n = f.dimension();

  ConformalReport r;
  r.field = v.name;
  std::map<std::vector<double>, std::pair<double, double>> by_base;  // min, max of omega
  int big = 0, over = 0;
  for (const auto& s : grid) {
    const SampleEval e = evaluate(f, v, c, s);
    r.omega_samples.push_back({s, e.fit.omega, e.fit.residual});
    r.max_residual = std::max(r.max_residual, e.fit.residual);
    r.lie_n_max = std::max(r.lie_n_max, e.lie_n);
    r.gamma_zero_identity_max = std::max(r.gamma_zero_identity_max, e.gamma_zero);
    if (e.fit.residual > tol.residual) ++over;
    if (e.fit.residual > 10.0 * tol.residual) ++big;

    auto [it, fresh] = by_base.try_emplace(s.x, e.fit.omega, e.fit.omega);
    if (!fresh) {
      it->second.first = std::min(it->second.first, e.fit.omega);
      it->second.second = std::max(it->second.second, e.fit.omega);
    }

    const double h = tol.fd_step;
    for (int k = 0; k < n; ++k) {
      TangentSample p = s, m = s;
      p.y[k] += h;
      m.y[k] -= h;
      const double dy = (fit_at(f, v, c, p).omega - fit_at(f, v, c, m).omega) / (2.0 * h);
      r.vertical_gradient_max = std::max(r.vertical_gradient_max, std::abs(dy));
      p = s;
      m = s;
      p.x[k] += h;
      m.x[k] -= h;
      const double dx = (fit_at(f, v, c, p).omega - fit_at(f, v, c, m).omega) / (2.0 * h);
      r.horizontal_gradient_max = std::max(r.horizontal_gradient_max, std::abs(dx));
    }
  }
  for (const auto& [x, range] : by_base)
    r.vertical_spread_max = std::max(r.vertical_spread_max, range.second - range.first);

  const double total = static_cast<double>(grid.size());
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0, worst_abs = 0.0;
  int inliers = 0;
  for (const auto& os : r.omega_samples) {
    if (os.residual > tol.residual) continue;
    ++inliers;
    lo = std::min(lo, os.omega);
    hi = std::max(hi, os.omega);
    sum += os.omega;
    worst_abs = std::max(worst_abs, std::abs(os.omega));
  }
  if (big >= 0.25 * total || over > 0.5 * total || inliers == 0) {
    double all_lo = lo, all_hi = hi, all_sum = 0.0;
    for (const auto& os : r.omega_samples) {
      all_lo = std::min(all_lo, os.omega);
      all_hi = std::max(all_hi, os.omega);
      all_sum += os.omega;
    }
    r.verdict = Verdict::not_conformal;
    r.omega_mean = all_sum / total;
    r.omega_spread = all_hi - all_lo;
    return r;
  }
  r.outlier_count = over;
  r.omega_mean = sum / inliers;
  r.omega_spread = hi - lo;
  if (worst_abs <= tol.residual)
    r.verdict = Verdict::killing;
  else if (r.omega_spread <= tol.spread)
    r.verdict = Verdict::homothetic;
  else
    r.verdict = Verdict::conformal_nonhomothetic;
  return r;
}

Theorem1Summary theorem1_suite(const FinslerStructure& f, const LiftCoefficients& c,
                               const std::vector<VectorFieldOnM>& fields,
                               const std::vector<TangentSample>& grid,
                               const ConformalTolerances& tol) {
  Theorem1Summary out;
  char buf[256];
  for (const auto& v : fields) {
    ConformalReport r = classify_field(f, v, c, grid, tol);
    const std::string name = v.name.empty() ? std::string("field") : v.name;
    if (r.verdict == Verdict::conformal_nonhomothetic) {
      ++out.conformal_nonhomothetic;
      std::snprintf(buf, sizeof buf, "%s: conformal with varying factor (spread %.3g)", name.c_str(),
                    r.omega_spread);
      out.failures.emplace_back(buf);
    }
    const bool conformal = r.verdict == Verdict::killing || r.verdict == Verdict::homothetic;
    if (conformal && c.gamma != 0.0) {
      if (r.lie_n_max > tol.proof_step) {
        std::snprintf(buf, sizeof buf, "%s: L_V N = %.3g is not zero", name.c_str(), r.lie_n_max);
        out.failures.emplace_back(buf);
      }
      if (r.vertical_gradient_max > tol.vertical) {
        std::snprintf(buf, sizeof buf, "%s: factor depends on y (|dOmega/dy| = %.3g)", name.c_str(),
                      r.vertical_gradient_max);
        out.failures.emplace_back(buf);
      }
    }
    if (conformal && c.gamma == 0.0 && c.beta != 0.0 && r.gamma_zero_identity_max > tol.proof_step) {
      std::snprintf(buf, sizeof buf, "%s: y^k (g L F + g L F) = %.3g is not zero", name.c_str(),
                    r.gamma_zero_identity_max);
      out.failures.emplace_back(buf);
    }
    out.reports.push_back(std::move(r));
  }
  return out;
}

std::vector<VectorFieldOnM> random_linear_fields(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<VectorFieldOnM> out;
  char buf[64];
  for (int k = 0; k < count; ++k) {
    std::vector<std::vector<double>> a(n, std::vector<double>(n));
    if (k % 2 == 0) {
      for (auto& row : a)
        for (auto& e : row) e = unit(rng);
    } else {
      const double lambda = unit(rng);
      for (int i = 0; i < n; ++i) {
        a[i][i] = lambda;
        for (int j = i + 1; j < n; ++j) {
          a[i][j] = unit(rng);
          a[j][i] = -a[i][j];
        }
      }
    }
    std::vector<std::string> comps;
    for (int i = 0; i < n; ++i) {
      std::string text;
      for (int j = 0; j < n; ++j) {
        std::snprintf(buf, sizeof buf, "(%.17g)*x%d + ", a[i][j], j + 1);
        text += buf;
      }
      std::snprintf(buf, sizeof buf, "(%.17g)", unit(rng));
      text += buf;
      comps.push_back(std::move(text));
    }
    out.push_back(VectorFieldOnM::parse(comps, n, "random_linear_" + std::to_string(k)));
  }
  return out;
}

}  // namespace finsler
