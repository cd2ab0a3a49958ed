#pragma once

// Classification of complete lifts X^c with respect to a lift metric G:
// Killing (L G = 0), homothetic (L G = 2c G, c constant), conformal with a
// varying factor, or not conformal.  The factor is fitted per sample and
// its constancy is tested across the grid only (no claim beyond the sampled
// points).

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "finsler/lie.hpp"

namespace finsler {

struct ConformalTolerances {
  double residual = 1e-6;  // conformal fit residual
  double spread = 1e-6;    // max - min of the factor over the grid
  double proof_step = 1e-6;  // L_V N and the gamma = 0 identity
  double vertical = 1e-6;  // |d Omega / d y|
  double fd_step = 1e-4;   // step for the gradient estimates of Omega
};

struct OmegaFit {
  double omega = 0.0;
  double residual = 0.0;
};

/// Frobenius least squares for lie_g = 2 omega lift_g:
///   omega = <lie_g, lift_g> / (2 <lift_g, lift_g>),
///   residual = |lie_g - 2 omega lift_g| / max(1, |lift_g|).
OmegaFit estimate_omega(const Eigen::MatrixXd& lie_g, const Eigen::MatrixXd& lift_g);

enum class Verdict { killing, homothetic, conformal_nonhomothetic, not_conformal };

std::string to_string(Verdict v);

struct OmegaSample {
  TangentSample sample;
  double omega = 0.0;
  double residual = 0.0;
};

struct ConformalReport {
  std::string field;
  Verdict verdict = Verdict::not_conformal;
  std::vector<OmegaSample> omega_samples;
  double omega_mean = 0.0;
  double omega_spread = 0.0;
  double max_residual = 0.0;
  /// Samples whose residual exceeds the tolerance but which did not make up
  /// enough of the grid to reject conformality.
  int outlier_count = 0;
  /// Largest |d Omega / d y^k| (central differences) and largest spread of
  /// Omega among samples sharing a base point.
  double vertical_gradient_max = 0.0;
  double vertical_spread_max = 0.0;
  double horizontal_gradient_max = 0.0;
  /// Largest |L_V N^h_i| over the grid.
  double lie_n_max = 0.0;
  /// Largest |y^k (g_ai L F^a_jk + g_aj L F^a_ik)| over the grid.
  double gamma_zero_identity_max = 0.0;
};

/// Needs a nonsingular lift and a grid with at least two base points and at
/// least two fiber points per base point.
ConformalReport classify_field(const FinslerStructure& f, const VectorFieldOnM& v,
                               const LiftCoefficients& c, const std::vector<TangentSample>& grid,
                               const ConformalTolerances& tol = {});

struct Theorem1Summary {
  std::vector<ConformalReport> reports;
  int conformal_nonhomothetic = 0;
  std::vector<std::string> failures;
  bool pass() const { return failures.empty(); }
};

/// Classifies every field and checks that no conformal field has a varying
/// factor, together with the intermediate facts used along the way:
/// L_V N = 0 and d Omega / d y = 0 when gamma != 0, and the gamma = 0
/// identity when gamma = 0, beta != 0.
Theorem1Summary theorem1_suite(const FinslerStructure& f, const LiftCoefficients& c,
                               const std::vector<VectorFieldOnM>& fields,
                               const std::vector<TangentSample>& grid,
                               const ConformalTolerances& tol = {});

/// Seeded affine fields v = A x + b.  Even-numbered fields have a general A,
/// odd-numbered ones A = skew + lambda I.
std::vector<VectorFieldOnM> random_linear_fields(int n, int count, std::uint64_t seed);

}  // namespace finsler
