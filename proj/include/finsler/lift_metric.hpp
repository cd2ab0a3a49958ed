#pragma once

// Lift metric alpha g1 + beta g2 + gamma g3 on TM in the adapted coframe
// {dx^i, delta y^i}, with g1 = g_ij dx^i dx^j, g2 = 2 g_ij dx^i delta y^j and
// g3 = g_ij delta y^i delta y^j.  As a 2n x 2n matrix (horizontal block
// first) it reads [[alpha g, beta g], [beta g, gamma g]]: the weight 2 beta of
// the mixed term is split evenly over the two off-diagonal blocks.

#include <Eigen/Dense>
#include <string>

#include "finsler/tensor.hpp"

namespace finsler {

struct LiftCoefficients {
  double alpha = 1.0;
  double beta = 0.0;
  double gamma = 1.0;

  double discriminant() const { return alpha * gamma - beta * beta; }
};

inline constexpr double kSingularLiftThreshold = 1e-12;

enum class LiftClass { singular, pseudo_riemannian, riemannian };

std::string to_string(LiftClass c);

struct LiftMetricValue {
  Eigen::MatrixXd matrix;
  LiftCoefficients coefficients;
  TensorValue g;
};

struct Signature {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};

LiftMetricValue build_lift_metric(const TensorValue& g, const LiftCoefficients& coeffs);

/// Classification from the coefficients alone.
LiftClass classify_lift(const LiftCoefficients& coeffs);
/// Same, after checking that g is positive definite.
LiftClass classify_lift(const TensorValue& g, const LiftCoefficients& coeffs);

/// Eigenvalue sign counts of a symmetric matrix; |lambda| <= rel_tol * max|lambda|
/// counts as zero.
Signature signature_of(const Eigen::MatrixXd& symmetric, double rel_tol = 1e-12);
/// Whether the eigenvalue signs agree with the coefficient classification.
bool signature_consistent(LiftClass c, const Signature& s, int n);

/// |det(lift) - (alpha gamma - beta^2)^n det(g)^2| / max(1, |det(lift)|).
double det_identity_residual(const TensorValue& g, const LiftCoefficients& coeffs);

Eigen::MatrixXd to_matrix(const TensorValue& rank2);

}  // namespace finsler
