#pragma once

// Vector fields on M, their complete lifts to TM, and Lie derivatives along
// the complete lift.
//
// For a Finsler tensor field T(x, y) the Lie derivative along V = v^a d_a is
//
//   L_V T = v^a d_a T + y^a d_a v^b (d/dy^b) T
//           - sum over upper slots  T^..a.. d_a v^h
//           + sum over lower slots  T_..a.. d_i v^a .
//
// N^h_i and F_i^h_j are not tensors; their Lie derivatives carry the extra
// inhomogeneous terms y^j d_i d_j v^h and d_i d_j v^h respectively.  With
// these, L_V N^h_i is exactly minus the vertical part of [X^c, delta_i].

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "finsler/geometry.hpp"
#include "finsler/lift_metric.hpp"

namespace finsler {

struct VectorFieldOnM {
  std::vector<ExprTree> components;
  std::string name;

  static VectorFieldOnM parse(const std::vector<std::string>& components, int n,
                              std::string name = {});
  int dimension() const { return static_cast<int>(components.size()); }

  std::vector<double> at(const std::vector<double>& x) const;
  /// v^a as jets over the 2n sample variables.
  std::vector<Jet> jets(const TangentSample& s, int order) const;
};

/// X^c = v^i delta_i + (y^j nabla_j v^i) d/dy^i in the adapted frame.
struct CompleteLiftValue {
  std::vector<double> horizontal;
  std::vector<double> vertical;
  TangentSample sample;
};

CompleteLiftValue complete_lift(const LocalGeometry& geo, const VectorFieldOnM& v);
CompleteLiftValue complete_lift(const FinslerStructure& f, const VectorFieldOnM& v,
                                const TangentSample& s);

/// Coordinate Lie derivative of a Finsler tensor field given as jets at the
/// sample.  The result is one jet order lower than t.
JetTensor lie_derivative(const JetTensor& t, const VectorFieldOnM& v, const TangentSample& s);
TensorValue lie_derivative_tensor(const JetTensor& t, const VectorFieldOnM& v,
                                  const TangentSample& s);

/// L_V N^h_i stored (h, i).
JetTensor lie_derivative_nonlinear_connection(const LocalGeometry& geo, const VectorFieldOnM& v);
TensorValue lie_derivative_nonlinear_connection(const FinslerStructure& f, const VectorFieldOnM& v,
                                                const TangentSample& s);
/// L_V F_i^h_j stored (i, h, j).
JetTensor lie_derivative_connection(const LocalGeometry& geo, const VectorFieldOnM& v);

/// Pointwise values entering L_{X^c} of the lift metric.
struct LieInputs {
  TensorValue g;        // g_ij
  TensorValue lie_g;    // L_V g_ij
  TensorValue lie_N;    // L_V N^h_i, stored (h, i)
};

LieInputs lie_inputs(const LocalGeometry& geo, const VectorFieldOnM& v);

/// L_{X^c} of the lift metric from the block equations:
///   hh = alpha L g + beta (P + P^T),  P_ij = g_ai L N^a_j
///   hv = beta L g + gamma P^T,        vh = hv^T,   vv = gamma L g
Eigen::MatrixXd lift_lie_blocks(const LieInputs& in, const LiftCoefficients& c);
/// Same quantity summed term by term from the five-term expansion of
/// L_{X^c}(alpha g1 + beta g2 + gamma g3).
Eigen::MatrixXd lift_lie_terms(const LieInputs& in, const LiftCoefficients& c);
/// L_{X^c} g1, g2, g3 individually, in the adapted coframe.
std::array<Eigen::MatrixXd, 3> lift_lie_forms(const LieInputs& in);

Eigen::MatrixXd lie_derivative_lift_metric(const FinslerStructure& f, const VectorFieldOnM& v,
                                           const TangentSample& s, const LiftCoefficients& c);

struct InterchangeResult {
  /// nabla_k L g_ij - L nabla_k g_ij - g_aj L F^a_ik - g_ai L F^a_jk
  ///   - 2 C_ijm L N^m_k, stored (i, j, k).
  TensorValue residual;
  /// The last term above; it vanishes for Riemannian structures.
  TensorValue vertical_term;
  double max_residual = 0.0;
  /// Residual with the vertical term left out.
  double max_residual_without_vertical = 0.0;
};

/// Needs a geometry of jet order 4.
InterchangeResult interchange_residual(const LocalGeometry& geo, const VectorFieldOnM& v);
InterchangeResult interchange_residual(const FinslerStructure& f, const VectorFieldOnM& v,
                                       const TangentSample& s);

// ---------------------------------------------------------------------------
// Finite-difference machinery on TM (coordinates z = (x, y)).

using TMVectorField = std::function<Eigen::VectorXd(const TangentSample&)>;

/// X^c in coordinates: (v(x), d v(x) y).
TMVectorField complete_lift_field(const VectorFieldOnM& v);
/// delta_i in coordinates: (e_i, -N^.(i)).
TMVectorField delta_field(const FinslerStructure& f, int i);
/// d/dy^i in coordinates.
TMVectorField vertical_field(int n, int i);

/// Coordinate components of [a, b], each directional derivative taken by a
/// central difference of step h.
Eigen::VectorXd fd_bracket(const TMVectorField& a, const TMVectorField& b, const TangentSample& s,
                           double h = 1e-4);
/// a(b(f)) - b(a(f)) by nested central differences of a scalar function.
double fd_bracket_apply(const TMVectorField& a, const TMVectorField& b,
                        const std::function<double(const TangentSample&)>& f,
                        const TangentSample& s, double h = 1e-4);

/// Coordinate components -> adapted-frame (horizontal, vertical) components.
Eigen::VectorXd to_adapted_vector(const Eigen::VectorXd& coord, const TensorValue& N);
/// E with (dx, delta y) = E (dx, dy).
Eigen::MatrixXd coframe_matrix(const TensorValue& N);

/// Lie derivative along X^c of a (0,2) field given in the coordinate frame,
/// by the Euler-step extended point transformation x -> x + t v,
/// y -> y + t (dv) y and a central difference in t.
Eigen::MatrixXd flow_lie_derivative(const VectorFieldOnM& v, const TangentSample& s,
                                    const std::function<Eigen::MatrixXd(const TangentSample&)>& field,
                                    double t = 1e-4);
/// Same for a 1-form (row vector in the coordinate coframe).
Eigen::RowVectorXd flow_lie_derivative_form(
    const VectorFieldOnM& v, const TangentSample& s,
    const std::function<Eigen::RowVectorXd(const TangentSample&)>& field, double t = 1e-4);

struct BracketReport {
  double horizontal_horizontal = 0.0;  // [delta_i, delta_j] = R^h_ij d/dy^h
  double horizontal_vertical = 0.0;    // [delta_i, d/dy^j] = (d N^h_i / dy^j) d/dy^h
  double vertical_vertical = 0.0;      // [d/dy^i, d/dy^j] = 0
  double scalar_test = 0.0;            // item 1 applied to a nonlinear test function
  double max() const;
};

BracketReport bracket_check(const FinslerStructure& f, const TangentSample& s, double h = 1e-4);

struct LieFrameReport {
  double lie_delta = 0.0;        // L_{X^c} delta_i = -d_i v^h delta_h - L_V N^h_i d/dy^h
  double lie_vertical = 0.0;     // L_{X^c} d/dy^i = -d_i v^h d/dy^h
  double lie_dx = 0.0;           // L_{X^c} dx^h = d_m v^h dx^m
  double lie_delta_y = 0.0;      // L_{X^c} delta y^h = L_V N^h_m dx^m + d_m v^h delta y^m
  std::array<double, 3> forms{};  // L_{X^c} g1, g2, g3 vs their expansions
  double lift_flow = 0.0;        // block assembly vs flow derivative of the whole lift metric
  double max() const;
};

LieFrameReport lemma_32_33_check(const FinslerStructure& f, const VectorFieldOnM& v,
                                 const TangentSample& s, const LiftCoefficients& c,
                                 double h = 1e-4);

}  // namespace finsler
