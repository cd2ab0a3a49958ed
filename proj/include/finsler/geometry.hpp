#pragma once

// Local Finsler geometry at a point of TM.
//
// Everything is derived from one jet of F^2 over the 2n coordinates (x, y):
//
//   g_ij     = 1/2 d^2 F^2 / dy^i dy^j
//   C_ijk    = 1/2 d g_ij / dy^k,            C_i^h_j = g^hm C_imj
//   G^i      = 1/4 g^il (y^k d^2F^2/dy^l dx^k - dF^2/dx^l)
//   N^i_j    = dG^i / dy^j
//   delta_i  = d/dx^i - N^m_i d/dy^m
//   F_i^h_j  = 1/2 g^hm (delta_i g_mj + delta_j g_im - delta_m g_ij)
//   R^h_ij   = delta_j N^h_i - delta_i N^h_j
//   R_k^h_ji = delta_i F_k^h_j - delta_j F_k^h_i + F_k^m_j F_m^h_i
//              - F_k^m_i F_m^h_j + C_k^h_m R^m_ji
//
// Each derived object is held as a jet whose order drops by one per
// derivative taken, so curvature (which needs fourth derivatives of F^2) is
// exact to rounding.  Storage order of indices is documented in tensor.hpp.

#include <vector>

#include "finsler/structure.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

class LocalGeometry {
 public:
  /// `order` is the jet order of F^2: 3 gives values of g, C, G, N and F_i^h_j;
  /// 4 additionally gives their first derivatives and the curvature tensors.
  static LocalGeometry compute(const FinslerStructure& f, const TangentSample& s, int order = 4);

  int dimension() const { return n_; }
  int order() const { return order_; }
  const TangentSample& sample() const { return sample_; }

  const Jet& F2() const { return f2_; }
  const JetTensor& g() const { return g_; }
  const JetTensor& g_inv() const { return g_inv_; }
  const JetTensor& C() const { return c_; }
  const JetTensor& C_mixed() const { return c_mixed_; }
  const JetTensor& spray() const { return spray_; }
  const JetTensor& N() const { return n_conn_; }
  const JetTensor& delta_g() const { return delta_g_; }
  const JetTensor& F() const { return f_conn_; }

  /// Coordinate y^i as a jet of the given order.
  Jet y(int i, int order) const;
  Jet x(int i, int order) const;

 private:
  TangentSample sample_;
  int n_ = 0;
  int order_ = 0;
  Jet f2_;
  JetTensor g_, g_inv_, c_, c_mixed_, spray_, n_conn_, delta_g_, f_conn_;
};

struct ConnectionBundle {
  TensorValue g;
  TensorValue g_inv;
  TensorValue C;
  TensorValue C_mixed;
  TensorValue spray;
  TensorValue N;
  TensorValue F;
  TangentSample sample;
};

struct CurvatureValue {
  TensorValue R;   // R_k^h_ji stored (k, h, j, i)
  TensorValue Rh;  // R^h_ij stored (h, i, j)
};

TensorValue fundamental_tensor(const FinslerStructure& f, const TangentSample& s);
TensorValue cartan_tensor(const FinslerStructure& f, const TangentSample& s);
TensorValue spray_coefficients(const FinslerStructure& f, const TangentSample& s);
TensorValue nonlinear_connection(const FinslerStructure& f, const TangentSample& s);
ConnectionBundle cartan_connection(const FinslerStructure& f, const TangentSample& s);
ConnectionBundle bundle_values(const LocalGeometry& geo);

/// delta_i f = d_i f - N^m_i d/dy^m f; the new lower horizontal index is
/// prepended.  The result is one jet order lower than f.
JetTensor delta_derivative(const LocalGeometry& geo, const JetTensor& f);

/// Cartan h-covariant derivative (index appended), for any variance pattern:
/// + F_m^h_j T^..m.. per upper index, - F_k^m_j T_..m.. per lower index.
JetTensor h_covariant_derivative(const LocalGeometry& geo, const JetTensor& t);
/// Cartan v-covariant derivative: as above with d/dy^j and C_i^h_j.
JetTensor v_covariant_derivative(const LocalGeometry& geo, const JetTensor& t);

/// hh-curvature R_k^h_ji and R^h_ij; needs a geometry of order 4.
CurvatureValue hh_curvature(const LocalGeometry& geo);

/// Every tensor reported by the `tensors` command.
struct TensorSet {
  TensorValue g, g_inv, C, spray, N, F, Rh, R;
};

TensorSet tensors_jet(const FinslerStructure& f, const TangentSample& s);
/// Same tensors with each derivative layer replaced by a central difference
/// (step `h`) of the layer below it, evaluated at neighbouring points.
TensorSet tensors_fd(const FinslerStructure& f, const TangentSample& s, double h = 1e-4);

/// Names in the order the fields appear in TensorSet.
std::vector<std::pair<std::string, const TensorValue*>> tensor_entries(const TensorSet& t);

}  // namespace finsler
