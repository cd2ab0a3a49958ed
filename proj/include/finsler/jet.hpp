#pragma once

// Truncated multivariate Taylor polynomials ("jets").
//
// A Jet stores the Taylor coefficients c_a of a smooth function around a point,
// f(p + h) = sum_a c_a h^a, for every multi-index a with |a| <= max_order.
// Partial derivatives are recovered as d^a f(p) = a! c_a.  Coefficients are
// kept in a dense array ordered by total degree; the ordering and the product
// tables are shared between all jets of the same (num_vars, max_order).

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace finsler {

inline constexpr int kMaxJetOrder = 4;
inline constexpr int kMaxJetVars = 8;

/// Monomial enumeration and multiplication tables for one (num_vars, order).
class MonomialLayout {
 public:
  struct ProductTerm {
    int lhs;
    int rhs;
    int out;
  };

  static std::shared_ptr<const MonomialLayout> get(int num_vars, int max_order);

  int num_vars() const { return num_vars_; }
  int max_order() const { return max_order_; }
  int size() const { return static_cast<int>(degree_.size()); }

  /// Number of monomials of total degree <= order (a prefix of the layout).
  int prefix_size(int order) const { return degree_offsets_[order + 1]; }

  int degree(int index) const { return degree_[index]; }
  std::span<const std::uint8_t> exponents(int index) const {
    return {exponents_.data() + static_cast<std::size_t>(index) * num_vars_,
            static_cast<std::size_t>(num_vars_)};
  }

  /// Index of the monomial with the given exponents, or -1 if its degree is
  /// above max_order.
  int index_of(std::span<const std::uint8_t> exps) const;

  const std::vector<ProductTerm>& products() const { return products_; }

  /// For each monomial m of degree < max_order, index of m + e_var.
  std::span<const int> raise(int var) const {
    return {raise_.data() + static_cast<std::size_t>(var) * size(),
            static_cast<std::size_t>(size())};
  }

  MonomialLayout(int num_vars, int max_order);

 private:
  int num_vars_;
  int max_order_;
  std::vector<std::uint8_t> exponents_;
  std::vector<int> degree_;
  std::vector<int> degree_offsets_;
  std::vector<std::uint32_t> keys_;  // sorted (key, index) pairs for lookup
  std::vector<int> key_index_;
  std::vector<ProductTerm> products_;
  std::vector<int> raise_;
};

class Jet {
 public:
  Jet() = default;

  static Jet constant(double value, int num_vars, int max_order);
  static Jet variable(double value, int var_index, int num_vars, int max_order);

  bool empty() const { return layout_ == nullptr; }
  int num_vars() const { return layout_->num_vars(); }
  int max_order() const { return layout_->max_order(); }
  double value() const { return coeffs_[0]; }

  /// Raw Taylor coefficient for the given exponent vector (not factorial scaled).
  double coefficient(std::span<const std::uint8_t> exps) const;
  std::span<const double> coefficients() const { return coeffs_; }
  const MonomialLayout& layout() const { return *layout_; }

  /// Jet of d f / d v_var, one order lower.
  Jet derivative(int var) const;
  /// Same expansion with every term above `order` dropped.
  Jet truncated(int order) const;
  /// Constant jet over the same variables and order.
  Jet constant_like(double value) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);
  Jet& operator/=(double s);

  friend Jet operator-(Jet a);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator/(double s, const Jet& a);

  /// Compose with a univariate function given its Taylor coefficients at
  /// value(): out = sum_k series[k] * (self - value())^k.
  Jet compose(std::span<const double> series) const;

 private:
  Jet(std::shared_ptr<const MonomialLayout> layout, std::vector<double> coeffs)
      : layout_(std::move(layout)), coeffs_(std::move(coeffs)) {}

  void require_compatible(const Jet& o) const;

  std::shared_ptr<const MonomialLayout> layout_;
  std::vector<double> coeffs_;
};

Jet sqrt(const Jet& u);
Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet exp(const Jet& u);
Jet log(const Jet& u);
Jet pow(const Jet& u, int exponent);
Jet reciprocal(const Jet& u);

enum class JetOp { add, sub, mul, div, sqrt, pow_int, sin, cos, exp, log };

Jet seed_variable(double value, int var_index, int num_vars, int max_order);

/// Dispatch form of the jet arithmetic.  `exponent` is used by pow_int only.
Jet jet_apply(JetOp op, std::span<const Jet> args, int exponent = 0);

/// Partial derivative d^k f / dv_{i1} ... dv_{ik}; the multi-index is the
/// list of differentiated variables, so {0, 1, 1} means d^3/dv0 dv1 dv1.
double extract_partial(const Jet& jet, std::span<const int> variables);
inline double extract_partial(const Jet& jet, std::initializer_list<int> variables) {
  return extract_partial(jet, std::span<const int>(variables.begin(), variables.size()));
}

}  // namespace finsler
