#pragma once

// A small expression language for Finsler functions and vector fields.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('-')? power
//   power  := atom ('^' integer)?
//   atom   := number | ident | func '(' expr ')' | '(' expr ')'
//   func   := sqrt | sin | cos | exp | log
//   ident  := x[1-9][0-9]* | y[1-9][0-9]*
//
// Variables are 1-based: x1..xn are base coordinates, y1..yn fiber
// coordinates.  Implicit multiplication is not accepted.

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"

namespace finsler {

enum class NodeKind { number, var_x, var_y, add, sub, mul, div, neg, pow, sqrt, sin, cos, exp, log };

struct ExprNode {
  NodeKind kind = NodeKind::number;
  double number = 0.0;  // literal value
  int index = 0;        // 0-based variable index, or the integer exponent for pow
  int lhs = -1;
  int rhs = -1;
};

class ExprTree {
 public:
  ExprTree() = default;

  int dimension() const { return dimension_; }
  const std::vector<ExprNode>& nodes() const { return nodes_; }
  int root() const { return root_; }
  bool empty() const { return root_ < 0; }

  bool uses_fiber_variables() const;

  /// Fully parenthesized text that parses back to an equivalent tree.
  std::string to_string() const;

  /// Evaluates with S = double or S = Jet.  `x` and `y` hold dimension()
  /// entries each.
  template <class S>
  S evaluate(std::span<const S> x, std::span<const S> y) const;

  static ExprTree constant(double value, int dimension);

 private:
  friend class ExprParser;
  int dimension_ = 0;
  int root_ = -1;
  std::vector<ExprNode> nodes_;
};

ExprTree parse_expression(std::string_view text, int dimension);

namespace detail {

inline double value_of(double v) { return v; }
inline double value_of(const Jet& j) { return j.value(); }

inline double constant_like(const double&, double v) { return v; }
inline Jet constant_like(const Jet& proto, double v) { return proto.constant_like(v); }

inline double ipow(double b, int e) {
  if (e < 0 && b == 0.0) throw DomainError("negative power of zero");
  return std::pow(b, e);
}
inline Jet ipow(const Jet& b, int e) { return pow(b, e); }

inline double checked_sqrt(double v) {
  if (v < 0.0) throw DomainError("sqrt of negative value " + std::to_string(v));
  return std::sqrt(v);
}
inline Jet checked_sqrt(const Jet& v) { return sqrt(v); }

inline double checked_log(double v) {
  if (v <= 0.0) throw DomainError("log of nonpositive value " + std::to_string(v));
  return std::log(v);
}
inline Jet checked_log(const Jet& v) { return log(v); }

inline double checked_div(double a, double b) {
  if (b == 0.0) throw DomainError("division by zero");
  return a / b;
}
inline Jet checked_div(const Jet& a, const Jet& b) { return a / b; }

inline double sin_of(double v) { return std::sin(v); }
inline Jet sin_of(const Jet& v) { return sin(v); }
inline double cos_of(double v) { return std::cos(v); }
inline Jet cos_of(const Jet& v) { return cos(v); }
inline double exp_of(double v) { return std::exp(v); }
inline Jet exp_of(const Jet& v) { return exp(v); }

}  // namespace detail

template <class S>
S ExprTree::evaluate(std::span<const S> x, std::span<const S> y) const {
  if (empty()) throw ArgumentError("evaluating an empty expression");
  if (static_cast<int>(x.size()) != dimension_ || static_cast<int>(y.size()) != dimension_)
    throw ArgumentError("expression evaluated with wrong coordinate count");
  const S& proto = x[0];
  std::vector<S> value(nodes_.size());
  // Children always precede their parent in nodes_.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::number: value[i] = detail::constant_like(proto, n.number); break;
      case NodeKind::var_x: value[i] = x[n.index]; break;
      case NodeKind::var_y: value[i] = y[n.index]; break;
      case NodeKind::add: value[i] = value[n.lhs] + value[n.rhs]; break;
      case NodeKind::sub: value[i] = value[n.lhs] - value[n.rhs]; break;
      case NodeKind::mul: value[i] = value[n.lhs] * value[n.rhs]; break;
      case NodeKind::div: value[i] = detail::checked_div(value[n.lhs], value[n.rhs]); break;
      case NodeKind::neg: value[i] = -value[n.lhs]; break;
      case NodeKind::pow: value[i] = detail::ipow(value[n.lhs], n.index); break;
      case NodeKind::sqrt: value[i] = detail::checked_sqrt(value[n.lhs]); break;
      case NodeKind::sin: value[i] = detail::sin_of(value[n.lhs]); break;
      case NodeKind::cos: value[i] = detail::cos_of(value[n.lhs]); break;
      case NodeKind::exp: value[i] = detail::exp_of(value[n.lhs]); break;
      case NodeKind::log: value[i] = detail::checked_log(value[n.lhs]); break;
    }
  }
  return value[root_];
}

}  // namespace finsler
