#include "finsler/structure.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

std::string format_vector(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
  return os.str();
}

Eigen::MatrixXd eval_matrix(const ExprMatrix& a, const std::vector<double>& x) {
  const int n = a.n;
  std::vector<double> zeros(n, 0.0);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = a(i, j).evaluate<double>(x, zeros);
  return m;
}

Eigen::VectorXd eval_covector(const std::vector<ExprTree>& b, const std::vector<double>& x) {
  const int n = static_cast<int>(b.size());
  std::vector<double> zeros(n, 0.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = b[i].evaluate<double>(x, zeros);
  return v;
}

void require_base_only(const ExprTree& e, const char* what) {
  if (e.uses_fiber_variables())
    throw ArgumentError(std::string(what) + " may depend on x only");
}

// Symmetric positive definite at every base point; returns the Cholesky
// factors for later use.
std::vector<Eigen::LLT<Eigen::MatrixXd>> validate_quadratic_form(
    const ExprMatrix& a, std::span<const std::vector<double>> base_points) {
  for (const auto& e : a.entries) require_base_only(e, "quadratic form coefficients");
  std::vector<Eigen::LLT<Eigen::MatrixXd>> out;
  for (const auto& x : base_points) {
    Eigen::MatrixXd m = eval_matrix(a, x);
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
      throw ArgumentError("quadratic form is not symmetric at x=" + format_vector(x));
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
      throw ArgumentError("quadratic form is not positive definite at x=" + format_vector(x));
    out.push_back(std::move(llt));
  }
  return out;
}

std::vector<std::vector<double>> default_points(int n,
                                                std::span<const std::vector<double>> given) {
  if (!given.empty()) return {given.begin(), given.end()};
  return grid_base_points(default_validation_grid(n));
}

}  // namespace

TangentSample TangentSample::make(std::vector<double> x, std::vector<double> y,
                                  double min_fiber_norm) {
  if (x.size() != y.size() || x.empty())
    throw ArgumentError("sample x and y must have the same positive length");
  double norm2 = 0.0;
  for (double v : y) norm2 += v * v;
  if (!(std::sqrt(norm2) >= min_fiber_norm))
    throw ArgumentError("sample fiber vector is within " + std::to_string(min_fiber_norm) +
                        " of the zero section");
  return {std::move(x), std::move(y)};
}

std::string TangentSample::describe() const {
  return "x=" + format_vector(x) + ", y=" + format_vector(y);
}

std::string to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::euclidean: return "euclidean";
    case StructureKind::riemannian: return "riemannian";
    case StructureKind::randers: return "randers";
    case StructureKind::kropina: return "kropina";
    case StructureKind::expression: return "expression";
  }
  return "unknown";
}

ExprMatrix ExprMatrix::parse(const std::vector<std::vector<std::string>>& rows, int n) {
  if (static_cast<int>(rows.size()) != n) throw ArgumentError("matrix must have n rows");
  ExprMatrix m;
  m.n = n;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n) throw ArgumentError("matrix must have n columns");
    for (const auto& text : row) m.entries.push_back(parse_expression(text, n));
  }
  return m;
}

ExprMatrix ExprMatrix::identity(int n) {
  ExprMatrix m;
  m.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.entries.push_back(ExprTree::constant(i == j ? 1.0 : 0.0, n));
  return m;
}

std::vector<ExprTree> parse_covector(const std::vector<std::string>& entries, int n) {
  if (static_cast<int>(entries.size()) != n) throw ArgumentError("covector must have n entries");
  std::vector<ExprTree> out;
  for (const auto& text : entries) out.push_back(parse_expression(text, n));
  return out;
}

FinslerStructure FinslerStructure::euclidean(int n) {
  if (n < 1) throw ArgumentError("dimension must be positive");
  FinslerStructure s;
  s.dimension_ = n;
  s.kind_ = StructureKind::euclidean;
  s.a_ = ExprMatrix::identity(n);
  return s;
}

FinslerStructure FinslerStructure::riemannian(ExprMatrix a,
                                              std::span<const std::vector<double>> base_points) {
  const int n = a.n;
  validate_quadratic_form(a, default_points(n, base_points));
  FinslerStructure s;
  s.dimension_ = n;
  s.kind_ = StructureKind::riemannian;
  s.a_ = std::move(a);
  return s;
}

FinslerStructure FinslerStructure::randers(ExprMatrix a, std::vector<ExprTree> b,
                                           std::span<const std::vector<double>> base_points) {
  const int n = a.n;
  if (static_cast<int>(b.size()) != n) throw ArgumentError("Randers covector must have n entries");
  for (const auto& e : b) require_base_only(e, "Randers covector");
  const auto points = default_points(n, base_points);
  const auto factors = validate_quadratic_form(a, points);
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Eigen::VectorXd bv = eval_covector(b, points[p]);
    const double norm = std::sqrt(bv.dot(factors[p].solve(bv)));
    if (!(norm < 1.0))
      throw ArgumentError("Randers covector has a-norm " + std::to_string(norm) +
                          " >= 1 at x=" + format_vector(points[p]));
  }
  FinslerStructure s;
  s.dimension_ = n;
  s.kind_ = StructureKind::randers;
  s.a_ = std::move(a);
  s.b_ = std::move(b);
  return s;
}

FinslerStructure FinslerStructure::kropina(ExprMatrix a, std::vector<ExprTree> b,
                                           std::span<const std::vector<double>> base_points) {
  const int n = a.n;
  if (static_cast<int>(b.size()) != n) throw ArgumentError("Kropina covector must have n entries");
  for (const auto& e : b) require_base_only(e, "Kropina covector");
  const auto points = default_points(n, base_points);
  validate_quadratic_form(a, points);
  for (const auto& x : points)
    if (eval_covector(b, x).norm() == 0.0)
      throw ArgumentError("Kropina covector vanishes at x=" + format_vector(x));
  FinslerStructure s;
  s.dimension_ = n;
  s.kind_ = StructureKind::kropina;
  s.a_ = std::move(a);
  s.b_ = std::move(b);
  return s;
}

FinslerStructure FinslerStructure::expression(std::string_view text, int n) {
  FinslerStructure s;
  s.dimension_ = n;
  s.kind_ = StructureKind::expression;
  s.expr_ = parse_expression(text, n);
  s.source_text_ = std::string(text);
  return s;
}

template <class S>
S FinslerStructure::quadratic(std::span<const S> x, std::span<const S> y) const {
  const int n = dimension_;
  S q = detail::constant_like(y[0], 0.0);
  if (kind_ == StructureKind::euclidean) {
    for (int i = 0; i < n; ++i) q = q + y[i] * y[i];
    return q;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const S aij = a_(i, j).evaluate<S>(x, y);
      q = q + (i == j ? 1.0 : 2.0) * aij * y[i] * y[j];
    }
  }
  return q;
}

template <class S>
S FinslerStructure::linear(std::span<const S> x, std::span<const S> y) const {
  S l = detail::constant_like(y[0], 0.0);
  for (int i = 0; i < dimension_; ++i) l = l + b_[i].evaluate<S>(x, y) * y[i];
  return l;
}

template <class S>
S FinslerStructure::F2(std::span<const S> x, std::span<const S> y) const {
  switch (kind_) {
    case StructureKind::euclidean:
    case StructureKind::riemannian: return quadratic(x, y);
    default: {
      const S f = F(x, y);
      return f * f;
    }
  }
}

template <class S>
S FinslerStructure::F(std::span<const S> x, std::span<const S> y) const {
  if (static_cast<int>(x.size()) != dimension_ || static_cast<int>(y.size()) != dimension_)
    throw ArgumentError("structure evaluated with wrong coordinate count");
  switch (kind_) {
    case StructureKind::euclidean:
    case StructureKind::riemannian: return detail::checked_sqrt(quadratic(x, y));
    case StructureKind::randers: return detail::checked_sqrt(quadratic(x, y)) + linear(x, y);
    case StructureKind::kropina: {
      const S beta = linear(x, y);
      if (!(detail::value_of(beta) > 0.0))
        throw DomainError("Kropina structure requires b_i y^i > 0");
      return detail::checked_div(quadratic(x, y), beta);
    }
    case StructureKind::expression: return expr_.evaluate<S>(x, y);
  }
  throw ArgumentError("unknown structure kind");
}

}  // namespace finsler

namespace finsler {

template double FinslerStructure::F<double>(std::span<const double>, std::span<const double>) const;
template Jet FinslerStructure::F<Jet>(std::span<const Jet>, std::span<const Jet>) const;
template double FinslerStructure::F2<double>(std::span<const double>, std::span<const double>) const;
template Jet FinslerStructure::F2<Jet>(std::span<const Jet>, std::span<const Jet>) const;

namespace {

template <class Fn>
auto at_sample(const TangentSample& s, Fn&& fn) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw DomainError(std::string(e.what()) + " at " + s.describe());
  }
}

}  // namespace

double FinslerStructure::F(const TangentSample& s) const {
  return at_sample(s, [&] { return F<double>(s.x, s.y); });
}

double FinslerStructure::F2(const TangentSample& s) const {
  return at_sample(s, [&] { return F2<double>(s.x, s.y); });
}

std::vector<Jet> seed_sample(const TangentSample& s, int order) {
  const int n = s.dimension();
  std::vector<Jet> vars;
  vars.reserve(2 * n);
  for (int i = 0; i < n; ++i) vars.push_back(Jet::variable(s.x[i], x_var(i), 2 * n, order));
  for (int i = 0; i < n; ++i) vars.push_back(Jet::variable(s.y[i], y_var(i, n), 2 * n, order));
  return vars;
}

namespace {

void require_sample_fits(const FinslerStructure& f, const TangentSample& s, int order) {
  if (s.dimension() != f.dimension()) throw ArgumentError("sample dimension does not match structure");
  if (order < 0 || order > kMaxJetOrder) throw ArgumentError("jet order must be in [0, 4]");
}

}  // namespace

Jet evaluate_F(const FinslerStructure& f, const TangentSample& s, int order) {
  require_sample_fits(f, s, order);
  const auto vars = seed_sample(s, order);
  const int n = s.dimension();
  std::span<const Jet> all(vars);
  return at_sample(s, [&] { return f.F<Jet>(all.first(n), all.subspan(n)); });
}

Jet evaluate_F2(const FinslerStructure& f, const TangentSample& s, int order) {
  require_sample_fits(f, s, order);
  const auto vars = seed_sample(s, order);
  const int n = s.dimension();
  std::span<const Jet> all(vars);
  return at_sample(s, [&] { return f.F2<Jet>(all.first(n), all.subspan(n)); });
}

std::vector<std::vector<double>> default_fiber_directions(int n) {
  std::vector<std::vector<double>> dirs;
  if (n == 2) {
    for (int k = 0; k < 8; ++k) {
      const double t = k * M_PI / 4.0;
      dirs.push_back({std::cos(t), std::sin(t)});
    }
  } else if (n == 3) {
    for (int mask = 0; mask < 8; ++mask) {
      std::vector<double> d(3);
      for (int i = 0; i < 3; ++i) d[i] = ((mask >> i) & 1 ? -1.0 : 1.0) / std::sqrt(3.0);
      dirs.push_back(d);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (double sign : {1.0, -1.0}) {
        std::vector<double> d(n, 0.0);
        d[i] = sign;
        dirs.push_back(d);
      }
    }
  }
  return dirs;
}

GridSpec default_validation_grid(int n) {
  GridSpec g;
  g.lower.assign(n, -1.0);
  g.upper.assign(n, 1.0);
  g.counts.assign(n, 3);
  g.directions = default_fiber_directions(n);
  g.radii = {0.5, 1.0, 2.0};
  return g;
}

GridSpec default_classification_grid(int n) {
  GridSpec g = default_validation_grid(n);
  g.radii = {0.7, 1.3};
  return g;
}

std::vector<std::vector<double>> grid_base_points(const GridSpec& spec) {
  const std::size_t n = spec.lower.size();
  if (n == 0 || spec.upper.size() != n || spec.counts.size() != n)
    throw ArgumentError("grid bounds and counts must all have n entries");
  std::vector<std::vector<double>> points;
  std::vector<int> idx(n, 0);
  for (int c : spec.counts)
    if (c < 1) throw ArgumentError("grid counts must be positive");
  while (true) {
    std::vector<double> x(n);
    for (std::size_t d = 0; d < n; ++d) {
      const int c = spec.counts[d];
      x[d] = c == 1 ? 0.5 * (spec.lower[d] + spec.upper[d])
                    : spec.lower[d] + (spec.upper[d] - spec.lower[d]) * idx[d] / (c - 1);
    }
    points.push_back(std::move(x));
    int d = static_cast<int>(n) - 1;
    while (d >= 0 && ++idx[d] == spec.counts[d]) idx[d--] = 0;
    if (d < 0) break;
  }
  return points;
}

std::vector<TangentSample> make_grid(const GridSpec& spec) {
  const int n = static_cast<int>(spec.lower.size());
  const auto dirs = spec.directions.empty() ? default_fiber_directions(n) : spec.directions;
  if (spec.radii.empty()) throw ArgumentError("grid needs at least one fiber radius");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<TangentSample> samples;
  for (auto x : grid_base_points(spec)) {
    if (spec.jitter > 0.0)
      for (auto& v : x) v += spec.jitter * unit(rng);
    for (const auto& d : dirs) {
      if (static_cast<int>(d.size()) != n) throw ArgumentError("fiber direction has wrong length");
      double norm = 0.0;
      for (double v : d) norm += v * v;
      norm = std::sqrt(norm);
      if (norm == 0.0) throw ArgumentError("fiber direction must be nonzero");
      for (double r : spec.radii) {
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i) y[i] = r * d[i] / norm;
        samples.push_back(TangentSample::make(x, std::move(y), spec.min_fiber_norm));
      }
    }
  }
  return samples;
}

}  // namespace finsler
