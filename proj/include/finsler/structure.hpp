#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finsler/expr.hpp"
#include "finsler/jet.hpp"

namespace finsler {

inline constexpr double kDefaultMinFiberNorm = 1e-6;

/// A point (x, y) of TM with y off the zero section.
struct TangentSample {
  std::vector<double> x;
  std::vector<double> y;

  static TangentSample make(std::vector<double> x, std::vector<double> y,
                            double min_fiber_norm = kDefaultMinFiberNorm);

  int dimension() const { return static_cast<int>(x.size()); }
  std::string describe() const;
};

enum class StructureKind { euclidean, riemannian, randers, kropina, expression };

std::string to_string(StructureKind kind);

/// Square matrix of expressions over the base coordinates, row-major.
struct ExprMatrix {
  int n = 0;
  std::vector<ExprTree> entries;

  const ExprTree& operator()(int i, int j) const { return entries[i * n + j]; }
  static ExprMatrix parse(const std::vector<std::vector<std::string>>& rows, int n);
  static ExprMatrix identity(int n);
};

std::vector<ExprTree> parse_covector(const std::vector<std::string>& entries, int n);

/// Immutable Finsler structure F(x, y).
class FinslerStructure {
 public:
  static FinslerStructure euclidean(int n);
  static FinslerStructure riemannian(ExprMatrix a,
                                     std::span<const std::vector<double>> base_points = {});
  static FinslerStructure randers(ExprMatrix a, std::vector<ExprTree> b,
                                  std::span<const std::vector<double>> base_points = {});
  static FinslerStructure kropina(ExprMatrix a, std::vector<ExprTree> b,
                                  std::span<const std::vector<double>> base_points = {});
  static FinslerStructure expression(std::string_view text, int n);

  int dimension() const { return dimension_; }
  StructureKind kind() const { return kind_; }
  const std::optional<std::string>& source_text() const { return source_text_; }
  const ExprMatrix& a() const { return a_; }
  const std::vector<ExprTree>& b() const { return b_; }

  /// F and F^2 for S = double or S = Jet; x and y have dimension() entries.
  template <class S>
  S F(std::span<const S> x, std::span<const S> y) const;
  template <class S>
  S F2(std::span<const S> x, std::span<const S> y) const;

  /// Plain evaluation at a sample, with domain errors annotated by location.
  double F(const TangentSample& s) const;
  double F2(const TangentSample& s) const;

 private:
  template <class S>
  S quadratic(std::span<const S> x, std::span<const S> y) const;
  template <class S>
  S linear(std::span<const S> x, std::span<const S> y) const;

  int dimension_ = 0;
  StructureKind kind_ = StructureKind::euclidean;
  ExprMatrix a_;
  std::vector<ExprTree> b_;
  ExprTree expr_;
  std::optional<std::string> source_text_;
};

/// Jet variables are ordered x1..xn, y1..yn.
inline int x_var(int i) { return i; }
inline int y_var(int i, int n) { return n + i; }

/// Seeds the 2n coordinate jets of a sample.
std::vector<Jet> seed_sample(const TangentSample& s, int order);

/// Jet of F over all 2n variables at the sample.
Jet evaluate_F(const FinslerStructure& f, const TangentSample& s, int order);
/// Jet of F^2 over all 2n variables at the sample.
Jet evaluate_F2(const FinslerStructure& f, const TangentSample& s, int order);

// ---------------------------------------------------------------------------
// Sample grids

struct GridSpec {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<int> counts;
  /// Fiber directions; normalized before use.  Empty means the default set.
  std::vector<std::vector<double>> directions;
  std::vector<double> radii;
  double jitter = 0.0;
  unsigned seed = 0;
  double min_fiber_norm = kDefaultMinFiberNorm;
};

/// 8 unit directions: an octagon (n=2), cube vertices (n=3), or +-e_i (n=4).
std::vector<std::vector<double>> default_fiber_directions(int n);
/// 3^n base points in [-1, 1]^n, default directions, radii {0.5, 1, 2}.
GridSpec default_validation_grid(int n);
/// 3^n base points in [-1, 1]^n, default directions, radii {0.7, 1.3}.
GridSpec default_classification_grid(int n);

std::vector<std::vector<double>> grid_base_points(const GridSpec& spec);
std::vector<TangentSample> make_grid(const GridSpec& spec);

// ---------------------------------------------------------------------------
// Axiom checks

struct ValidationReport {
  std::string name;
  bool pass = true;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::size_t samples_checked = 0;
  std::string worst;  // location (or error) of the largest violation
};

ValidationReport check_homogeneity(const FinslerStructure& f, std::span<const TangentSample> samples,
                                   std::span<const double> lambdas, double tolerance = 1e-9);
/// Positive definiteness of g_ij at every sample; max_residual reports the
/// smallest eigenvalue found (pass iff it is positive for every sample).
ValidationReport check_strong_convexity(const FinslerStructure& f,
                                        std::span<const TangentSample> samples);
/// y^i d/dy^i F = F, relative residual.
ValidationReport check_euler(const FinslerStructure& f, std::span<const TangentSample> samples,
                             double tolerance = 1e-9);
/// F > 0 at every sample.
ValidationReport check_positivity(const FinslerStructure& f, std::span<const TangentSample> samples);

}  // namespace finsler
