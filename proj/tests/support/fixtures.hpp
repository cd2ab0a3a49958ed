#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "finsler/lie.hpp"

namespace fixture {

using namespace finsler;

inline FinslerStructure euclidean(int n = 2) { return FinslerStructure::euclidean(n); }

/// The flat plane in polar coordinates, x1 = r kept in [1, 3].
inline FinslerStructure polar() {
  const std::vector<std::vector<double>> pts{{1, -1}, {2, 0}, {3, 1}};
  return FinslerStructure::riemannian(ExprMatrix::parse({{"1", "0"}, {"0", "x1^2"}}, 2), pts);
}

inline FinslerStructure curved_riemannian() {
  return FinslerStructure::riemannian(
      ExprMatrix::parse({{"1 + 0.3*x2^2", "0.2*sin(x1)"}, {"0.2*sin(x1)", "1.5 + 0.1*x1*x2"}}, 2));
}

inline FinslerStructure randers_constant() {
  return FinslerStructure::randers(ExprMatrix::identity(2), parse_covector({"0.5", "0"}, 2));
}

inline FinslerStructure randers_curved() {
  return FinslerStructure::randers(
      ExprMatrix::parse({{"1 + 0.2*x2^2", "0.1*x1"}, {"0.1*x1", "1 + 0.1*x1^2"}}, 2),
      parse_covector({"0.2*x2", "0.3*sin(x1)"}, 2));
}

inline FinslerStructure kropina() {
  return FinslerStructure::kropina(ExprMatrix::identity(2), parse_covector({"1", "0"}, 2));
}

/// A non-Riemannian, non-Randers DSL structure with x dependence.
inline FinslerStructure quartic() {
  return FinslerStructure::expression(
      "sqrt(y1^2 + y2^2 + (0.2 + 0.1*x1^2)*(y1^4 + y2^4)/(y1^2 + y2^2) + 0.1*x2*y1*y2)", 2);
}

struct Named {
  std::string name;
  FinslerStructure f;
  bool radial = false;  // x1 is a radius and must stay in [1, 3]
};

inline std::vector<Named> families() {
  return {{"euclidean", euclidean()},
          {"polar", polar(), true},
          {"riemannian", curved_riemannian()},
          {"randers_constant", randers_constant()},
          {"randers_curved", randers_curved()},
          {"kropina", kropina()},
          {"quartic", quartic()}};
}

/// Random sample valid for the structure.
inline TangentSample random_sample(const FinslerStructure& f, std::mt19937_64& rng,
                                   bool radial = false) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), r(0.5, 2.0), t(0.0, 2 * M_PI);
  const int n = f.dimension();
  std::vector<double> x(n), y(n);
  for (auto& v : x) v = u(rng);
  if (radial) x[0] += 2.0;
  const double radius = r(rng);
  if (n == 2) {
    // Kropina samples stay well inside the cone y1 > 0.
    const double angle = f.kind() == StructureKind::kropina ? (t(rng) - M_PI) / 3.0 : t(rng);
    y = {radius * std::cos(angle), radius * std::sin(angle)};
  } else {
    double norm = 0.0;
    for (auto& v : y) {
      v = u(rng);
      norm += v * v;
    }
    for (auto& v : y) v *= radius / std::sqrt(norm);
  }
  return TangentSample::make(x, y);
}

inline TangentSample random_sample(const Named& f, std::mt19937_64& rng) {
  return random_sample(f.f, rng, f.radial);
}

inline VectorFieldOnM field(const std::vector<std::string>& comps, std::string name = {}) {
  return VectorFieldOnM::parse(comps, static_cast<int>(comps.size()), std::move(name));
}

}  // namespace fixture
