#pragma once

// Run configuration for the command-line tool.  The file is JSON:
//
//   {
//     "structure":  {"kind": "randers", "dimension": 2,
//                    "a": [["1", "0"], ["0", "1"]], "b": ["0.5", "0"]},
//     "lift":       {"alpha": 1, "beta": 0, "gamma": 1},
//     "fields":     [{"name": "rotation", "components": ["-x2", "x1"]}],
//     "grid":       {"lower": [-1, -1], "upper": [1, 1], "counts": [3, 3],
//                    "directions": [[1, 0], [0, 1]], "radii": [0.5, 1, 2],
//                    "jitter": 0, "lie_samples": 12},
//     "tolerances": {"cartan_y_contraction": 1e-8},
//     "mode": "jet",
//     "seed": 7
//   }
//
// Structure kinds: euclidean, riemannian (a), randers (a, b), kropina (a, b),
// expression ("F": text).  Every section except "structure" is optional.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/lie.hpp"
#include "json.hpp"

namespace finsler::app {

/// Invalid or inconsistent configuration; the tool exits with code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { jet, fd };

std::string to_string(Mode m);
Mode parse_mode(const std::string& text);

struct FieldSpec {
  std::string name;
  std::vector<std::string> components;
};

struct GridConfig {
  std::optional<std::vector<double>> lower, upper;
  std::optional<std::vector<int>> counts;
  std::optional<std::vector<std::vector<double>>> directions;
  std::optional<std::vector<double>> radii;
  double jitter = 0.0;
  int lie_samples = 12;
};

struct RunConfig {
  StructureKind kind = StructureKind::euclidean;
  int dimension = 2;
  std::vector<std::vector<std::string>> a;
  std::vector<std::string> b;
  std::string expression;
  LiftCoefficients lift;
  std::vector<FieldSpec> fields;
  GridConfig grid;
  std::map<std::string, double> tolerances;
  Mode mode = Mode::jet;
  std::uint64_t seed = 0;
  nlohmann::json source;  // the parsed document, echoed into reports
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

FinslerStructure build_structure(const RunConfig& c);
std::vector<VectorFieldOnM> build_fields(const RunConfig& c);

enum class GridPurpose { validation, classification };
/// Grid from the config, with unset entries taken from the default grid for
/// the given purpose.
GridSpec grid_spec(const RunConfig& c, GridPurpose purpose);

}  // namespace finsler::app
