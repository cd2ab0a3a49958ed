#pragma once

#include <optional>
#include <string>
#include <vector>

#include "finsler/app/config.hpp"
#include "finsler/app/report.hpp"

namespace finsler::app {

struct ToleranceDefault {
  const char* name;
  double jet;
  double fd;
};

/// Every tolerance name the tool understands, with its default per mode.
const std::vector<ToleranceDefault>& tolerance_defaults();
/// Configured tolerance, or the default for the mode.  Unknown names throw.
double tolerance(const RunConfig& c, const std::string& name, Mode mode);
/// Rejects tolerance names that no command uses.
void check_tolerance_names(const RunConfig& c);

/// Quadratic field used by the Lie-derivative checks on top of the
/// configured fields.
VectorFieldOnM quadratic_test_field(int n);

/// Identity suites over the validation grid.
Report cmd_verify(const RunConfig& c, std::optional<Mode> mode = {});
/// Conformal classification of every configured field.
Report cmd_classify(const RunConfig& c);
/// Tensor dump at one sample.
Report cmd_tensors(const RunConfig& c, const TangentSample& s, std::optional<Mode> mode = {});

}  // namespace finsler::app
