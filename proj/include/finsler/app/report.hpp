#pragma once

// Report documents written by the command-line tool.
//
//   {
//     "command": "verify",
//     "config": {...},                      // echo of the input document
//     "summary": {"pass": true, "checks": 24, "failed": 0, "mode": "jet"},
//     "checks": [{"name": ..., "anchor": ..., "statistic": "max_residual",
//                 "value": ..., "tolerance": ..., "pass": ..., "samples": ...,
//                 "worst": ...}, ...],
//     "classification": [...],              // classify only
//     "tensors": {...},                     // tensors only
//     "timing": {"seconds": ...}            // excluded from report_body()
//   }
//
// "statistic" is "max_residual" (pass iff value <= tolerance) or a lower
// bound statistic such as "min_eigenvalue" (pass iff value > tolerance).

#include <string>
#include <vector>

#include "finsler/conformal.hpp"
#include "json.hpp"

namespace finsler::app {

struct CheckRecord {
  std::string name;
  std::string anchor;  // the identity being checked
  std::string statistic = "max_residual";
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  int samples = 0;
  std::string worst;  // where the largest violation occurred
};

/// Running maximum over samples; pass is decided at the end.
class CheckAccumulator {
 public:
  CheckAccumulator(std::string name, std::string anchor, double tolerance);
  void add(double residual, const std::string& where);
  void fail(const std::string& why);
  CheckRecord finish() const;

 private:
  CheckRecord r_;
  bool failed_ = false;
};

struct Report {
  std::string command;
  nlohmann::json config;
  std::string mode;
  std::vector<CheckRecord> checks;
  nlohmann::json classification = nlohmann::json::array();
  nlohmann::json tensors;  // null unless set
  std::vector<std::string> notes;

  bool pass() const;
  int failed() const;
};

nlohmann::json to_json(const CheckRecord& r);
nlohmann::json to_json(const ConformalReport& r);
nlohmann::json to_json(const TensorValue& t);

/// Everything except timing: identical inputs give identical bodies.
nlohmann::json report_body(const Report& r);
/// Body plus the timing section.
std::string render_report(const Report& r, double seconds);

}  // namespace finsler::app
